#include "uavnav/nets/networks.h"

#include <cmath>
#include <random>
#include <string>

#include "uavnav/ad/ops.h"
#include "uavnav/common/errors.h"

namespace uavnav::nets {
namespace {

constexpr std::size_t kEncoderConvs = 4;

std::size_t after_convs(int side) {
  // stride 2, then three stride-1 layers
  return (static_cast<std::size_t>(side) - 3) / 2 + 1 - 2 * (kEncoderConvs - 1);
}

}  // namespace

void NetConfig::validate() const {
  if (image_height < 15 || image_width < 15) {
    throw ConfigError("net: image must be at least 15x15 for four valid 3x3 convolutions");
  }
  if ((image_height - 3) % 2 != (image_width - 3) % 2) {
    throw ConfigError("net: image height and width must have the same parity");
  }
  if (frames < 1) throw ConfigError("net: frames must be positive");
  if (filters < 1) throw ConfigError("net.filters must be positive");
  if (latent_dim < 2) throw ConfigError("net.latent_dim must be at least 2");
  if (hidden < 1) throw ConfigError("net.hidden must be positive");
  if (!(log_std_min < log_std_max)) throw ConfigError("net: log_std_min must be below log_std_max");
}

std::size_t NetConfig::conv_out_height() const { return after_convs(image_height); }
std::size_t NetConfig::conv_out_width() const { return after_convs(image_width); }

Encoder::Encoder(const NetConfig& config, Rng& rng) {
  config.validate();
  const auto filters = static_cast<std::size_t>(config.filters);
  std::size_t channels = static_cast<std::size_t>(config.frames);
  for (std::size_t i = 0; i < kEncoderConvs; ++i) {
    convs_.push_back(ConvLayer::fan_in_uniform(channels, filters, i == 0 ? 2 : 1, rng));
    channels = filters;
  }
  conv_h_ = config.conv_out_height();
  conv_w_ = config.conv_out_width();
  const auto latent = static_cast<std::size_t>(config.latent_dim);
  projection_ = DenseLayer::orthogonal(filters * conv_h_ * conv_w_, latent, rng);
  ln_gain_ = Tensor::full({latent}, 1.0f, true);
  ln_shift_ = Tensor::zeros({latent}, true);
}

Tensor Encoder::forward(const Tensor& stack) const {
  Tensor h = stack;
  for (const ConvLayer& conv : convs_) h = ad::relu(conv.forward(h));
  const std::size_t n = h.dim(0);
  h = ad::reshape(h, {n, h.numel() / n});
  return ad::tanh(ad::layer_norm(projection_.forward(h), ln_gain_, ln_shift_));
}

ParamList Encoder::parameters() const {
  ParamList out;
  for (std::size_t i = 0; i < convs_.size(); ++i) convs_[i].append_params("encoder.conv" + std::to_string(i), out);
  projection_.append_params("encoder.fc", out);
  out.push_back({"encoder.ln.gain", ln_gain_});
  out.push_back({"encoder.ln.shift", ln_shift_});
  return out;
}

Encoder Encoder::clone() const {
  Encoder copy;
  for (const ConvLayer& c : convs_) copy.convs_.push_back(c.clone());
  copy.projection_ = projection_.clone();
  copy.ln_gain_ = ln_gain_.clone();
  copy.ln_shift_ = ln_shift_.clone();
  copy.conv_h_ = conv_h_;
  copy.conv_w_ = conv_w_;
  return copy;
}

Decoder::Decoder(const NetConfig& config, Rng& rng) {
  config.validate();
  filters_ = static_cast<std::size_t>(config.filters);
  conv_h_ = config.conv_out_height();
  conv_w_ = config.conv_out_width();
  output_padding_ = static_cast<std::size_t>((config.image_height - 3) % 2);
  projection_ = DenseLayer::orthogonal(static_cast<std::size_t>(config.latent_dim), filters_ * conv_h_ * conv_w_, rng);
  for (std::size_t i = 0; i + 1 < kEncoderConvs; ++i) {
    deconvs_.push_back(ConvLayer::transposed_fan_in_uniform(filters_, filters_, 1, rng));
  }
  deconvs_.push_back(ConvLayer::transposed_fan_in_uniform(filters_, static_cast<std::size_t>(config.frames), 2, rng));
}

Tensor Decoder::forward(const Tensor& latent) const {
  const std::size_t n = latent.dim(0);
  Tensor h = ad::relu(projection_.forward(latent));
  h = ad::reshape(h, {n, filters_, conv_h_, conv_w_});
  for (std::size_t i = 0; i < deconvs_.size(); ++i) {
    const bool last = i + 1 == deconvs_.size();
    h = deconvs_[i].forward_transposed(h, last ? output_padding_ : 0);
    if (!last) h = ad::relu(h);
  }
  return h;
}

ParamList Decoder::parameters() const {
  ParamList out;
  projection_.append_params("decoder.fc", out);
  for (std::size_t i = 0; i < deconvs_.size(); ++i) deconvs_[i].append_params("decoder.deconv" + std::to_string(i), out);
  return out;
}

std::vector<Tensor> Decoder::weights() const {
  std::vector<Tensor> out{projection_.weight};
  for (const ConvLayer& d : deconvs_) out.push_back(d.kernels);
  return out;
}

Decoder Decoder::clone() const {
  Decoder copy;
  copy.projection_ = projection_.clone();
  for (const ConvLayer& d : deconvs_) copy.deconvs_.push_back(d.clone());
  copy.filters_ = filters_;
  copy.conv_h_ = conv_h_;
  copy.conv_w_ = conv_w_;
  copy.output_padding_ = output_padding_;
  return copy;
}

Actor::Actor(const NetConfig& config, Rng& rng)
    : mlp_(config.policy_input_dim(), static_cast<std::size_t>(config.hidden), 2 * NetConfig::kActionDim, rng),
      log_std_min_(config.log_std_min),
      log_std_max_(config.log_std_max) {}

PolicyHead Actor::forward(const Tensor& input) const {
  constexpr std::size_t a = NetConfig::kActionDim;
  const Tensor out = mlp_.forward(input);
  // Smooth squash of the raw log-std into [min, max].
  const float half_range = 0.5f * (log_std_max_ - log_std_min_);
  const Tensor log_std =
      ad::add_scalar(ad::scale(ad::tanh(ad::slice_cols(out, a, 2 * a)), half_range), log_std_min_ + half_range);
  return {ad::slice_cols(out, 0, a), log_std};
}

ParamList Actor::parameters() const {
  ParamList out;
  mlp_.append_params("actor", out);
  return out;
}

Actor Actor::clone() const {
  Actor copy;
  copy.mlp_ = mlp_.clone();
  copy.log_std_min_ = log_std_min_;
  copy.log_std_max_ = log_std_max_;
  return copy;
}

Critic::Critic(const NetConfig& config, Rng& rng)
    : q1_(config.critic_input_dim(), static_cast<std::size_t>(config.hidden), 1, rng),
      q2_(config.critic_input_dim(), static_cast<std::size_t>(config.hidden), 1, rng) {}

std::pair<Tensor, Tensor> Critic::forward(const Tensor& input) const { return {q1_.forward(input), q2_.forward(input)}; }

ParamList Critic::parameters() const {
  ParamList out;
  q1_.append_params("critic.q1", out);
  q2_.append_params("critic.q2", out);
  return out;
}

Critic Critic::clone() const {
  Critic copy;
  copy.q1_ = q1_.clone();
  copy.q2_ = q2_.clone();
  return copy;
}

sim::VelocityCommand to_command(std::span<const float> squashed) {
  if (squashed.size() != 3) throw ContractViolation("to_command: expected 3 squashed components");
  using B = sim::CommandBounds;
  auto map = [](double s, double lo, double hi) { return lo + 0.5 * (s + 1.0) * (hi - lo); };
  return {map(squashed[0], B::kForwardMin, B::kForwardMax), map(squashed[1], -B::kClimbMax, B::kClimbMax),
          map(squashed[2], -B::kYawRateMax, B::kYawRateMax)};
}

std::array<float, 3> to_normalized(const sim::VelocityCommand& cmd) {
  const sim::VelocityCommand c = sim::clamp_command(cmd);
  using B = sim::CommandBounds;
  auto unmap = [](double v, double lo, double hi) { return static_cast<float>(2.0 * (v - lo) / (hi - lo) - 1.0); };
  return {unmap(c.forward, B::kForwardMin, B::kForwardMax), unmap(c.climb, -B::kClimbMax, B::kClimbMax),
          unmap(c.yaw_rate, -B::kYawRateMax, B::kYawRateMax)};
}

ObsTensors to_tensors(std::span<const obs::Observation* const> observations) {
  if (observations.empty()) throw ContractViolation("to_tensors: empty batch");
  const obs::Observation& first = *observations.front();
  const auto h = static_cast<std::size_t>(first.height()), w = static_cast<std::size_t>(first.width());
  const std::size_t plane = obs::kStackDepth * h * w;
  const std::size_t n = observations.size();
  std::vector<float> stack(n * plane);
  std::vector<float> state(n * NetConfig::kStateDim);
  for (std::size_t i = 0; i < n; ++i) {
    const obs::Observation& o = *observations[i];
    if (static_cast<std::size_t>(o.height()) != h || static_cast<std::size_t>(o.width()) != w) {
      throw ContractViolation("to_tensors: mixed image sizes in one batch");
    }
    o.copy_stack(std::span<float>(stack).subspan(i * plane, plane));
    float* s = state.data() + i * NetConfig::kStateDim;
    s[0] = static_cast<float>(o.rel_goal.x());
    s[1] = static_cast<float>(o.rel_goal.y());
    s[2] = static_cast<float>(o.rel_goal.z());
    s[3] = static_cast<float>(o.velocity.forward);
    s[4] = static_cast<float>(o.velocity.climb);
    s[5] = static_cast<float>(o.velocity.yaw_rate);
  }
  return {Tensor::from_values({n, obs::kStackDepth, h, w}, std::move(stack)),
          Tensor::from_values({n, static_cast<std::size_t>(NetConfig::kStateDim)}, std::move(state))};
}

SacNetworks::SacNetworks(const NetConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  if (config_.frames != obs::kStackDepth) throw ConfigError("net: frame stack depth must be 3");
  Rng rng(derive_seed(seed, seed_stream::kInit));
  encoder_ = Encoder(config_, rng);
  decoder_ = Decoder(config_, rng);
  actor_ = Actor(config_, rng);
  critic_ = Critic(config_, rng);
  target_encoder_ = encoder_.clone();
  target_critic_ = critic_.clone();
  log_alpha_ = Tensor::full({1}, std::log(kInitialAlpha), true);
}

ActionSample SacNetworks::sample_action(const Tensor& latent, const Tensor& state, const Tensor& noise) const {
  ActionSample out;
  out.head = actor_.forward(ad::concat_cols({latent, state}));
  out.raw = noise.defined() ? ad::add(out.head.mean, ad::mul(ad::exp(out.head.log_std), noise)) : out.head.mean;
  out.squashed = ad::tanh(out.raw);
  out.log_prob = ad::gaussian_logprob(out.raw, out.head.mean, out.head.log_std);
  return out;
}

std::pair<Tensor, Tensor> SacNetworks::q_values(const Tensor& latent, const Tensor& state, const Tensor& action) const {
  return critic_.forward(ad::concat_cols({latent, state, action}));
}

std::pair<Tensor, Tensor> SacNetworks::target_q_values(const Tensor& latent, const Tensor& state,
                                                       const Tensor& action) const {
  ad::NoGradGuard no_grad;
  return target_critic_.forward(ad::concat_cols({latent, state, action}));
}

std::array<float, 3> SacNetworks::act_squashed(const obs::Observation& observation, ActMode mode, Rng& rng) const {
  ad::NoGradGuard no_grad;
  const obs::Observation* ptr = &observation;
  const ObsTensors in = to_tensors(std::span<const obs::Observation* const>(&ptr, 1));
  Tensor noise;
  if (mode == ActMode::Sample) {
    std::normal_distribution<float> normal(0.0f, 1.0f);
    std::vector<float> eps(NetConfig::kActionDim);
    for (float& e : eps) e = normal(rng);
    noise = Tensor::from_values({1, static_cast<std::size_t>(NetConfig::kActionDim)}, std::move(eps));
  }
  const ActionSample sample = sample_action(encode(in.stack), in.state, noise);
  const auto v = sample.squashed.values();
  return {v[0], v[1], v[2]};
}

sim::VelocityCommand SacNetworks::act(const obs::Observation& observation, ActMode mode, Rng& rng) const {
  return to_command(act_squashed(observation, mode, rng));
}

float SacNetworks::alpha() const { return std::exp(log_alpha_.item()); }

void SacNetworks::soft_update_critic_target(double tau_q) { soft_update(target_critic_.parameters(), critic_.parameters(), tau_q); }

void SacNetworks::soft_update_encoder_target(double tau_enc) {
  soft_update(target_encoder_.parameters(), encoder_.parameters(), tau_enc);
}

namespace {

ParamList temperature_params(const Tensor& log_alpha) { return {{"log_alpha", log_alpha}}; }

}  // namespace

void SacNetworks::save(const std::filesystem::path& dir) const {
  namespace f = checkpoint_files;
  std::filesystem::create_directories(dir);
  ad::save_tensors(dir / f::kEncoder, encoder_.parameters());
  ad::save_tensors(dir / f::kDecoder, decoder_.parameters());
  ad::save_tensors(dir / f::kActor, actor_.parameters());
  ad::save_tensors(dir / f::kCritic, critic_.parameters());
  ad::save_tensors(dir / f::kTargetEncoder, target_encoder_.parameters());
  ad::save_tensors(dir / f::kTargetCritic, target_critic_.parameters());
  ad::save_tensors(dir / f::kTemperature, temperature_params(log_alpha_));
}

void SacNetworks::load(const std::filesystem::path& dir) {
  namespace f = checkpoint_files;
  ad::load_tensors_into(dir / f::kEncoder, encoder_.parameters());
  ad::load_tensors_into(dir / f::kDecoder, decoder_.parameters());
  ad::load_tensors_into(dir / f::kActor, actor_.parameters());
  ad::load_tensors_into(dir / f::kCritic, critic_.parameters());
  ad::load_tensors_into(dir / f::kTargetEncoder, target_encoder_.parameters());
  ad::load_tensors_into(dir / f::kTargetCritic, target_critic_.parameters());
  ad::load_tensors_into(dir / f::kTemperature, temperature_params(log_alpha_));
}

}  // namespace uavnav::nets
