#include "uavnav/train/sac.h"

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "uavnav/ad/checkpoint.h"
#include "uavnav/ad/ops.h"
#include "uavnav/common/errors.h"
#include "uavnav/common/ini.h"

namespace uavnav::train {
namespace {

std::vector<Tensor> tensors_of(const nets::ParamList& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.tensor);
  return out;
}

std::vector<Tensor> concat(std::vector<Tensor> a, const std::vector<Tensor>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

constexpr const char* kCountersFile = "agent_state.ini";

}  // namespace

Batch make_batch(std::span<const Transition* const> transitions) {
  if (transitions.empty()) throw ContractViolation("make_batch: empty batch");
  const std::size_t n = transitions.size();
  std::vector<const obs::Observation*> now(n), next(n);
  std::vector<float> action(n * 3), reward(n), not_done(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = *transitions[i];
    now[i] = &t.obs;
    next[i] = &t.next_obs;
    std::copy(t.action.begin(), t.action.end(), action.begin() + static_cast<std::ptrdiff_t>(3 * i));
    reward[i] = t.reward;
    not_done[i] = t.done ? 0.0f : 1.0f;
  }
  nets::ObsTensors a = nets::to_tensors(now);
  nets::ObsTensors b = nets::to_tensors(next);
  return {a.stack,
          a.state,
          Tensor::from_values({n, 3}, std::move(action)),
          Tensor::from_values({n, 1}, std::move(reward)),
          b.stack,
          b.state,
          Tensor::from_values({n, 1}, std::move(not_done))};
}

Tensor gaussian_noise(std::size_t n, Rng& rng) {
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::vector<float> v(n * 3);
  for (float& x : v) x = normal(rng);
  return Tensor::from_values({n, 3}, std::move(v));
}

Tensor critic_loss(const nets::SacNetworks& nets, const Batch& b, const Tensor& next_noise, double gamma) {
  Tensor y;
  {
    ad::NoGradGuard no_grad;
    const nets::ActionSample next = nets.sample_action(nets.encode(b.next_obs), b.next_state, next_noise);
    const auto [t1, t2] = nets.target_q_values(nets.encode_target(b.next_obs), b.next_state, next.squashed);
    const Tensor soft_value = ad::sub(ad::minimum(t1, t2), ad::scale(next.log_prob, nets.alpha()));
    y = ad::add(b.reward, ad::mul(b.not_done, ad::scale(soft_value, static_cast<float>(gamma))));
  }
  const auto [q1, q2] = nets.q_values(nets.encode(b.obs), b.state, b.action);
  return ad::add(ad::mean(ad::square(ad::sub(q1, y))), ad::mean(ad::square(ad::sub(q2, y))));
}

ActorLoss actor_loss(const nets::SacNetworks& nets, const Batch& b, const Tensor& noise) {
  Tensor latent;
  {
    ad::NoGradGuard no_grad;
    latent = nets.encode(b.obs);
  }
  const nets::ActionSample sample = nets.sample_action(latent, b.state, noise);
  const auto [q1, q2] = nets.q_values(latent, b.state, sample.squashed);
  const Tensor loss = ad::mean(ad::sub(ad::scale(sample.log_prob, nets.alpha()), ad::minimum(q1, q2)));
  return {loss, sample.log_prob};
}

Tensor alpha_loss(const nets::SacNetworks& nets, const Tensor& log_prob, double target_entropy) {
  std::vector<float> bracket(log_prob.numel());
  const auto lp = log_prob.values();
  for (std::size_t i = 0; i < bracket.size(); ++i) {
    bracket[i] = static_cast<float>(-static_cast<double>(lp[i]) - target_entropy);
  }
  const Tensor fixed = Tensor::from_values(log_prob.shape(), std::move(bracket));
  return ad::mean(ad::mul_scalar(fixed, ad::exp(nets.log_alpha())));
}

Tensor autoencoder_loss(const nets::SacNetworks& nets, const Batch& b, double lambda_z, double lambda_theta) {
  const Tensor z = nets.encode(b.obs);
  const Tensor reconstruction = nets.decode(z);
  const Tensor mse = ad::mean(ad::square(ad::sub(reconstruction, b.obs)));
  const Tensor latent_penalty = ad::scale(ad::sum(ad::square(z)), 1.0f / static_cast<float>(z.dim(0)));
  Tensor weight_penalty;
  for (const Tensor& w : nets.decoder().weights()) {
    const Tensor s = ad::sum(ad::square(w));
    weight_penalty = weight_penalty.defined() ? ad::add(weight_penalty, s) : s;
  }
  return ad::add(ad::add(mse, ad::scale(latent_penalty, static_cast<float>(lambda_z))),
                 ad::scale(weight_penalty, static_cast<float>(lambda_theta)));
}

SacAgent::SacAgent(const nets::NetConfig& net, const SacHyper& hyper, std::uint64_t seed)
    : hyper_(hyper), nets_(std::make_unique<nets::SacNetworks>(net, seed)) {
  hyper_.validate();
  const auto encoder = tensors_of(nets_->encoder_params());
  critic_opt_ = std::make_unique<ad::Adam>(concat(tensors_of(nets_->critic_params()), encoder),
                                           ad::AdamOptions{hyper_.critic_lr});
  actor_opt_ = std::make_unique<ad::Adam>(tensors_of(nets_->actor_params()), ad::AdamOptions{hyper_.actor_lr});
  ae_opt_ = std::make_unique<ad::Adam>(concat(encoder, tensors_of(nets_->decoder_params())),
                                       ad::AdamOptions{hyper_.ae_lr});
  alpha_opt_ = std::make_unique<ad::Adam>(std::vector<Tensor>{nets_->log_alpha()}, ad::AdamOptions{hyper_.alpha_lr});
}

void SacAgent::zero_all() {
  critic_opt_->zero_grad();
  actor_opt_->zero_grad();
  ae_opt_->zero_grad();
  alpha_opt_->zero_grad();
}

float SacAgent::critic_update(const Batch& batch, const Tensor& next_noise) {
  zero_all();
  const Tensor loss = critic_loss(*nets_, batch, next_noise, hyper_.gamma);
  ad::backward(loss);
  critic_opt_->step();
  return loss.item();
}

ActorStep SacAgent::actor_update(const Batch& batch, const Tensor& noise) {
  zero_all();
  const ActorLoss terms = actor_loss(*nets_, batch, noise);
  ad::backward(terms.loss);
  actor_opt_->step();

  zero_all();
  const Tensor log_prob = terms.log_prob.detach();
  const Tensor a_loss = alpha_loss(*nets_, log_prob, hyper_.target_entropy);
  ad::backward(a_loss);
  alpha_opt_->step();

  double entropy = 0.0;
  for (const float v : log_prob.values()) entropy -= v;
  return {terms.loss.item(), a_loss.item(), static_cast<float>(entropy / static_cast<double>(log_prob.numel()))};
}

float SacAgent::autoencoder_update(const Batch& batch) {
  zero_all();
  const Tensor loss = autoencoder_loss(*nets_, batch, hyper_.lambda_z, hyper_.lambda_theta);
  ad::backward(loss);
  ae_opt_->step();
  return loss.item();
}

void SacAgent::soft_update_targets() {
  nets_->soft_update_critic_target(hyper_.tau_q);
  nets_->soft_update_encoder_target(hyper_.tau_enc);
}

SacAgent::IterationLosses SacAgent::update(const Batch& batch, Rng& noise_rng) {
  const std::int64_t step = iterations_++;
  IterationLosses out;
  out.critic = critic_update(batch, gaussian_noise(batch.size(), noise_rng));
  if (step % hyper_.actor_update_freq == 0) {
    out.actor = actor_update(batch, gaussian_noise(batch.size(), noise_rng)).actor_loss;
    out.actor_ran = true;
  }
  if (step % hyper_.critic_target_update_freq == 0) soft_update_targets();
  out.autoencoder = autoencoder_update(batch);
  return out;
}

void SacAgent::save(const std::filesystem::path& dir) const {
  nets_->save(dir);
  std::vector<ad::NamedTensor> moments;
  const std::pair<const char*, const ad::Adam*> opts[] = {
      {"critic", critic_opt_.get()}, {"actor", actor_opt_.get()}, {"ae", ae_opt_.get()}, {"alpha", alpha_opt_.get()}};
  std::ostringstream counters;
  counters << "iterations = " << iterations_ << '\n';
  for (const auto& [name, opt] : opts) {
    const ad::AdamState& st = opt->state();
    for (std::size_t i = 0; i < st.moments.size(); ++i) {
      const ad::Shape shape = opt->params()[i].shape();
      const std::string base = std::string(name) + "." + std::to_string(i);
      moments.push_back({base + ".m", Tensor::from_values(shape, st.moments[i].first)});
      moments.push_back({base + ".v", Tensor::from_values(shape, st.moments[i].second)});
    }
    counters << name << "_steps = " << st.step_count << '\n';
  }
  ad::save_tensors(dir / kOptimizerFile, moments);
  std::ofstream out(dir / kCountersFile, std::ios::trunc);
  out << counters.str();
  if (!out) throw CheckpointError("cannot write " + (dir / kCountersFile).string());
}

void SacAgent::load(const std::filesystem::path& dir) {
  nets_->load(dir);
  const std::vector<ad::StoredTensor> stored = ad::read_tensors(dir / kOptimizerFile);
  std::ifstream in(dir / kCountersFile);
  if (!in) throw CheckpointError("missing " + (dir / kCountersFile).string());
  std::ostringstream text;
  text << in.rdbuf();
  std::map<std::string, long long> counters;
  for (const IniEntry& e : parse_ini(text.str())) counters[e.key] = parse_int(e);

  std::size_t cursor = 0;
  const std::pair<const char*, ad::Adam*> opts[] = {
      {"critic", critic_opt_.get()}, {"actor", actor_opt_.get()}, {"ae", ae_opt_.get()}, {"alpha", alpha_opt_.get()}};
  for (const auto& [name, opt] : opts) {
    ad::AdamState& st = opt->mutable_state();
    for (std::size_t i = 0; i < st.moments.size(); ++i) {
      const std::string base = std::string(name) + "." + std::to_string(i);
      for (std::vector<float>* dst : {&st.moments[i].first, &st.moments[i].second}) {
        if (cursor >= stored.size()) throw CheckpointError("optimizer checkpoint is missing entries");
        const ad::StoredTensor& s = stored[cursor++];
        const std::string expected = base + (dst == &st.moments[i].first ? ".m" : ".v");
        if (s.name != expected || s.values.size() != dst->size()) {
          throw CheckpointError("optimizer checkpoint: unexpected entry '" + s.name + "'");
        }
        *dst = s.values;
      }
    }
    const auto it = counters.find(std::string(name) + "_steps");
    if (it == counters.end()) throw CheckpointError(std::string("agent state lacks ") + name + "_steps");
    st.step_count = it->second;
  }
  if (cursor != stored.size()) throw CheckpointError("optimizer checkpoint has extra entries");
  const auto it = counters.find("iterations");
  if (it == counters.end()) throw CheckpointError("agent state lacks iterations");
  iterations_ = it->second;
}

}  // namespace uavnav::train
