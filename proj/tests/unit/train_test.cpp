#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "../support/composite_check.h"
#include "../support/fixtures.h"
#include "../support/reference_nets.h"
#include "uavnav/ad/ops.h"
#include "uavnav/common/errors.h"
#include "uavnav/sim/scenario.h"
#include "uavnav/train/config.h"
#include "uavnav/train/replay_buffer.h"
#include "uavnav/train/rollout.h"
#include "uavnav/train/sac.h"
#include "uavnav/train/trainer.h"

namespace uavnav::train {
namespace {

namespace fs = std::filesystem;
using ad::Tensor;

Transition tagged(int tag) {
  Transition t;
  t.reward = static_cast<float>(tag);
  return t;
}

// ---------------------------------------------------------------- replay

TEST(ReplayBuffer, EvictsOldestFirst) {
  ReplayBuffer buf(20000);
  for (int i = 0; i < 20001; ++i) buf.push(tagged(i));
  EXPECT_EQ(buf.size(), 20000u);
  EXPECT_EQ(buf.total_inserted(), 20001u);
  EXPECT_EQ(buf.at(0).reward, 1.0f);
  EXPECT_EQ(buf.at(19999).reward, 20000.0f);
  for (std::size_t i = 0; i < buf.size(); i += 997) EXPECT_EQ(buf.at(i).reward, static_cast<float>(i + 1));
}

TEST(ReplayBuffer, WrapsRepeatedly) {
  ReplayBuffer buf(7);
  for (int i = 0; i < 53; ++i) buf.push(tagged(i));
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(buf.at(i).reward, static_cast<float>(46 + i));
}

TEST(ReplayBuffer, SamplesOnlyStoredTransitionsWithoutRepeats) {
  ReplayBuffer buf(50);
  for (int i = 0; i < 30; ++i) buf.push(tagged(100 + i));
  Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto batch = buf.sample(30, rng);
    std::set<float> tags;
    for (const Transition* t : batch) {
      EXPECT_GE(t->reward, 100.0f);
      EXPECT_LT(t->reward, 130.0f);
      tags.insert(t->reward);
    }
    EXPECT_EQ(tags.size(), 30u);
  }
  EXPECT_THROW(buf.sample(31, rng), ContractViolation);
  EXPECT_THROW(buf.at(30), ContractViolation);
  EXPECT_THROW(ReplayBuffer(0), ContractViolation);
}

TEST(ReplayBuffer, DrawsAreUniform) {
  ReplayBuffer buf(100);
  for (int i = 0; i < 250; ++i) buf.push(tagged(i));
  Rng rng(11);
  std::vector<int> hits(100, 0);
  for (int draw = 0; draw < 10000; ++draw) {
    const auto idx = buf.sample_indices(10, rng);
    std::set<std::size_t> unique(idx.begin(), idx.end());
    ASSERT_EQ(unique.size(), 10u);
    for (const std::size_t i : idx) {
      ASSERT_LT(i, 100u);
      ++hits[i];
    }
  }
  // 1e5 draws, 1000 expected per slot; chi-square with 99 dof, p ~ 1e-4 cut.
  double chi2 = 0.0;
  for (const int h : hits) chi2 += (h - 1000.0) * (h - 1000.0) / 1000.0;
  EXPECT_LT(chi2, 160.0);
  EXPECT_GT(*std::min_element(hits.begin(), hits.end()), 0);
}

// ---------------------------------------------------------------- rollouts

class ConstantPolicy : public Policy {
 public:
  explicit ConstantPolicy(std::array<float, 3> a) : a_(a) {}
  std::array<float, 3> act(const obs::Observation&, Rng&) override { return a_; }

 private:
  std::array<float, 3> a_;
};

EnvConfig small_env(int t_max) {
  EnvConfig env;
  env.camera.width = 16;
  env.camera.height = 16;
  env.t_max = t_max;
  return env;
}

sim::WorldState open_sky() {
  sim::WorldState w;
  w.workspace = {sim::Vec3(-500, -500, 0), sim::Vec3(500, 500, 500)};
  return w;
}

sim::UavState uav_at(const sim::Vec3& p, const sim::Vec3& goal) {
  sim::UavState u;
  u.position = p;
  u.goal = goal;
  u.yaw = std::atan2(goal.y() - p.y(), goal.x() - p.x());
  return u;
}

// Squashed action for forward = 1 m/s, no climb, no turn.
constexpr std::array<float, 3> kCruise{0.0f, 0.0f, 0.0f};

TEST(CollectEpisode, ImmediateArrival) {
  sim::WorldState w = open_sky();
  w.uavs.push_back(uav_at({0, 0, 100}, {0.6, 0, 100}));
  StraightLinePolicy policy(0.1);
  Rng rng(1);
  std::vector<Transition> out;
  const EpisodeStats s = collect_episode(w, policy, small_env(50), rng, [&](Transition&& t) { out.push_back(t); });
  EXPECT_EQ(s.steps, 1);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(s.status[0], sim::UavStatus::Arrived);
  EXPECT_FLOAT_EQ(out[0].reward, 50.0f);
  EXPECT_TRUE(out[0].done);
  EXPECT_DOUBLE_EQ(s.total_reward[0], 50.0);
  EXPECT_NEAR(s.path_length[0], 0.2, 1e-12);
}

TEST(CollectEpisode, TouchingPairCollidesTogether) {
  sim::WorldState w = open_sky();
  w.uavs.push_back(uav_at({0, 0, 100}, {100, 0, 100}));
  w.uavs.push_back(uav_at({0, 0.9, 100}, {100, 0.9, 100}));
  ConstantPolicy policy(kCruise);
  Rng rng(1);
  std::vector<Transition> out;
  const EpisodeStats s = collect_episode(w, policy, small_env(50), rng, [&](Transition&& t) { out.push_back(t); });
  EXPECT_EQ(s.steps, 1);
  ASSERT_EQ(out.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(s.status[i], sim::UavStatus::Collided);
    EXPECT_TRUE(out[i].done);
    // -10 for contact plus 3 * 0.1 m of progress.
    EXPECT_NEAR(out[i].reward, -10.0 + 0.3, 1e-5);
  }
}

TEST(CollectEpisode, TimeoutIsNotTerminalForBootstrapping) {
  sim::WorldState w = open_sky();
  w.uavs.push_back(uav_at({0, 0, 100}, {100, 0, 100}));
  ConstantPolicy policy(kCruise);
  Rng rng(1);
  std::vector<Transition> out;
  const EpisodeStats s = collect_episode(w, policy, small_env(3), rng, [&](Transition&& t) { out.push_back(t); });
  EXPECT_EQ(s.steps, 3);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(s.status[0], sim::UavStatus::TimedOut);
  for (const Transition& t : out) {
    EXPECT_FALSE(t.done);
    EXPECT_NEAR(t.reward, 0.3, 1e-5);
  }
}

TEST(CollectEpisode, NextObservationContinuesTheStack) {
  sim::WorldState w = open_sky();
  w.uavs.push_back(uav_at({0, 0, 100}, {100, 0, 100}));
  ConstantPolicy policy(kCruise);
  Rng rng(1);
  std::vector<Transition> out;
  collect_episode(w, policy, small_env(4), rng, [&](Transition&& t) { out.push_back(t); });
  ASSERT_EQ(out.size(), 4u);
  for (std::size_t k = 0; k + 1 < out.size(); ++k) {
    for (std::size_t f = 0; f < 3; ++f) EXPECT_EQ(out[k].next_obs.frames[f], out[k + 1].obs.frames[f]);
    EXPECT_NEAR((out[k].next_obs.rel_goal - out[k + 1].obs.rel_goal).norm(), 0.0, 1e-12);
  }
}

TEST(CollectEpisode, BufferHoldsOneTransitionPerActiveStep) {
  sim::ScenarioSpec spec;
  spec.n_uavs = 4;
  spec.density = 0.01;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    spec.seed = seed;
    UniformPolicy policy;
    Rng rng(seed);
    ReplayBuffer buf(1000);
    const EpisodeStats s =
        collect_episode(sim::generate_scenario(spec), policy, small_env(50), rng, [&](Transition&& t) { buf.push(t); });
    const int active = std::accumulate(s.active_steps.begin(), s.active_steps.end(), 0);
    EXPECT_EQ(buf.size(), static_cast<std::size_t>(active));
    EXPECT_LE(buf.size(), 200u);
    EXPECT_LE(s.steps, 50);
    for (const auto st : s.status) EXPECT_TRUE(sim::is_terminal(st));
  }
}

// ---------------------------------------------------------------- losses

struct LossFixture {
  nets::NetConfig config = composite::small_config();
  nets::SacNetworks nets{config, 5};
  std::mt19937_64 rng{17};
  Batch batch = fixtures::random_batch(config, 2, rng, 0.5f);
  Tensor noise = fixtures::uniform(rng, {2, 3}, -1.5f, 1.5f);

  LossFixture() {
    // Move the targets away from the online copies so their roles are tested.
    for (const auto& p : nets.target_critic_params()) {
      for (float& v : Tensor(p.tensor).mutable_values()) v *= 0.9f;
    }
    for (const auto& p : nets.target_encoder_params()) {
      for (float& v : Tensor(p.tensor).mutable_values()) v *= 1.05f;
    }
  }

  reference::Params online() const {
    reference::Params p = reference::from(nets.encoder_params());
    p = reference::merge(p, reference::from(nets.critic_params()));
    p = reference::merge(p, reference::from(nets.actor_params()));
    return reference::merge(p, reference::from(nets.decoder_params()));
  }
  reference::Params target() const {
    return reference::merge(reference::from(nets.target_encoder_params()), reference::from(nets.target_critic_params()));
  }

  struct Policy {
    reference::Vec action;
    double log_prob;
  };
  Policy policy(const reference::Params& p, const reference::Vec& z, const reference::Vec& state,
                std::size_t row) const {
    const reference::Head head = reference::actor(p, z, state, config.log_std_min, config.log_std_max);
    const reference::Vec eps = reference::rows(noise, row);
    reference::Vec raw(3), action(3);
    for (int j = 0; j < 3; ++j) {
      raw[j] = head.mean[j] + std::exp(head.log_std[j]) * eps[j];
      action[j] = std::tanh(raw[j]);
    }
    return {action, reference::squashed_log_prob(raw, head)};
  }
  reference::Vec encode(const reference::Params& p, const Tensor& stack, std::size_t row) const {
    return reference::encode(p, reference::rows(stack, row), config.image_height, config.image_width);
  }
};

void expect_close(double actual, double expected) {
  EXPECT_NEAR(actual, expected, 1e-5 * std::max(1.0, std::abs(expected))) << "reference " << expected;
}

TEST(Losses, CriticMatchesReference) {
  LossFixture f;
  const double gamma = 0.99;
  const reference::Params on = f.online(), tg = f.target();
  const double alpha = f.nets.alpha();
  double loss = 0.0;
  for (std::size_t b = 0; b < 2; ++b) {
    const reference::Vec next_state = reference::rows(f.batch.next_state, b);
    const auto next = f.policy(on, f.encode(on, f.batch.next_obs, b), next_state, b);
    const reference::Vec tin = reference::concat(reference::concat(f.encode(tg, f.batch.next_obs, b), next_state), next.action);
    const double soft = std::min(reference::mlp(tg, "critic.q1", tin)[0], reference::mlp(tg, "critic.q2", tin)[0]) -
                        alpha * next.log_prob;
    const double y = f.batch.reward.values()[b] + gamma * f.batch.not_done.values()[b] * soft;
    const reference::Vec in = reference::concat(
        reference::concat(f.encode(on, f.batch.obs, b), reference::rows(f.batch.state, b)), reference::rows(f.batch.action, b));
    const double q1 = reference::mlp(on, "critic.q1", in)[0], q2 = reference::mlp(on, "critic.q2", in)[0];
    loss += ((q1 - y) * (q1 - y) + (q2 - y) * (q2 - y)) / 2.0;
  }
  expect_close(critic_loss(f.nets, f.batch, f.noise, gamma).item(), loss);
}

TEST(Losses, ActorAndTemperatureMatchReference) {
  LossFixture f;
  const reference::Params on = f.online();
  const double alpha = f.nets.alpha();
  double loss = 0.0, temperature = 0.0;
  std::vector<double> lps;
  for (std::size_t b = 0; b < 2; ++b) {
    const reference::Vec z = f.encode(on, f.batch.obs, b), state = reference::rows(f.batch.state, b);
    const auto pi = f.policy(on, z, state, b);
    const reference::Vec in = reference::concat(reference::concat(z, state), pi.action);
    const double q = std::min(reference::mlp(on, "critic.q1", in)[0], reference::mlp(on, "critic.q2", in)[0]);
    loss += (alpha * pi.log_prob - q) / 2.0;
    temperature += alpha * (-pi.log_prob - -3.0) / 2.0;
    lps.push_back(pi.log_prob);
  }
  const ActorLoss terms = actor_loss(f.nets, f.batch, f.noise);
  expect_close(terms.loss.item(), loss);
  for (std::size_t b = 0; b < 2; ++b) expect_close(terms.log_prob.values()[b], lps[b]);
  expect_close(alpha_loss(f.nets, terms.log_prob, -3.0).item(), temperature);
}

TEST(Losses, AutoencoderMatchesReference) {
  LossFixture f;
  const reference::Params on = f.online();
  const double lz = 0.1, lt = 0.01;
  const std::size_t pad = (f.config.image_height - 3) % 2;
  const std::size_t pixels = 3 * f.config.image_height * f.config.image_width;
  double mse = 0.0, latent = 0.0, weights = 0.0;
  for (std::size_t b = 0; b < 2; ++b) {
    reference::ConvGeometry g;
    const reference::Vec x = reference::rows(f.batch.obs, b);
    const reference::Vec z = reference::encode(on, x, f.config.image_height, f.config.image_width, nullptr, &g);
    const reference::Vec rec = reference::decode(on, z, g, pad);
    ASSERT_EQ(rec.size(), pixels);
    for (std::size_t i = 0; i < pixels; ++i) mse += (rec[i] - x[i]) * (rec[i] - x[i]) / (2.0 * pixels);
    for (const double v : z) latent += v * v / 2.0;
  }
  for (const auto& [name, p] : on) {
    if (name.rfind("decoder.", 0) != 0) continue;
    if (!name.ends_with(".weight") && !name.ends_with(".kernels")) continue;
    for (const double v : p.v) weights += v * v;
  }
  expect_close(autoencoder_loss(f.nets, f.batch, lz, lt).item(), mse + lz * latent + lt * weights);
  expect_close(autoencoder_loss(f.nets, f.batch, 0.0, 0.0).item(), mse);
}

// Gradient of the actor loss with respect to every actor parameter, against
// five-point central differences of the double reference. Stencils that
// flip a ReLU (actor or critic) or swap the min(Q1, Q2) branch are skipped.
TEST(Losses, ActorGradientMatchesReference) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    LossFixture f;
    f.nets = nets::SacNetworks(f.config, 40 + seed);
    for (const auto& p : f.nets.actor_params()) Tensor(p.tensor).zero_grad();
    const ActorLoss terms = actor_loss(f.nets, f.batch, f.noise);
    ad::backward(terms.loss);

    reference::Params on = f.online();
    const double alpha = f.nets.alpha();
    std::vector<reference::Vec> latents;
    for (std::size_t b = 0; b < 2; ++b) latents.push_back(f.encode(on, f.batch.obs, b));
    auto loss = [&](std::vector<bool>& branches) {
      double acc = 0.0;
      for (std::size_t b = 0; b < 2; ++b) {
        const reference::Vec state = reference::rows(f.batch.state, b);
        reference::mlp(on, "actor", reference::concat(latents[b], state), &branches);
        const auto pi = f.policy(on, latents[b], state, b);
        const reference::Vec in = reference::concat(reference::concat(latents[b], state), pi.action);
        const double q1 = reference::mlp(on, "critic.q1", in, &branches)[0];
        const double q2 = reference::mlp(on, "critic.q2", in, &branches)[0];
        branches.push_back(q1 < q2);
        acc += (alpha * pi.log_prob - std::min(q1, q2)) / 2.0;
      }
      return acc;
    };
    std::vector<bool> base;
    expect_close(terms.loss.item(), loss(base));

    const double h = 1e-4;
    std::size_t checked = 0, skipped = 0;
    for (const auto& p : f.nets.actor_params()) {
      reference::Param& rp = on[p.name];
      const auto g = p.tensor.grad();
      double diff = 0.0, norm = 0.0;
      for (std::size_t i = 0; i < rp.v.size(); ++i) {
        const double saved = rp.v[i];
        double vals[4];
        bool kink = false;
        const double offsets[4] = {-2 * h, -h, h, 2 * h};
        for (int s = 0; s < 4; ++s) {
          std::vector<bool> branches;
          rp.v[i] = saved + offsets[s];
          vals[s] = loss(branches);
          kink = kink || branches != base;
        }
        rp.v[i] = saved;
        if (kink) {
          ++skipped;
          continue;
        }
        ++checked;
        const double numeric = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h);
        diff += (numeric - g[i]) * (numeric - g[i]);
        norm += numeric * numeric;
      }
      EXPECT_LT(std::sqrt(diff), 1e-3 * std::max(std::sqrt(norm), 1e-3)) << p.name << " seed " << seed;
    }
    EXPECT_GT(checked, 10 * skipped);
  }
}

TEST(Losses, TerminalTargetIsTheReward) {
  LossFixture f;
  f.batch.not_done = Tensor::from_values({2, 1}, {0.0f, 0.0f});
  const auto [q1, q2] = f.nets.q_values(f.nets.encode(f.batch.obs), f.batch.state, f.batch.action);
  double expected = 0.0;
  for (std::size_t b = 0; b < 2; ++b) {
    const double r = f.batch.reward.values()[b];
    expected += (std::pow(q1.values()[b] - r, 2) + std::pow(q2.values()[b] - r, 2)) / 2.0;
  }
  expect_close(critic_loss(f.nets, f.batch, f.noise, 0.99).item(), expected);
  f.batch.not_done = Tensor::from_values({2, 1}, {1.0f, 1.0f});
  expect_close(critic_loss(f.nets, f.batch, f.noise, 0.0).item(), expected);
}

// ---------------------------------------------------------------- updates

SacHyper small_hyper() {
  SacHyper h;
  h.batch_size = 8;
  return h;
}

std::size_t hash_params(const nets::ParamList& params) {
  std::size_t h = 1469598103934665603ull;
  for (const float v : fixtures::flatten(params)) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    h = (h ^ bits) * 1099511628211ull;
  }
  return h;
}

TEST(SacAgent, CriticLossFallsOnFixedBatch) {
  const nets::NetConfig c = fixtures::tiny_net();
  SacAgent agent(c, small_hyper(), 2);
  std::mt19937_64 rng(4);
  const Batch batch = fixtures::random_batch(c, 16, rng);
  const Tensor noise = fixtures::uniform(rng, {16, 3}, -1.0f, 1.0f);
  std::vector<float> losses;
  for (int i = 0; i <= 10; ++i) losses.push_back(agent.critic_update(batch, noise));
  int falls = 0;
  for (int i = 0; i < 10; ++i) falls += losses[i + 1] < losses[i];
  EXPECT_GE(falls, 8);
  EXPECT_LT(losses.back(), losses.front());
}

TEST(SacAgent, FlatCriticRaisesEntropy) {
  const nets::NetConfig c = fixtures::tiny_net();
  SacAgent agent(c, small_hyper(), 2);
  for (const auto& p : agent.networks().critic_params()) {
    if (p.name.find(".fc2.") != std::string::npos) {
      for (float& v : Tensor(p.tensor).mutable_values()) v = 0.0f;
    }
  }
  std::mt19937_64 rng(8);
  const Batch batch = fixtures::random_batch(c, 16, rng);
  auto mean_log_std = [&] {
    ad::NoGradGuard g;
    const auto head = agent.networks().actor().forward(
        ad::concat_cols({agent.networks().encode(batch.obs), batch.state}));
    const auto v = head.log_std.values();
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  const double before = mean_log_std();
  Rng noise_rng(1);
  for (int i = 0; i < 50; ++i) agent.actor_update(batch, gaussian_noise(16, noise_rng));
  EXPECT_GT(mean_log_std(), before + 0.1);
}

TEST(SacAgent, ActorStepLeavesEncoderAndCriticUntouched) {
  const nets::NetConfig c = fixtures::tiny_net();
  SacAgent agent(c, small_hyper(), 3);
  std::mt19937_64 rng(5);
  const Batch batch = fixtures::random_batch(c, 8, rng);
  const Tensor noise = fixtures::uniform(rng, {8, 3}, -1.0f, 1.0f);
  const auto encoder = fixtures::flatten(agent.networks().encoder_params());
  const auto critic = fixtures::flatten(agent.networks().critic_params());
  const auto actor = fixtures::flatten(agent.networks().actor_params());
  agent.actor_update(batch, noise);
  EXPECT_EQ(fixtures::flatten(agent.networks().encoder_params()), encoder);
  EXPECT_EQ(fixtures::flatten(agent.networks().critic_params()), critic);
  EXPECT_NE(fixtures::flatten(agent.networks().actor_params()), actor);

  agent.critic_update(batch, noise);
  EXPECT_NE(fixtures::flatten(agent.networks().encoder_params()), encoder);
  EXPECT_NE(fixtures::flatten(agent.networks().critic_params()), critic);
}

TEST(SacAgent, TargetsMoveOnlyThroughSoftUpdates) {
  const nets::NetConfig c = fixtures::tiny_net();
  SacAgent agent(c, small_hyper(), 4);
  std::mt19937_64 rng(6);
  const Batch batch = fixtures::random_batch(c, 8, rng);
  const Tensor noise = fixtures::uniform(rng, {8, 3}, -1.0f, 1.0f);
  auto targets = [&] {
    return hash_params(agent.networks().target_encoder_params()) * 31 +
           hash_params(agent.networks().target_critic_params());
  };
  const std::size_t start = targets();
  agent.critic_update(batch, noise);
  agent.actor_update(batch, noise);
  agent.autoencoder_update(batch);
  EXPECT_EQ(targets(), start);
  agent.soft_update_targets();
  EXPECT_NE(targets(), start);
}

TEST(SacAgent, ScheduleFollowsFrequencies) {
  const nets::NetConfig c = fixtures::tiny_net();
  SacAgent agent(c, small_hyper(), 4);
  std::mt19937_64 rng(6);
  const Batch batch = fixtures::random_batch(c, 8, rng);
  Rng noise(2);
  std::vector<bool> ran;
  std::vector<std::size_t> target_hash;
  for (int i = 0; i < 4; ++i) {
    ran.push_back(agent.update(batch, noise).actor_ran);
    target_hash.push_back(hash_params(agent.networks().target_critic_params()));
  }
  EXPECT_EQ(ran, (std::vector<bool>{true, false, true, false}));
  EXPECT_EQ(target_hash[1], target_hash[0]);
  EXPECT_NE(target_hash[2], target_hash[1]);
  EXPECT_EQ(target_hash[3], target_hash[2]);
  EXPECT_EQ(agent.iterations(), 4);
}

TEST(SacAgent, UpdatesAreDeterministic) {
  const nets::NetConfig c = fixtures::tiny_net();
  auto run = [&] {
    SacAgent agent(c, small_hyper(), 9);
    std::mt19937_64 rng(10);
    Rng noise(3);
    for (int i = 0; i < 3; ++i) agent.update(fixtures::random_batch(c, 8, rng), noise);
    auto all = fixtures::flatten(agent.networks().encoder_params());
    for (const auto& list : {agent.networks().actor_params(), agent.networks().critic_params(),
                             agent.networks().decoder_params(), agent.networks().target_critic_params()}) {
      const auto v = fixtures::flatten(list);
      all.insert(all.end(), v.begin(), v.end());
    }
    all.push_back(agent.networks().log_alpha().item());
    return all;
  };
  EXPECT_EQ(run(), run());
}

TEST(SacAgent, SaveLoadResumesBitwise) {
  const fs::path dir = fs::temp_directory_path() / "uavnav_agent_ckpt";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const nets::NetConfig c = fixtures::tiny_net();
  std::mt19937_64 rng(12);
  Rng noise(5);
  SacAgent a(c, small_hyper(), 1);
  for (int i = 0; i < 3; ++i) a.update(fixtures::random_batch(c, 8, rng), noise);
  a.save(dir);

  SacAgent b(c, small_hyper(), 999);
  b.load(dir);
  EXPECT_EQ(b.iterations(), 3);
  const Batch batch = fixtures::random_batch(c, 8, rng);
  Rng na(77), nb(77);
  a.update(batch, na);
  b.update(batch, nb);
  for (const auto& [pa, pb] : {std::pair{a.networks().encoder_params(), b.networks().encoder_params()},
                               std::pair{a.networks().actor_params(), b.networks().actor_params()},
                               std::pair{a.networks().critic_params(), b.networks().critic_params()},
                               std::pair{a.networks().decoder_params(), b.networks().decoder_params()},
                               std::pair{a.networks().target_encoder_params(), b.networks().target_encoder_params()}}) {
    EXPECT_EQ(fixtures::flatten(pa), fixtures::flatten(pb));
  }
  EXPECT_EQ(a.networks().log_alpha().item(), b.networks().log_alpha().item());
  fs::remove_all(dir);
}

// ---------------------------------------------------------------- trainer

TrainConfig quick_config() {
  TrainConfig c;
  c.scenario.n_uavs = 2;
  c.scenario.density = 0.01;
  c.env = small_env(20);
  c.net.filters = 8;
  c.net.latent_dim = 16;
  c.net.hidden = 32;
  c.sac.batch_size = 8;
  c.max_episodes = 2;
  c.update_times = 3;
  c.warmup_transitions = 10;
  c.buffer_capacity = 500;
  c.checkpoint_every = 0;
  c.seed = 21;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Trainer, NoUpdateRunStillCheckpoints) {
  const fs::path out = fs::temp_directory_path() / "uavnav_trainer_noupdate";
  fs::remove_all(out);
  TrainConfig c = quick_config();
  c.max_episodes = 1;
  c.update_times = 0;
  Trainer trainer(c, out);
  const TrainResult r = trainer.run();
  EXPECT_EQ(r.episodes_run, 1);
  EXPECT_EQ(r.total_env_steps, trainer.buffer().size());
  for (const char* f : {nets::checkpoint_files::kEncoder, nets::checkpoint_files::kActor, kOptimizerFile,
                        output_files::kConfigEcho, output_files::kProgress}) {
    EXPECT_TRUE(fs::exists(r.final_checkpoint / f)) << f;
  }
  std::istringstream metrics(slurp(out / output_files::kMetrics));
  std::string header, row;
  std::getline(metrics, header);
  std::getline(metrics, row);
  EXPECT_EQ(header, kMetricsHeader);
  EXPECT_EQ(row.rfind("1,", 0), 0u);
  EXPECT_NE(row.find(",nan,nan,nan,"), std::string::npos) << row;

  const auto nets = load_networks(r.final_checkpoint);
  EXPECT_EQ(fixtures::flatten(nets->actor_params()), fixtures::flatten(trainer.agent().networks().actor_params()));
  fs::remove_all(out);
}

TEST(Trainer, MetricsRowFormatting) {
  EpisodeLog log{3, 420, -1.5, 0.25, std::nan(""), 1e-3, 0.1};
  EXPECT_EQ(format_metrics_row(log), "3,420,-1.5,0.25,nan,0.001,0.1");
}

TEST(Trainer, SeededRunsAreIdentical) {
  const fs::path a = fs::temp_directory_path() / "uavnav_trainer_a";
  const fs::path b = fs::temp_directory_path() / "uavnav_trainer_b";
  fs::remove_all(a);
  fs::remove_all(b);
  Trainer(quick_config(), a).run();
  Trainer(quick_config(), b).run();
  EXPECT_EQ(slurp(a / output_files::kMetrics), slurp(b / output_files::kMetrics));
  for (const auto& entry : fs::directory_iterator(a / output_files::kCheckpoints / output_files::kFinal)) {
    const fs::path other = b / output_files::kCheckpoints / output_files::kFinal / entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Trainer, ResumeContinuesEpisodeCount) {
  const fs::path out = fs::temp_directory_path() / "uavnav_trainer_resume";
  fs::remove_all(out);
  TrainConfig c = quick_config();
  c.max_episodes = 1;
  const TrainResult first = Trainer(c, out).run();
  c.max_episodes = 2;
  Trainer again(c, out);
  again.resume_from(first.final_checkpoint);
  std::vector<int> episodes;
  again.run([&](const EpisodeLog& log) { episodes.push_back(log.episode); });
  EXPECT_EQ(episodes, std::vector<int>{2});
  std::istringstream metrics(slurp(out / output_files::kMetrics));
  std::string line;
  int lines = 0;
  while (std::getline(metrics, line)) ++lines;
  EXPECT_EQ(lines, 3);
  fs::remove_all(out);
}

TEST(TrainConfigText, RoundTrips) {
  TrainConfig c = quick_config();
  c.sac.gamma = 0.95;
  c.env.reward.w_goal = 2.5;
  c.scenario.kind = sim::ScenarioKind::Circle;
  const std::string text = format_train_config(c);
  const TrainConfig back = parse_train_config(text);
  EXPECT_EQ(format_train_config(back), text);
  EXPECT_DOUBLE_EQ(back.sac.gamma, 0.95);
  EXPECT_DOUBLE_EQ(back.env.reward.w_goal, 2.5);
  EXPECT_EQ(back.scenario.kind, sim::ScenarioKind::Circle);
  EXPECT_EQ(back.env.camera.width, 16);
  EXPECT_EQ(back.seed, 21u);
}

TEST(TrainConfigText, UnknownKeyIsNamed) {
  try {
    parse_train_config("[sac]\ngamma = 0.9\nwarp_factor = 9\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("warp_factor"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_train_config("[sac]\ngamma = lots\n"), ConfigError);
  TrainConfig c = quick_config();
  c.sac.batch_size = 1000;
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace uavnav::train
