#pragma once

#include <random>
#include <vector>

#include "uavnav/nets/networks.h"
#include "uavnav/train/sac.h"

namespace fixtures {

using uavnav::ad::Tensor;

inline Tensor uniform(std::mt19937_64& rng, uavnav::ad::Shape shape, float lo, float hi) {
  std::uniform_real_distribution<float> u(lo, hi);
  std::vector<float> v(uavnav::ad::shape_numel(shape));
  for (float& x : v) x = u(rng);
  return Tensor::from_values(std::move(shape), std::move(v));
}

// Small networks that keep per-test runtime in the milliseconds.
inline uavnav::nets::NetConfig tiny_net(int side = 16) {
  uavnav::nets::NetConfig c;
  c.image_height = side;
  c.image_width = side;
  c.filters = 8;
  c.latent_dim = 50;
  c.hidden = 32;
  return c;
}

inline uavnav::train::Batch random_batch(const uavnav::nets::NetConfig& c, std::size_t n, std::mt19937_64& rng,
                                         float done_fraction = 0.2f) {
  const std::size_t h = c.image_height, w = c.image_width, f = c.frames;
  uavnav::train::Batch b;
  b.obs = uniform(rng, {n, f, h, w}, 0.0f, 1.0f);
  b.next_obs = uniform(rng, {n, f, h, w}, 0.0f, 1.0f);
  b.state = uniform(rng, {n, 6}, -1.0f, 1.0f);
  b.next_state = uniform(rng, {n, 6}, -1.0f, 1.0f);
  b.action = uniform(rng, {n, 3}, -0.99f, 0.99f);
  b.reward = uniform(rng, {n, 1}, -3.0f, 3.0f);
  std::bernoulli_distribution done(done_fraction);
  std::vector<float> nd(n);
  for (float& x : nd) x = done(rng) ? 0.0f : 1.0f;
  b.not_done = Tensor::from_values({n, 1}, nd);
  return b;
}

inline std::vector<float> flatten(const uavnav::nets::ParamList& params) {
  std::vector<float> out;
  for (const auto& p : params) out.insert(out.end(), p.tensor.values().begin(), p.tensor.values().end());
  return out;
}

}  // namespace fixtures
