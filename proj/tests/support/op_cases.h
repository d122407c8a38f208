#pragma once

// One finite-difference case per differentiable op. Each case draws its own
// inputs from `rng` and returns one result per checked expression.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gradcheck.h"
#include "uavnav/ad/ops.h"

namespace op_cases {

using gradcheck::random_leaf;
using uavnav::ad::Tensor;

using Results = std::vector<gradcheck::Result>;

struct Case {
  std::string name;
  std::function<Results(std::mt19937_64&, std::uint64_t)> run;
};

inline const std::vector<Case>& all() {
  namespace ad = uavnav::ad;
  using gradcheck::check;
  static const std::vector<Case> cases = {
      {"add",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor a = random_leaf(rng, {3, 4}), b = random_leaf(rng, {3, 4});
         return {check([&] { return ad::add(a, b); }, {a, b}, seed)};
       }},
      {"sub",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor a = random_leaf(rng, {3, 4}), b = random_leaf(rng, {3, 4});
         return {check([&] { return ad::sub(a, b); }, {a, b}, seed)};
       }},
      {"mul",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor a = random_leaf(rng, {3, 4}), b = random_leaf(rng, {3, 4});
         return {check([&] { return ad::mul(a, b); }, {a, b}, seed)};
       }},
      {"minimum",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         // Entries are kept apart so the FD stencil never swaps the winner.
         Tensor a = random_leaf(rng, {3, 4});
         std::vector<float> shifted(a.values().begin(), a.values().end());
         std::uniform_real_distribution<float> gap(0.05f, 1.0f);
         std::bernoulli_distribution coin(0.5);
         for (float& v : shifted) v += coin(rng) ? gap(rng) : -gap(rng);
         Tensor b = Tensor::from_values({3, 4}, shifted, true);
         return {check([&] { return ad::minimum(a, b); }, {a, b}, seed)};
       }},
      {"scale_add_scalar",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor a = random_leaf(rng, {5});
         return {check([&] { return ad::add_scalar(ad::scale(a, -1.7f), 0.3f); }, {a}, seed)};
       }},
      {"mul_scalar",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor a = random_leaf(rng, {2, 3}), s = random_leaf(rng, {1});
         return {check([&] { return ad::mul_scalar(a, s); }, {a, s}, seed)};
       }},
      {"relu",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor a = random_leaf(rng, {4, 5}, -1.0f, 1.0f, 0.01f);
         return {check([&] { return ad::relu(a); }, {a}, seed)};
       }},
      {"tanh",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor a = random_leaf(rng, {4, 5}, -2.0f, 2.0f);
         return {check([&] { return ad::tanh(a); }, {a}, seed)};
       }},
      {"exp",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor a = random_leaf(rng, {4, 5});
         return {check([&] { return ad::exp(a); }, {a}, seed)};
       }},
      {"square",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor a = random_leaf(rng, {4, 5});
         return {check([&] { return ad::square(a); }, {a}, seed)};
       }},
      {"sum_mean",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor a = random_leaf(rng, {3, 7});
         return {check([&] { return ad::sum(a); }, {a}, seed), check([&] { return ad::mean(a); }, {a}, seed)};
       }},
      {"matmul",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor a = random_leaf(rng, {3, 5}), b = random_leaf(rng, {5, 4});
         return {check([&] { return ad::matmul(a, b); }, {a, b}, seed)};
       }},
      {"add_bias",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor x2 = random_leaf(rng, {3, 4}), b2 = random_leaf(rng, {4});
         Tensor x4 = random_leaf(rng, {2, 3, 4, 5}), b4 = random_leaf(rng, {3});
         return {check([&] { return ad::add_bias(x2, b2); }, {x2, b2}, seed),
                 check([&] { return ad::add_bias(x4, b4); }, {x4, b4}, seed)};
       }},
      {"dense",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor x = random_leaf(rng, {4, 6}), w = random_leaf(rng, {6, 3}), b = random_leaf(rng, {3});
         return {check([&] { return ad::dense(x, w, b); }, {x, w, b}, seed)};
       }},
      {"conv2d",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Results out;
         for (const std::size_t stride : {1u, 2u}) {
           Tensor x = random_leaf(rng, {2, 3, 8, 9}), k = random_leaf(rng, {4, 3, 3, 3});
           out.push_back(check([&] { return ad::conv2d(x, k, stride); }, {x, k}, seed));
         }
         return out;
       }},
      {"conv2d_transpose",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Results out;
         for (const std::size_t stride : {1u, 2u}) {
           for (std::size_t pad = 0; pad < stride; ++pad) {
             Tensor x = random_leaf(rng, {2, 4, 4, 5}), k = random_leaf(rng, {4, 3, 3, 3});
             out.push_back(check([&] { return ad::conv2d_transpose(x, k, stride, pad); }, {x, k}, seed));
           }
         }
         return out;
       }},
      {"layer_norm",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor x = random_leaf(rng, {3, 8}, -2.0f, 2.0f), g = random_leaf(rng, {8}), s = random_leaf(rng, {8});
         return {check([&] { return ad::layer_norm(x, g, s); }, {x, g, s}, seed)};
       }},
      {"concat_slice_reshape",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor a = random_leaf(rng, {3, 2}), b = random_leaf(rng, {3, 5});
         return {check([&] { return ad::concat_cols({a, b}); }, {a, b}, seed),
                 check([&] { return ad::slice_cols(b, 1, 4); }, {b}, seed),
                 check([&] { return ad::reshape(b, {5, 3}); }, {b}, seed)};
       }},
      {"gaussian_logprob",
       [](std::mt19937_64& rng, std::uint64_t seed) -> Results {
         Tensor raw = random_leaf(rng, {4, 3}, -1.5f, 1.5f);
         Tensor mu = random_leaf(rng, {4, 3});
         Tensor log_std = random_leaf(rng, {4, 3}, -1.0f, 0.5f);
         return {check([&] { return ad::gaussian_logprob(raw, mu, log_std); }, {raw, mu, log_std}, seed)};
       }},
  };
  return cases;
}

inline std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed * 7919u + 1u); }

}  // namespace op_cases
