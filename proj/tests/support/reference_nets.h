#pragma once

// Double-precision re-implementation of the networks, written from the
// architecture description: valid 3x3 convs (first stride 2) with ReLU, dense,
// layer norm, tanh latent; decoder mirror with transposed convs; 3-layer MLP
// actor and twin critics. Parameters are read by name, so it mirrors any
// SacNetworks instance (online or target lists).

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavnav/nets/layers.h"

namespace reference {

using Vec = std::vector<double>;

struct Param {
  std::vector<std::size_t> shape;
  Vec v;
};

using Params = std::map<std::string, Param>;

inline Params from(const uavnav::nets::ParamList& list) {
  Params out;
  for (const auto& p : list) {
    Param q;
    q.shape = p.tensor.shape();
    q.v.assign(p.tensor.values().begin(), p.tensor.values().end());
    out[p.name] = std::move(q);
  }
  return out;
}

inline Params merge(Params a, const Params& b) {
  a.insert(b.begin(), b.end());
  return a;
}

inline const Param& get(const Params& p, const std::string& name) {
  const auto it = p.find(name);
  if (it == p.end()) throw std::runtime_error("reference: missing " + name);
  return it->second;
}

inline Vec rows(const uavnav::ad::Tensor& t, std::size_t row) {
  const std::size_t width = t.numel() / t.dim(0);
  return Vec(t.values().begin() + row * width, t.values().begin() + (row + 1) * width);
}

// One image [C x H x W] through a valid 3x3 conv.
inline Vec conv(const Vec& x, std::size_t c, std::size_t h, std::size_t w, const Param& k, const Param& b,
                std::size_t stride, std::size_t& oh, std::size_t& ow) {
  const std::size_t f = k.shape[0];
  oh = (h - 3) / stride + 1;
  ow = (w - 3) / stride + 1;
  Vec y(f * oh * ow);
  for (std::size_t o = 0; o < f; ++o)
    for (std::size_t r = 0; r < oh; ++r)
      for (std::size_t s = 0; s < ow; ++s) {
        double acc = b.v[o];
        for (std::size_t ch = 0; ch < c; ++ch)
          for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
              acc += k.v[((o * c + ch) * 3 + i) * 3 + j] * x[(ch * h + r * stride + i) * w + s * stride + j];
        y[(o * oh + r) * ow + s] = acc;
      }
  return y;
}

// Transposed conv: every input pixel scatters a 3x3 stamp; kernels [F x C].
inline Vec deconv(const Vec& x, std::size_t h, std::size_t w, const Param& k, const Param& b, std::size_t stride,
                  std::size_t pad, std::size_t& oh, std::size_t& ow) {
  const std::size_t f = k.shape[0], c = k.shape[1];
  oh = (h - 1) * stride + 3 + pad;
  ow = (w - 1) * stride + 3 + pad;
  Vec y(c * oh * ow, 0.0);
  for (std::size_t o = 0; o < c; ++o)
    for (std::size_t r = 0; r < oh; ++r)
      for (std::size_t s = 0; s < ow; ++s) y[(o * oh + r) * ow + s] = b.v[o];
  for (std::size_t in = 0; in < f; ++in)
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t s = 0; s < w; ++s) {
        const double v = x[(in * h + r) * w + s];
        for (std::size_t o = 0; o < c; ++o)
          for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
              y[(o * oh + r * stride + i) * ow + s * stride + j] += v * k.v[((in * c + o) * 3 + i) * 3 + j];
      }
  return y;
}

inline Vec dense(const Vec& x, const Param& w, const Param& b) {
  const std::size_t in = w.shape[0], out = w.shape[1];
  Vec y(b.v);
  for (std::size_t i = 0; i < in; ++i)
    for (std::size_t j = 0; j < out; ++j) y[j] += x[i] * w.v[i * out + j];
  return y;
}

// Records the sign of every ReLU input so callers can detect kink crossings.
inline void relu(Vec& x, std::vector<bool>* branches) {
  for (double& v : x) {
    if (branches) branches->push_back(v > 0.0);
    v = v > 0.0 ? v : 0.0;
  }
}

inline Vec mlp(const Params& p, const std::string& prefix, Vec x, std::vector<bool>* branches = nullptr) {
  for (int layer = 0; layer < 3; ++layer) {
    const std::string name = prefix + ".fc" + std::to_string(layer);
    x = dense(x, get(p, name + ".weight"), get(p, name + ".bias"));
    if (layer < 2) relu(x, branches);
  }
  return x;
}

struct ConvGeometry {
  std::size_t channels = 0, height = 0, width = 0;
};

// One stack [3 x H x W] -> latent.
inline Vec encode(const Params& p, Vec x, std::size_t height, std::size_t width,
                  std::vector<bool>* branches = nullptr, ConvGeometry* geometry = nullptr) {
  std::size_t c = 3, h = height, w = width;
  for (int layer = 0; layer < 4; ++layer) {
    const std::string name = "encoder.conv" + std::to_string(layer);
    const Param& k = get(p, name + ".kernels");
    std::size_t oh = 0, ow = 0;
    x = conv(x, c, h, w, k, get(p, name + ".bias"), layer == 0 ? 2 : 1, oh, ow);
    relu(x, branches);
    c = k.shape[0];
    h = oh;
    w = ow;
  }
  if (geometry) *geometry = {c, h, w};
  Vec z = dense(x, get(p, "encoder.fc.weight"), get(p, "encoder.fc.bias"));
  double mu = 0.0, var = 0.0;
  for (const double v : z) mu += v / z.size();
  for (const double v : z) var += (v - mu) * (v - mu) / z.size();
  const Param& gain = get(p, "encoder.ln.gain");
  const Param& shift = get(p, "encoder.ln.shift");
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::tanh((z[i] - mu) / std::sqrt(var + 1e-5) * gain.v[i] + shift.v[i]);
  return z;
}

inline Vec decode(const Params& p, const Vec& z, const ConvGeometry& g, std::size_t output_padding) {
  Vec x = dense(z, get(p, "decoder.fc.weight"), get(p, "decoder.fc.bias"));
  relu(x, nullptr);
  std::size_t h = g.height, w = g.width;
  for (int layer = 0; layer < 4; ++layer) {
    const std::string name = "decoder.deconv" + std::to_string(layer);
    const bool last = layer == 3;
    std::size_t oh = 0, ow = 0;
    x = deconv(x, h, w, get(p, name + ".kernels"), get(p, name + ".bias"), last ? 2 : 1, last ? output_padding : 0,
               oh, ow);
    if (!last) relu(x, nullptr);
    h = oh;
    w = ow;
  }
  return x;
}

inline Vec concat(Vec a, const Vec& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct Head {
  Vec mean, log_std;
};

inline Head actor(const Params& p, const Vec& z, const Vec& state, double log_std_min, double log_std_max) {
  const Vec out = mlp(p, "actor", concat(z, state));
  Head h;
  for (int j = 0; j < 3; ++j) {
    h.mean.push_back(out[j]);
    h.log_std.push_back(log_std_min + 0.5 * (log_std_max - log_std_min) * (std::tanh(out[3 + j]) + 1.0));
  }
  return h;
}

// log N(raw; mean, exp(log_std)) summed over dimensions, minus the tanh
// change-of-variables term with the usual 1e-6 guard.
inline double squashed_log_prob(const Vec& raw, const Head& h) {
  double lp = 0.0;
  for (std::size_t j = 0; j < raw.size(); ++j) {
    const double sigma = std::exp(h.log_std[j]);
    const double d = (raw[j] - h.mean[j]) / sigma;
    lp += -0.5 * d * d - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
    const double t = std::tanh(raw[j]);
    lp -= std::log(1.0 - t * t + 1e-6);
  }
  return lp;
}

struct Forward {
  Vec q1, q2;                  // one per batch row
  std::vector<bool> branches;  // sign of every ReLU input, in evaluation order
};

// stack is [N x 3 x H x W] row-major, state [N x 6], action [N x 3].
inline Forward encoder_critic(const Params& p, const Vec& stack, const Vec& state, const Vec& action, std::size_t n,
                              std::size_t height, std::size_t width) {
  Forward out;
  const std::size_t per_image = 3 * height * width;
  for (std::size_t b = 0; b < n; ++b) {
    const Vec x(stack.begin() + b * per_image, stack.begin() + (b + 1) * per_image);
    Vec input = encode(p, x, height, width, &out.branches);
    input.insert(input.end(), state.begin() + b * 6, state.begin() + (b + 1) * 6);
    input.insert(input.end(), action.begin() + b * 3, action.begin() + (b + 1) * 3);
    out.q1.push_back(mlp(p, "critic.q1", input, &out.branches)[0]);
    out.q2.push_back(mlp(p, "critic.q2", input, &out.branches)[0]);
  }
  return out;
}

}  // namespace reference
