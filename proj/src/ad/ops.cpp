#include "uavnav/ad/ops.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Core>

#include "uavnav/common/errors.h"

namespace uavnav::ad {
namespace {

using detail::Node;
using detail::NodePtr;
using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

constexpr std::size_t kKernel = 3;

[[noreturn]] void shape_error(const char* op, const std::string& detail) {
  throw ContractViolation(std::string(op) + ": " + detail);
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    shape_error(op, "shape mismatch " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

void require_rank(const char* op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) {
    shape_error(op, "expected rank " + std::to_string(rank) + ", got " + shape_string(t.shape()));
  }
}

// Gradient buffer of a parent, or nullptr when it does not take gradients.
float* grad_of(const NodePtr& node) { return node->requires_grad ? node->grad_buffer() : nullptr; }

template <typename Forward, typename Local>
Tensor unary(const char* op, const Tensor& a, Forward forward, Local local_derivative) {
  const auto in = a.values();
  std::vector<float> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = forward(in[i]);
  NodePtr pa = a.node();
  return detail::make_result(op, a.shape(), std::move(out), {a}, [pa, local_derivative](const Node& self) {
    float* ga = grad_of(pa);
    if (!ga) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      ga[i] += self.grad[i] * local_derivative(pa->value[i], self.value[i]);
    }
  });
}

// cols[(c*3 + ki)*3 + kj][oi*Wo + oj] = img[c][oi*stride + ki][oj*stride + kj]
void im2col(const float* img, std::size_t channels, std::size_t height, std::size_t width, std::size_t stride,
            std::size_t out_h, std::size_t out_w, float* cols) {
  const std::size_t positions = out_h * out_w;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t ki = 0; ki < kKernel; ++ki) {
      for (std::size_t kj = 0; kj < kKernel; ++kj) {
        float* dst = cols + ((c * kKernel + ki) * kKernel + kj) * positions;
        for (std::size_t oi = 0; oi < out_h; ++oi) {
          const float* src = img + (c * height + oi * stride + ki) * width + kj;
          for (std::size_t oj = 0; oj < out_w; ++oj) dst[oi * out_w + oj] = src[oj * stride];
        }
      }
    }
  }
}

// Scatter-add counterpart of im2col.
void col2im_add(const float* cols, std::size_t channels, std::size_t height, std::size_t width, std::size_t stride,
                std::size_t out_h, std::size_t out_w, float* img) {
  const std::size_t positions = out_h * out_w;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t ki = 0; ki < kKernel; ++ki) {
      for (std::size_t kj = 0; kj < kKernel; ++kj) {
        const float* src = cols + ((c * kKernel + ki) * kKernel + kj) * positions;
        for (std::size_t oi = 0; oi < out_h; ++oi) {
          float* dst = img + (c * height + oi * stride + ki) * width + kj;
          for (std::size_t oj = 0; oj < out_w; ++oj) dst[oj * stride] += src[oi * out_w + oj];
        }
      }
    }
  }
}

void check_kernels(const char* op, const Tensor& kernels) {
  require_rank(op, kernels, 4);
  if (kernels.dim(2) != kKernel || kernels.dim(3) != kKernel) {
    shape_error(op, "kernels must be F x C x 3 x 3, got " + shape_string(kernels.shape()));
  }
}

void check_stride(const char* op, std::size_t stride) {
  if (stride != 1 && stride != 2) shape_error(op, "stride must be 1 or 2");
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  const auto x = a.values();
  const auto y = b.values();
  std::vector<float> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  NodePtr pa = a.node(), pb = b.node();
  return detail::make_result("add", a.shape(), std::move(out), {a, b}, [pa, pb](const Node& self) {
    if (float* ga = grad_of(pa)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i];
    }
    if (float* gb = grad_of(pb)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) gb[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  const auto x = a.values();
  const auto y = b.values();
  std::vector<float> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  NodePtr pa = a.node(), pb = b.node();
  return detail::make_result("sub", a.shape(), std::move(out), {a, b}, [pa, pb](const Node& self) {
    if (float* ga = grad_of(pa)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i];
    }
    if (float* gb = grad_of(pb)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) gb[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  const auto x = a.values();
  const auto y = b.values();
  std::vector<float> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  NodePtr pa = a.node(), pb = b.node();
  return detail::make_result("mul", a.shape(), std::move(out), {a, b}, [pa, pb](const Node& self) {
    if (float* ga = grad_of(pa)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i] * pb->value[i];
    }
    if (float* gb = grad_of(pb)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) gb[i] += self.grad[i] * pa->value[i];
    }
  });
}

Tensor minimum(const Tensor& a, const Tensor& b) {
  require_same_shape("minimum", a, b);
  const auto x = a.values();
  const auto y = b.values();
  std::vector<float> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] <= y[i] ? x[i] : y[i];
  NodePtr pa = a.node(), pb = b.node();
  return detail::make_result("minimum", a.shape(), std::move(out), {a, b}, [pa, pb](const Node& self) {
    float* ga = grad_of(pa);
    float* gb = grad_of(pb);
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      // Ties route the gradient to the first argument.
      if (pa->value[i] <= pb->value[i]) {
        if (ga) ga[i] += self.grad[i];
      } else if (gb) {
        gb[i] += self.grad[i];
      }
    }
  });
}

Tensor scale(const Tensor& a, float factor) {
  return unary(
      "scale", a, [factor](float x) { return x * factor; }, [factor](float, float) { return factor; });
}

Tensor add_scalar(const Tensor& a, float offset) {
  return unary(
      "add_scalar", a, [offset](float x) { return x + offset; }, [](float, float) { return 1.0f; });
}

Tensor mul_scalar(const Tensor& a, const Tensor& s) {
  if (s.numel() != 1) shape_error("mul_scalar", "scalar operand has shape " + shape_string(s.shape()));
  const float k = s.values()[0];
  const auto x = a.values();
  std::vector<float> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * k;
  NodePtr pa = a.node(), ps = s.node();
  return detail::make_result("mul_scalar", a.shape(), std::move(out), {a, s}, [pa, ps](const Node& self) {
    const float k = ps->value[0];
    if (float* ga = grad_of(pa)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i] * k;
    }
    if (float* gs = grad_of(ps)) {
      double acc = 0.0;
      for (std::size_t i = 0; i < self.grad.size(); ++i) acc += static_cast<double>(self.grad[i]) * pa->value[i];
      gs[0] += static_cast<float>(acc);
    }
  });
}

Tensor relu(const Tensor& a) {
  return unary(
      "relu", a, [](float x) { return x > 0.0f ? x : 0.0f; }, [](float x, float) { return x > 0.0f ? 1.0f : 0.0f; });
}

Tensor tanh(const Tensor& a) {
  return unary(
      "tanh", a, [](float x) { return std::tanh(x); }, [](float, float y) { return 1.0f - y * y; });
}

Tensor exp(const Tensor& a) {
  return unary(
      "exp", a, [](float x) { return std::exp(x); }, [](float, float y) { return y; });
}

Tensor square(const Tensor& a) {
  return unary(
      "square", a, [](float x) { return x * x; }, [](float x, float) { return 2.0f * x; });
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (const float v : a.values()) acc += v;
  NodePtr pa = a.node();
  return detail::make_result("sum", {1}, {static_cast<float>(acc)}, {a}, [pa](const Node& self) {
    float* ga = grad_of(pa);
    if (!ga) return;
    const float g = self.grad[0];
    for (std::size_t i = 0; i < pa->value.size(); ++i) ga[i] += g;
  });
}

Tensor mean(const Tensor& a) {
  const std::size_t n = a.numel();
  if (n == 0) shape_error("mean", "empty tensor");
  double acc = 0.0;
  for (const float v : a.values()) acc += v;
  NodePtr pa = a.node();
  return detail::make_result("mean", {1}, {static_cast<float>(acc / static_cast<double>(n))}, {a},
                             [pa, n](const Node& self) {
                               float* ga = grad_of(pa);
                               if (!ga) return;
                               const float g = self.grad[0] / static_cast<float>(n);
                               for (std::size_t i = 0; i < n; ++i) ga[i] += g;
                             });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank("matmul", a, 2);
  require_rank("matmul", b, 2);
  const std::size_t n = a.dim(0), k = a.dim(1), m = b.dim(1);
  if (b.dim(0) != k) shape_error("matmul", "inner dimensions differ: " + shape_string(a.shape()) + " * " + shape_string(b.shape()));
  std::vector<float> out(n * m);
  MatMap(out.data(), n, m).noalias() = ConstMatMap(a.values().data(), n, k) * ConstMatMap(b.values().data(), k, m);
  NodePtr pa = a.node(), pb = b.node();
  return detail::make_result("matmul", {n, m}, std::move(out), {a, b}, [pa, pb, n, k, m](const Node& self) {
    const ConstMatMap g(self.grad.data(), n, m);
    if (float* ga = grad_of(pa)) {
      MatMap(ga, n, k).noalias() += g * ConstMatMap(pb->value.data(), k, m).transpose();
    }
    if (float* gb = grad_of(pb)) {
      MatMap(gb, k, m).noalias() += ConstMatMap(pa->value.data(), n, k).transpose() * g;
    }
  });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  require_rank("add_bias", bias, 1);
  const std::size_t features = bias.dim(0);
  std::size_t inner = 0;
  if (x.rank() == 2 && x.dim(1) == features) {
    inner = 1;
  } else if (x.rank() == 4 && x.dim(1) == features) {
    inner = x.dim(2) * x.dim(3);
  } else {
    shape_error("add_bias", "cannot add bias " + shape_string(bias.shape()) + " to " + shape_string(x.shape()));
  }
  const std::size_t batch = x.dim(0);
  const auto xv = x.values();
  const auto bv = bias.values();
  std::vector<float> out(xv.size());
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t f = 0; f < features; ++f) {
      const std::size_t base = (n * features + f) * inner;
      for (std::size_t i = 0; i < inner; ++i) out[base + i] = xv[base + i] + bv[f];
    }
  }
  NodePtr px = x.node(), pb = bias.node();
  return detail::make_result("add_bias", x.shape(), std::move(out), {x, bias},
                             [px, pb, batch, features, inner](const Node& self) {
                               if (float* gx = grad_of(px)) {
                                 for (std::size_t i = 0; i < self.grad.size(); ++i) gx[i] += self.grad[i];
                               }
                               if (float* gb = grad_of(pb)) {
                                 for (std::size_t f = 0; f < features; ++f) {
                                   double acc = 0.0;
                                   for (std::size_t n = 0; n < batch; ++n) {
                                     const std::size_t base = (n * features + f) * inner;
                                     for (std::size_t i = 0; i < inner; ++i) acc += self.grad[base + i];
                                   }
                                   gb[f] += static_cast<float>(acc);
                                 }
                               }
                             });
}

Tensor dense(const Tensor& x, const Tensor& weights, const Tensor& bias) {
  require_rank("dense", x, 2);
  require_rank("dense", weights, 2);
  if (bias.rank() != 1 || bias.dim(0) != weights.dim(1)) {
    shape_error("dense", "bias " + shape_string(bias.shape()) + " does not match weights " + shape_string(weights.shape()));
  }
  return add_bias(matmul(x, weights), bias);
}

Tensor conv2d(const Tensor& input, const Tensor& kernels, std::size_t stride) {
  constexpr const char* op = "conv2d";
  require_rank(op, input, 4);
  check_kernels(op, kernels);
  check_stride(op, stride);
  const std::size_t batch = input.dim(0), channels = input.dim(1), height = input.dim(2), width = input.dim(3);
  const std::size_t filters = kernels.dim(0);
  if (kernels.dim(1) != channels) {
    shape_error(op, "kernels " + shape_string(kernels.shape()) + " do not match input " + shape_string(input.shape()));
  }
  if (height < kKernel || width < kKernel) shape_error(op, "input smaller than kernel: " + shape_string(input.shape()));
  const std::size_t out_h = (height - kKernel) / stride + 1;
  const std::size_t out_w = (width - kKernel) / stride + 1;
  const std::size_t positions = out_h * out_w;
  const std::size_t patch = channels * kKernel * kKernel;
  const std::size_t in_plane = channels * height * width;

  std::vector<float> out(batch * filters * positions);
  std::vector<float> cols(patch * positions);
  const ConstMatMap kmat(kernels.values().data(), filters, patch);
  for (std::size_t n = 0; n < batch; ++n) {
    im2col(input.values().data() + n * in_plane, channels, height, width, stride, out_h, out_w, cols.data());
    MatMap(out.data() + n * filters * positions, filters, positions).noalias() =
        kmat * ConstMatMap(cols.data(), patch, positions);
  }

  NodePtr px = input.node(), pk = kernels.node();
  return detail::make_result(
      op, {batch, filters, out_h, out_w}, std::move(out), {input, kernels},
      [=](const Node& self) {
        float* gx = grad_of(px);
        float* gk = grad_of(pk);
        std::vector<float> col_buf(patch * positions);
        std::vector<float> dcol_buf(gx ? patch * positions : 0);
        const ConstMatMap kmat(pk->value.data(), filters, patch);
        for (std::size_t n = 0; n < batch; ++n) {
          const ConstMatMap g(self.grad.data() + n * filters * positions, filters, positions);
          if (gk) {
            im2col(px->value.data() + n * in_plane, channels, height, width, stride, out_h, out_w, col_buf.data());
            MatMap(gk, filters, patch).noalias() += g * ConstMatMap(col_buf.data(), patch, positions).transpose();
          }
          if (gx) {
            MatMap(dcol_buf.data(), patch, positions).noalias() = kmat.transpose() * g;
            col2im_add(dcol_buf.data(), channels, height, width, stride, out_h, out_w, gx + n * in_plane);
          }
        }
      });
}

Tensor conv2d_transpose(const Tensor& input, const Tensor& kernels, std::size_t stride, std::size_t output_padding) {
  constexpr const char* op = "conv2d_transpose";
  require_rank(op, input, 4);
  check_kernels(op, kernels);
  check_stride(op, stride);
  if (output_padding >= stride) shape_error(op, "output_padding must be smaller than stride");
  const std::size_t batch = input.dim(0), filters = input.dim(1), in_h = input.dim(2), in_w = input.dim(3);
  if (kernels.dim(0) != filters) {
    shape_error(op, "kernels " + shape_string(kernels.shape()) + " do not match input " + shape_string(input.shape()));
  }
  if (in_h == 0 || in_w == 0) shape_error(op, "empty input");
  const std::size_t channels = kernels.dim(1);
  const std::size_t out_h = (in_h - 1) * stride + kKernel + output_padding;
  const std::size_t out_w = (in_w - 1) * stride + kKernel + output_padding;
  const std::size_t positions = in_h * in_w;
  const std::size_t patch = channels * kKernel * kKernel;
  const std::size_t out_plane = channels * out_h * out_w;
  const std::size_t in_plane = filters * positions;

  std::vector<float> out(batch * out_plane, 0.0f);
  std::vector<float> cols(patch * positions);
  const ConstMatMap kmat(kernels.values().data(), filters, patch);
  for (std::size_t n = 0; n < batch; ++n) {
    MatMap(cols.data(), patch, positions).noalias() =
        kmat.transpose() * ConstMatMap(input.values().data() + n * in_plane, filters, positions);
    col2im_add(cols.data(), channels, out_h, out_w, stride, in_h, in_w, out.data() + n * out_plane);
  }

  NodePtr px = input.node(), pk = kernels.node();
  return detail::make_result(
      op, {batch, channels, out_h, out_w}, std::move(out), {input, kernels},
      [=](const Node& self) {
        float* gx = grad_of(px);
        float* gk = grad_of(pk);
        std::vector<float> gcols(patch * positions);
        const ConstMatMap kmat(pk->value.data(), filters, patch);
        for (std::size_t n = 0; n < batch; ++n) {
          im2col(self.grad.data() + n * out_plane, channels, out_h, out_w, stride, in_h, in_w, gcols.data());
          const ConstMatMap gc(gcols.data(), patch, positions);
          if (gx) MatMap(gx + n * in_plane, filters, positions).noalias() += kmat * gc;
          if (gk) {
            MatMap(gk, filters, patch).noalias() +=
                ConstMatMap(px->value.data() + n * in_plane, filters, positions) * gc.transpose();
          }
        }
      });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, float eps) {
  constexpr const char* op = "layer_norm";
  require_rank(op, x, 2);
  const std::size_t rows = x.dim(0), d = x.dim(1);
  if (d < 2) shape_error(op, "feature dimension must be >= 2");
  if (gain.shape() != Shape{d} || shift.shape() != Shape{d}) shape_error(op, "gain/shift must have shape [D]");

  const auto xv = x.values();
  const auto gv = gain.values();
  const auto sv = shift.values();
  std::vector<float> out(rows * d);
  std::vector<float> normalized(rows * d);
  std::vector<float> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const float* row = xv.data() + r * d;
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + eps);
    inv_std[r] = static_cast<float>(inv);
    for (std::size_t j = 0; j < d; ++j) {
      const float xhat = static_cast<float>((row[j] - mu) * inv);
      normalized[r * d + j] = xhat;
      out[r * d + j] = gv[j] * xhat + sv[j];
    }
  }

  NodePtr px = x.node(), pg = gain.node(), ps = shift.node();
  return detail::make_result(
      op, x.shape(), std::move(out), {x, gain, shift},
      [px, pg, ps, rows, d, normalized = std::move(normalized), inv_std = std::move(inv_std)](const Node& self) {
        float* gx = grad_of(px);
        float* gg = grad_of(pg);
        float* gs = grad_of(ps);
        std::vector<double> dxhat(d);
        for (std::size_t r = 0; r < rows; ++r) {
          const float* g = self.grad.data() + r * d;
          const float* xhat = normalized.data() + r * d;
          double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            if (gg) gg[j] += g[j] * xhat[j];
            if (gs) gs[j] += g[j];
            dxhat[j] = static_cast<double>(g[j]) * pg->value[j];
            sum_dxhat += dxhat[j];
            sum_dxhat_xhat += dxhat[j] * xhat[j];
          }
          if (!gx) continue;
          const double scale = inv_std[r] / static_cast<double>(d);
          for (std::size_t j = 0; j < d; ++j) {
            gx[r * d + j] += static_cast<float>(
                scale * (static_cast<double>(d) * dxhat[j] - sum_dxhat - xhat[j] * sum_dxhat_xhat));
          }
        }
      });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  constexpr const char* op = "concat_cols";
  if (parts.empty()) shape_error(op, "no inputs");
  const std::size_t rows = parts.front().dim(0);
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    require_rank(op, p, 2);
    if (p.dim(0) != rows) shape_error(op, "row counts differ");
    widths.push_back(p.dim(1));
    total += p.dim(1);
  }
  std::vector<float> out(rows * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto v = parts[k].values();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(v.data() + r * widths[k], widths[k], out.data() + r * total + offset);
    }
    offset += widths[k];
  }
  std::vector<NodePtr> nodes;
  for (const Tensor& p : parts) nodes.push_back(p.node());
  return detail::make_result(op, {rows, total}, std::move(out), parts,
                             [nodes, widths, rows, total](const Node& self) {
                               std::size_t offset = 0;
                               for (std::size_t k = 0; k < nodes.size(); ++k) {
                                 if (float* gp = grad_of(nodes[k])) {
                                   for (std::size_t r = 0; r < rows; ++r) {
                                     for (std::size_t j = 0; j < widths[k]; ++j) {
                                       gp[r * widths[k] + j] += self.grad[r * total + offset + j];
                                     }
                                   }
                                 }
                                 offset += widths[k];
                               }
                             });
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end) {
  require_rank("slice_cols", x, 2);
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (begin >= end || end > cols) shape_error("slice_cols", "invalid column range");
  const std::size_t width = end - begin;
  const auto v = x.values();
  std::vector<float> out(rows * width);
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(v.data() + r * cols + begin, width, out.data() + r * width);
  NodePtr px = x.node();
  return detail::make_result("slice_cols", {rows, width}, std::move(out), {x},
                             [px, rows, cols, begin, width](const Node& self) {
                               float* gx = grad_of(px);
                               if (!gx) return;
                               for (std::size_t r = 0; r < rows; ++r) {
                                 for (std::size_t j = 0; j < width; ++j) gx[r * cols + begin + j] += self.grad[r * width + j];
                               }
                             });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    shape_error("reshape", "cannot reshape " + shape_string(x.shape()) + " to " + shape_string(shape));
  }
  std::vector<float> out(x.values().begin(), x.values().end());
  NodePtr px = x.node();
  return detail::make_result("reshape", std::move(shape), std::move(out), {x}, [px](const Node& self) {
    float* gx = grad_of(px);
    if (!gx) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) gx[i] += self.grad[i];
  });
}

Tensor gaussian_logprob(const Tensor& raw, const Tensor& mean, const Tensor& log_std) {
  constexpr const char* op = "gaussian_logprob";
  require_rank(op, raw, 2);
  require_same_shape(op, raw, mean);
  require_same_shape(op, raw, log_std);
  const std::size_t rows = raw.dim(0), dims = raw.dim(1);
  const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const auto u = raw.values();
  const auto m = mean.values();
  const auto l = log_std.values();
  std::vector<float> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dims; ++j) {
      const std::size_t i = r * dims + j;
      const double z = (static_cast<double>(u[i]) - m[i]) * std::exp(-static_cast<double>(l[i]));
      const double t = std::tanh(static_cast<double>(u[i]));
      acc += -0.5 * z * z - l[i] - half_log_two_pi;
      acc -= std::log(1.0 - t * t + kLogProbSquashEps);
    }
    out[r] = static_cast<float>(acc);
  }
  NodePtr pu = raw.node(), pm = mean.node(), pl = log_std.node();
  return detail::make_result(op, {rows, 1}, std::move(out), {raw, mean, log_std},
                             [pu, pm, pl, rows, dims](const Node& self) {
                               float* gu = grad_of(pu);
                               float* gm = grad_of(pm);
                               float* gl = grad_of(pl);
                               for (std::size_t r = 0; r < rows; ++r) {
                                 const double g = self.grad[r];
                                 for (std::size_t j = 0; j < dims; ++j) {
                                   const std::size_t i = r * dims + j;
                                   const double inv_std = std::exp(-static_cast<double>(pl->value[i]));
                                   const double z = (static_cast<double>(pu->value[i]) - pm->value[i]) * inv_std;
                                   if (gu) {
                                     const double t = std::tanh(static_cast<double>(pu->value[i]));
                                     const double sech_sq = 1.0 - t * t;
                                     const double d_squash = 2.0 * t * sech_sq / (sech_sq + kLogProbSquashEps);
                                     gu[i] += static_cast<float>(g * (-z * inv_std + d_squash));
                                   }
                                   if (gm) gm[i] += static_cast<float>(g * z * inv_std);
                                   if (gl) gl[i] += static_cast<float>(g * (z * z - 1.0));
                                 }
                               }
                             });
}

}  // namespace uavnav::ad
