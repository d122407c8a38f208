#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace uavnav::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {

struct Node;
using NodePtr = std::shared_ptr<Node>;
// Reads the owning node's grad and accumulates into its parents' grads.
using BackwardFn = std::function<void(const Node& self)>;

struct Node {
  Shape shape;
  std::vector<float> value;
  std::vector<float> grad;  // empty until first written
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<NodePtr> parents;
  BackwardFn backward;

  float* grad_buffer();  // allocates zero-filled on first use
};

}  // namespace detail

// Reference-counted handle to a node in the computation graph. Copying a
// Tensor aliases the same storage (like a framework tensor); use clone() for
// an independent copy. Leaves with requires_grad are trainable parameters;
// every op output records its parents only when some parent requires grad.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, float value, bool requires_grad = false);
  static Tensor from_values(Shape shape, std::vector<float> values, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const float> values() const;
  // Direct write access; only meaningful on leaves (parameters, inputs).
  std::span<float> mutable_values();
  float item() const;

  bool requires_grad() const;
  bool is_leaf() const;
  bool has_grad() const;
  std::span<const float> grad() const;
  std::span<float> mutable_grad();
  void zero_grad();

  // Same values, cut from the graph: nothing flows back through the result.
  Tensor detach() const;
  // Deep copy of the values as a fresh leaf with the same requires_grad flag.
  Tensor clone() const;

  const detail::NodePtr& node() const { return node_; }
  explicit Tensor(detail::NodePtr node) : node_(std::move(node)) {}

 private:
  detail::NodePtr node_;
};

// Reverse-mode accumulation from a single-element loss into every reachable
// tensor that requires grad. Leaf grads accumulate across calls until
// zero_grad(). Throws ContractViolation for non-scalar losses or cycles.
void backward(const Tensor& loss);

// While alive, op outputs record no graph edges on this thread (inference).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

namespace detail {

// Builds an op output, checking values are finite (NumericalError otherwise).
// The graph edge is recorded only if some parent requires grad.
Tensor make_result(const char* op, Shape shape, std::vector<float> value, std::vector<Tensor> parents,
                   BackwardFn backward);

}  // namespace detail

}  // namespace uavnav::ad
