#include "uavnav/ad/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "uavnav/common/errors.h"

namespace uavnav::ad {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (const std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) out << (i ? "x" : "") << shape[i];
  out << ']';
  return out.str();
}

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

namespace detail {

float* Node::grad_buffer() {
  if (grad.empty()) grad.assign(value.size(), 0.0f);
  return grad.data();
}

Tensor make_result(const char* op, Shape shape, std::vector<float> value, std::vector<Tensor> parents,
                   BackwardFn backward) {
  for (const float v : value) {
    if (!std::isfinite(v)) throw NumericalError(std::string("non-finite value produced by ") + op);
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->op = op;
  const bool needs_grad =
      g_grad_enabled && std::any_of(parents.begin(), parents.end(), [](const Tensor& t) { return t.requires_grad(); });
  if (needs_grad) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (const Tensor& p : parents) node->parents.push_back(p.node());
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

}  // namespace detail

namespace {

void require_defined(const detail::NodePtr& node) {
  if (!node) throw ContractViolation("operation on an undefined tensor");
}

}  // namespace

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0f, requires_grad); }

Tensor Tensor::full(Shape shape, float value, bool requires_grad) {
  std::vector<float> values(shape_numel(shape), value);
  return from_values(std::move(shape), std::move(values), requires_grad);
}

Tensor Tensor::from_values(Shape shape, std::vector<float> values, bool requires_grad) {
  if (values.size() != shape_numel(shape)) {
    std::ostringstream msg;
    msg << "tensor: " << values.size() << " values for shape " << shape_string(shape);
    throw ContractViolation(msg.str());
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

const Shape& Tensor::shape() const {
  require_defined(node_);
  return node_->shape;
}

std::size_t Tensor::dim(std::size_t axis) const {
  const Shape& s = shape();
  if (axis >= s.size()) throw ContractViolation("tensor: axis out of range");
  return s[axis];
}

std::size_t Tensor::numel() const { return shape_numel(shape()); }

std::span<const float> Tensor::values() const {
  require_defined(node_);
  return node_->value;
}

std::span<float> Tensor::mutable_values() {
  require_defined(node_);
  return node_->value;
}

float Tensor::item() const {
  if (numel() != 1) throw ContractViolation("item() on a tensor with " + std::to_string(numel()) + " elements");
  return node_->value[0];
}

bool Tensor::requires_grad() const {
  require_defined(node_);
  return node_->requires_grad;
}

bool Tensor::is_leaf() const {
  require_defined(node_);
  return !node_->backward;
}

bool Tensor::has_grad() const {
  require_defined(node_);
  return !node_->grad.empty();
}

std::span<const float> Tensor::grad() const {
  require_defined(node_);
  return node_->grad;
}

std::span<float> Tensor::mutable_grad() {
  require_defined(node_);
  node_->grad_buffer();
  return node_->grad;
}

void Tensor::zero_grad() {
  require_defined(node_);
  node_->grad.assign(node_->value.size(), 0.0f);
}

Tensor Tensor::detach() const {
  require_defined(node_);
  auto node = std::make_shared<detail::Node>();
  node->shape = node_->shape;
  node->value = node_->value;
  node->op = "detach";
  return Tensor(std::move(node));
}

Tensor Tensor::clone() const {
  require_defined(node_);
  return from_values(node_->shape, node_->value, node_->requires_grad);
}

void backward(const Tensor& loss) {
  if (!loss.defined()) throw ContractViolation("backward on an undefined tensor");
  if (loss.numel() != 1) {
    throw ContractViolation("backward needs a scalar loss, got shape " + shape_string(loss.shape()));
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS; a node re-entered while on the stack is a cycle.
  enum class Mark { Visiting, Done };
  std::unordered_map<const detail::Node*, Mark> marks;
  std::vector<detail::Node*> order;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  marks[loss.node().get()] = Mark::Visiting;
  while (!stack.empty()) {
    auto& [node, next_parent] = stack.back();
    if (next_parent < node->parents.size()) {
      detail::Node* parent = node->parents[next_parent++].get();
      if (!parent->requires_grad) continue;
      const auto it = marks.find(parent);
      if (it == marks.end()) {
        marks[parent] = Mark::Visiting;
        stack.emplace_back(parent, 0);
      } else if (it->second == Mark::Visiting) {
        throw ContractViolation("backward: computation graph contains a cycle");
      }
      continue;
    }
    marks[node] = Mark::Done;
    order.push_back(node);
    stack.pop_back();
  }

  loss.node()->grad_buffer()[0] += 1.0f;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    if (node->backward && !node->grad.empty()) node->backward(*node);
  }
}

}  // namespace uavnav::ad
