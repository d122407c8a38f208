#include "uavnav/train/replay_buffer.h"

#include <algorithm>
#include <random>
#include <string>
#include <unordered_set>

#include "uavnav/common/errors.h"

namespace uavnav::train {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ContractViolation("replay buffer capacity must be positive");
  slots_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (slots_.size() < capacity_) {
    slots_.push_back(std::move(t));
  } else {
    slots_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
  ++inserted_;
}

const Transition& ReplayBuffer::at(std::size_t index) const {
  if (index >= slots_.size()) {
    throw ContractViolation("replay buffer index " + std::to_string(index) + " out of range");
  }
  // While filling, head_ stays 0 and logical order equals slot order.
  return slots_[(head_ + index) % slots_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count, Rng& rng) const {
  const std::size_t n = slots_.size();
  if (count > n) {
    throw ContractViolation("replay buffer holds " + std::to_string(n) + " transitions, batch needs " +
                            std::to_string(count));
  }
  std::vector<std::size_t> picked;
  picked.reserve(count);
  std::unordered_set<std::size_t> seen;
  for (std::size_t j = n - count; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> draw(0, j);
    const std::size_t t = draw(rng);
    const std::size_t chosen = seen.insert(t).second ? t : j;
    if (chosen == j) seen.insert(j);
    picked.push_back(chosen);
  }
  return picked;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t count, Rng& rng) const {
  std::vector<const Transition*> out;
  for (const std::size_t i : sample_indices(count, rng)) out.push_back(&at(i));
  return out;
}

}  // namespace uavnav::train
