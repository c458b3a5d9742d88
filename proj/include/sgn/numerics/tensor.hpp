#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sgn {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// Runtime switch for the post-op finiteness check. Defaults to the value of the
// SGN_CHECK_FINITE environment variable ("1" enables it).
bool finite_checks_enabled();
void set_finite_checks(bool enabled);

// Graph recording switch for the current thread. While disabled, op results never
// require grad and hold no references to their inputs.
bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Dense row-major array with an optional gradient slot.
//
// A Tensor is a cheap handle onto shared storage: copying the handle aliases the
// same values, the way framework tensors behave. Results of ops that involve a
// tensor with requires_grad() keep a backward closure and references to their
// inputs, so calling backward() on a scalar result walks the recorded graph in
// reverse topological order and accumulates into every reachable grad slot.
template <typename T>
class Tensor {
 public:
  struct Node;
  // Receives the node whose grad has just been finalized.
  using BackwardFn = std::function<void(const Node&)>;

  struct Node {
    Shape shape;
    std::vector<T> values;
    std::vector<T> grad;  // empty when absent
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> inputs;
    BackwardFn backward;

    std::vector<T>& ensure_grad() {
      if (grad.empty()) grad.assign(values.size(), T(0));
      return grad;
    }
  };

  Tensor() = default;
  Tensor(Shape shape, std::vector<T> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T value, bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const { return node_->values.size(); }

  std::span<const T> values() const { return node_->values; }
  std::span<T> mutable_values() { return node_->values; }
  T item() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool flag) { node_->requires_grad = flag; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return node_->ensure_grad(); }
  void zero_grad();
  void clear_grad() { node_->grad.clear(); }

  // Seeds d(self)/d(self) = 1 and back-propagates. Requires a single-element tensor.
  void backward() const;

  // Deep copy of the values without any graph history.
  Tensor detach() const;

  // Used by op implementations: wraps a freshly computed result, recording the
  // inputs and backward closure only when some input requires a gradient.
  static Tensor make_result(Shape shape, std::vector<T> values,
                            std::vector<Tensor> inputs, BackwardFn backward);

  Node& node() const { return *node_; }
  const std::shared_ptr<Node>& node_ptr() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  std::shared_ptr<Node> node_;
};

// A tensor registered under a stable name. Buffers (trainable == false) are
// persisted in checkpoints but never touched by the optimizer.
template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
  bool trainable = true;
};

}  // namespace sgn
