#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "sgn/numerics/adam.hpp"
#include "sgn/numerics/batch_norm.hpp"
#include "sgn/numerics/grad_check.hpp"
#include "sgn/numerics/ops.hpp"
#include "sgn/verify/acceptance.hpp"

namespace sgn {

namespace {

using T = double;

Tensor<T> randn(Shape shape, std::mt19937_64& rng, bool grad = true) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<T> v(n);
  for (auto& x : v) x = dist(rng);
  return Tensor<T>(std::move(shape), std::move(v), grad);
}

// Values spread at least 0.2 away from zero and from each other, so relu and
// max-pool stay differentiable under the finite-difference step.
Tensor<T> spread(Shape shape, std::mt19937_64& rng) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  std::vector<T> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 0.2 * (static_cast<double>(i) - static_cast<double>(n / 2)) + 0.1;
  std::shuffle(v.begin(), v.end(), rng);
  return Tensor<T>(std::move(shape), std::move(v), true);
}

// Non-linear scalar of every output element.
Tensor<T> probe(const Tensor<T>& y) {
  const std::vector<int> label{0};
  return cross_entropy_label_smoothed(reshape(y, {1, y.numel()}), label, 0.1);
}

// relu whose backward deliberately passes twice the gradient.
Tensor<T> faulty_relu(const Tensor<T>& x) {
  std::vector<T> out(x.values().begin(), x.values().end());
  for (auto& v : out) v = std::max(v, T(0));
  auto xn = x.node_ptr();
  return Tensor<T>::make_result(x.shape(), std::move(out), {x}, [xn](const Tensor<T>::Node& self) {
    auto& g = xn->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (xn->values[i] > 0) g[i] += 2 * self.grad[i];
    }
  });
}

CriterionResult check_op(const std::string& name, std::vector<NamedTensor<T>> inputs,
                         const std::function<Tensor<T>()>& loss) {
  GradCheckOptions opt;
  opt.step = 1e-5;
  const GradCheckReport rep = grad_check(loss, inputs, opt);
  CriterionResult r{0, "gradient of " + name, rep.passed, "max rel err " + std::to_string(rep.max_rel_error)};
  return r;
}

}  // namespace

std::vector<CriterionResult> run_property_suite(bool inject_fault) {
  std::vector<CriterionResult> out;
  std::mt19937_64 rng(17);

  {
    auto x = randn({2, 3, 4}, rng), w = randn({5, 4}, rng), b = randn({5}, rng);
    out.push_back(check_op("affine", {{"x", x}, {"w", w}, {"b", b}}, [=] { return probe(affine(x, w, b)); }));
  }
  {
    auto a = randn({2, 3, 4}, rng), b = randn({2, 4, 3}, rng), c = randn({2, 5, 4}, rng);
    out.push_back(check_op("batched_matmul", {{"a", a}, {"b", b}, {"c", c}}, [=] {
      return probe(concat_last(batched_matmul(a, b), batched_matmul(a, c, true)));
    }));
  }
  {
    auto a = randn({3, 2, 4}, rng), b = randn({2, 4}, rng);
    out.push_back(check_op("add with broadcast", {{"a", a}, {"b", b}}, [=] { return probe(add(a, b)); }));
  }
  {
    auto a = randn({2, 3, 2}, rng), b = randn({2, 3, 4}, rng);
    out.push_back(check_op("concat_last", {{"a", a}, {"b", b}}, [=] { return probe(concat_last(a, b)); }));
  }
  {
    auto x = spread({3, 5}, rng);
    out.push_back(check_op("relu", {{"x", x}}, [=] { return probe(relu(x)); }));
  }
  {
    auto x = randn({2, 3, 4}, rng);
    auto w = randn({2, 3, 4}, rng, false);
    // softmax rows sum to 1, so weight them before the probe.
    out.push_back(check_op("softmax_last", {{"x", x}}, [=] { return probe(add(softmax_last(x), w)); }));
  }
  {
    auto x = randn({2, 6, 3}, rng), w = randn({4, 3, 3}, rng), b = randn({4}, rng);
    out.push_back(
        check_op("temporal_conv", {{"x", x}, {"w", w}, {"b", b}}, [=] { return probe(temporal_conv(x, w, b)); }));
  }
  {
    auto x = spread({2, 4, 3}, rng);
    out.push_back(check_op("max_pool", {{"x", x}}, [=] { return probe(max_pool(x, 1).output); }));
  }
  {
    auto x = randn({4, 6}, rng);
    const std::vector<int> labels{0, 5, 2, 2};
    out.push_back(check_op("cross_entropy_label_smoothed", {{"x", x}},
                           [=] { return cross_entropy_label_smoothed(x, labels, 0.1); }));
  }
  {
    auto x = randn({3, 4, 5}, rng);
    BatchNorm<T> bn(5);
    auto g = randn({5}, rng), bt = randn({5}, rng);
    std::copy(g.values().begin(), g.values().end(), bn.gamma().mutable_values().begin());
    std::copy(bt.values().begin(), bt.values().end(), bn.beta().mutable_values().begin());
    out.push_back(check_op("batch_norm (train statistics)",
                           {{"x", x}, {"gamma", bn.gamma()}, {"beta", bn.beta()}},
                           [=]() mutable { return probe(bn.forward(x)); }));
  }
  if (inject_fault) {
    auto x = spread({3, 5}, rng);
    out.push_back(check_op("faulty_relu (injected)", {{"x", x}}, [=] { return probe(faulty_relu(x)); }));
  }

  {
    const Tensor<T> s = softmax_last(randn({50, 25}, rng, false));
    double worst = 0.0;
    for (std::size_t r = 0; r < 50; ++r) {
      double acc = 0.0;
      for (std::size_t j = 0; j < 25; ++j) acc += s.values()[r * 25 + j];
      worst = std::max(worst, std::abs(acc - 1.0));
    }
    out.push_back({0, "softmax rows sum to one", worst <= 1e-12, "max deviation " + std::to_string(worst)});
  }
  {
    const auto pool = max_pool(randn({3, 7, 25, 8}, rng, false), 2);
    std::vector<std::size_t> counts(25, 0);
    for (auto a : pool.argmax) ++counts.at(a);
    std::size_t total = 0;
    for (auto c : counts) total += c;
    out.push_back({0, "max-pool argmax counts sum to N*T*C", total == 3 * 7 * 8, std::to_string(total)});
  }
  {
    auto p = randn({6}, rng);
    const std::vector<T> before(p.values().begin(), p.values().end());
    p.zero_grad();
    AdamState<T> state;
    std::vector<Tensor<T>> params{p};
    for (int i = 0; i < 3; ++i) adam_step<T>(params, state);
    const bool same = std::equal(before.begin(), before.end(), p.values().begin());
    out.push_back({0, "Adam with zero gradient and no decay leaves parameters", same, same ? "unchanged" : "moved"});
  }
  {
    auto x = randn({2, 5, 3}, rng, false);
    std::vector<T> w(3 * 3 * 3, 0.0);
    for (std::size_t c = 0; c < 3; ++c) w[(c * 3 + c) * 3 + 1] = 1.0;
    const Tensor<T> y = temporal_conv(x, Tensor<T>({3, 3, 3}, w));
    const bool same = std::equal(x.values().begin(), x.values().end(), y.values().begin());
    out.push_back({0, "temporal conv with a delta kernel is the identity", same, same ? "exact" : "differs"});
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i + 1);
  return out;
}

}  // namespace sgn
