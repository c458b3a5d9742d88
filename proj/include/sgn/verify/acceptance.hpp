#pragma once

#include <filesystem>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace sgn {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::filesystem::path fixture_dir;  // holds ntu/*.skeleton
  std::filesystem::path work_dir;     // scratch space for training runs; empty: a temp dir
  std::ostream* log = nullptr;
  std::set<int> only;                 // empty: all criteria
};

// Runs the numbered acceptance criteria 1-11 and returns one result each.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

// Primitive-level properties: gradient checks of every op, softmax and pooling
// invariants, optimizer and convolution identities. With `inject_fault` an op
// with a deliberately wrong backward joins the gradient checks and must be
// reported by name.
std::vector<CriterionResult> run_property_suite(bool inject_fault = false);

}  // namespace sgn
