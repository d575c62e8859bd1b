#pragma once

// Acceptance suite shared by the acceptance test binary and `arcoh selftest`.

#include <functional>
#include <string>
#include <vector>

namespace acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

using Reporter = std::function<void(const CriterionResult&)>;

/// Runs the selected criteria (all when `only` is empty), reporting each as it finishes.
std::vector<CriterionResult> run(const std::vector<int>& only = {}, const Reporter& report = {});

std::string format(const CriterionResult& result);

inline constexpr int kCriterionCount = 10;

}  // namespace acceptance
