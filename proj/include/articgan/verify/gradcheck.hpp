#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace artic::verify {

inline constexpr double kPrimitiveTolerance = 1e-4;
inline constexpr double kCompositeTolerance = 1e-3;

/// ||a - n|| / max(||a||, ||n||, 1e-8).
double relative_error(std::span<const double> analytic, std::span<const double> numeric);

struct CheckResult {
  std::string name;
  std::size_t instances = 0;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  /// Directions discarded because they crossed a non-smooth point.
  std::size_t redraws = 0;
  bool passed() const { return max_rel_error < tolerance; }
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// autodiff, generator, critic, physical, gp.
std::vector<std::string_view> gradcheck_suites();

/// Runs `trials` seeded random instances of every check in the suite,
/// comparing reverse-mode gradients to central finite differences. Zero
/// trials yields a report with no checks.
SuiteReport run_gradcheck(std::string_view suite, std::size_t trials, std::uint64_t seed);

}  // namespace artic::verify
