#pragma once

// The numbered acceptance checks, shared by the acceptance runner and the
// `selftest` subcommand.

#include <cstdint>
#include <string>
#include <vector>

namespace mahler {

struct AcceptanceOptions {
  unsigned workers = 0;  // 0: worker_count of a default SearchConfig
  std::uint64_t seed = 20240601;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

inline constexpr int kCriterionCount = 11;

/// Runs one check, 1 <= id <= kCriterionCount. Library errors are caught and
/// reported as a failure with the message in `detail`.
CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {});

/// "PASS  3  title  (detail, 0.4s)"
std::string format_result(const CriterionResult& r);

}  // namespace mahler
