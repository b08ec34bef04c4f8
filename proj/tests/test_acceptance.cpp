// Acceptance suite: every criterion prints one pass/fail line and the whole
// binary fails when any criterion does.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cstdio>

#include "condstein/validate.hpp"

using namespace condstein;

TEST_CASE("acceptance criteria") {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<CheckResult> results = run_validation_suite("all", kValidationSeed);
  std::sort(results.begin(), results.end(),
            [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
  for (const auto& r : results) {
    std::printf("[%s] %d. %s — %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds);
    CHECK_MESSAGE(r.passed, (r.name + ": " + r.detail));
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("acceptance suite wall time: %.2f s\n", elapsed);
  CHECK(elapsed < 360.0);
}
