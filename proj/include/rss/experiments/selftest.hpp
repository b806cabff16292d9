#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rss {

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick invariant suites: target gradients against central differences,
/// pointwise detailed balance for the density-based kernels (including the
/// marginalized ones), degenerate-wrapper trace identity, the classical
/// optimal acceptance rates, adaptation arithmetic and config round trip.
std::vector<SelftestResult> run_selftest(std::uint64_t seed);

}  // namespace rss
