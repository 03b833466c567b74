#pragma once

// Cross-module invariant battery behind the `verify` command.

#include "core/integrate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rhomb::verify {

struct CheckItem {
  std::string name;
  double m = 0.0;  // 0 for mass-independent items
  double measured = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct VerifyOptions {
  std::vector<double> masses{0.25, 0.5, 1.0};
  // Negative control: perturb zeta by this much before the symmetry check.
  bool break_symmetry = false;
  double symmetry_perturbation = 1e-4;
  int fd_states = 1000;
  std::uint64_t rng_seed = 20240611;
};

struct VerifyReport {
  std::vector<CheckItem> items;
  bool all_passed() const;
};

VerifyReport run(const VerifyOptions& opt = {});

std::string to_json(const VerifyReport& report);
// Throws IoError on malformed input.
VerifyReport from_json(const std::string& text);

}  // namespace rhomb::verify
