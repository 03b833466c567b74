#pragma once

// Append-only text store of converged orbits, one record per line:
//
//   v=1 m=<m> zeta=<zeta> E=<E> period=<T> frequency=<w> n=<n>
//       a=<a0>,<a1>,... b=... c=... d=... period_residual=<r> zeta1=<z1>
//       fit_residual=<f>
//
// (on a single line). Blank lines and lines starting with '#' are ignored.
// When several records share the same m, the last one wins.

#include "core/orbit_types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rhomb::orbit_store {

std::string format_record(const OrbitSolution& orbit);
// Throws IoError on malformed input or unknown keys.
OrbitSolution parse_record(const std::string& line);

void append(const std::string& path, const OrbitSolution& orbit);
// Newest record per m, sorted by m. A missing file is an empty store.
std::vector<OrbitSolution> load(const std::string& path);
std::optional<OrbitSolution> nearest(const std::string& path, double m);

}  // namespace rhomb::orbit_store
