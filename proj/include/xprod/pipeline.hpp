#pragma once

// Verification pipelines behind the command-line tool. Each produces a
// Report whose JSON form is canonical; markdown is rendered from it.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xprod/io.hpp"

namespace xprod {

struct Check {
  std::string name;
  /// The piece of theory the check exercises.
  std::string anchor;
  bool pass = false;
  std::string detail;
  Json metrics = Json::object();
};

struct Report {
  std::string command;
  std::vector<Check> checks;
  Json data = Json::object();

  bool pass() const;
  /// 0 when every check passes, 1 otherwise.
  int exit_code() const { return pass() ? 0 : 1; }
};

Json to_json(const Report& report);
std::string to_markdown(const Report& report);

struct RunConfig {
  Tolerances tol;
  int frontier_radius = 2;
  int trials = 200;
  std::uint64_t seed = 0;
  double trivialization_tol = 1.0;
};

/// Validation, Fourier projections, algebra laws, the boundary sequence,
/// representations and pure states, and the essential-ideal check.
Report run_verify(const SampledSystem& system, const RunConfig& config);

/// Structure isomorphism certificate plus sequence exactness.
Report run_isomorphism(const SampledSystem& system, const RunConfig& config);

/// With `forward`: checks the class map from A's quotient to B's and the
/// induced isomorphism. With `recover`: composes the two structure maps
/// with the identity on coordinates and recovers the class map.
Report run_classify(const SampledSystem& a, const SampledSystem& b, const std::optional<std::vector<ClassId>>& forward,
                    bool recover, const RunConfig& config);

}  // namespace xprod
