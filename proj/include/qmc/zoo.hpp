#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmc/generator.hpp"

namespace qmc::zoo {

using RateFn = std::function<double(std::int64_t)>;

struct SchloglParams {
  std::int64_t sites = 1;
  double beta0 = 1.0;
  double beta2 = 1.0;
  double delta1 = 1.0;
  double delta3 = 1.0;
  /// Random walk over sites; empty means uniform off-diagonal 1/(sites-1).
  std::vector<std::vector<double>> p;
};

GeneratorModel pure_birth(RateFn rate, std::string name = "pure-birth");

/// Birth n -> n+1 at b(n), death n -> n-1 at a(n). Requires a(0) == 0.
GeneratorModel birth_death(RateFn birth, RateFn death, std::string name = "birth-death");

GeneratorModel schlogl(const SchloglParams& params);

/// Odd states 2m+1 follow q1 at m, even states 2m follow q2 at m; the two
/// sublattices do not communicate unless `bridge` adds 0 <-> 1 at rate 1.
GeneratorModel interleaved(const GeneratorModel& q1, const GeneratorModel& q2, bool bridge = false,
                           std::string name = "interleaved");

double schlogl_birth(const SchloglParams& p, std::int64_t k);
double schlogl_death(const SchloglParams& p, std::int64_t k);

enum class Expected { Unique, NonUnique };

/// Bounded phi with sup phi > 0 and Omega phi >= c phi, built from the exact
/// value of sum_k 1/q_k.
struct NonUniquenessHint {
  StateFunction phi;
  double bound = 0.0;
  double c = 1.0;
  /// Largest level at which phi still resolves in double precision (0: no limit).
  std::int64_t max_cap = 0;
};

/// A zoo model with the answer known analytically, optional exterior
/// explosion-time bound, and the .qm file that describes the same model.
struct Fixture {
  std::string name;
  GeneratorModel model;
  ExplosionTimeBound tail;  // null when no bound is known
  Expected expected;
  std::string qm_file;      // relative to the models/ directory, may be empty
  std::optional<NonUniquenessHint> nonuniqueness = std::nullopt;
};

/// The fixed regression grid: bounded-bd, linear-birth, prime-birth,
/// quadratic-birth, exp2-birth, schlogl-1, schlogl-2, interleaved.
std::vector<Fixture> grid_fixtures();

/// Named constructor used by the CLI. Recognized names: the fixture names
/// above plus "schlogl" (sites, beta0, beta2, delta1, delta3), "cubic-bd",
/// "quartic-bd". Unknown names or parameters raise UsageError.
Fixture make(std::string_view name, const std::map<std::string, double>& params = {});

std::vector<std::string> names();

}  // namespace qmc::zoo
