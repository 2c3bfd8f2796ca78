#include "qmc/verdict.hpp"

#include <cmath>

#include "qmc/error.hpp"
#include "qmc/window.hpp"

namespace qmc {

std::string_view to_string(Evidence e) {
  switch (e) {
    case Evidence::Unique: return "Unique";
    case Evidence::NonUnique: return "NonUnique";
    case Evidence::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string_view to_string(Trend t) {
  switch (t) {
    case Trend::Diverging: return "diverging";
    case Trend::Converging: return "converging";
    case Trend::Undecided: return "undecided";
  }
  return "?";
}

Trend deficit_trend(std::span<const double> deficits, const VerdictThresholds& t) {
  const std::size_t n = deficits.size();
  if (n < 2) return Trend::Undecided;
  for (double d : deficits)
    if (!std::isfinite(d)) return Trend::Undecided;
  const double last = deficits[n - 1] - deficits[n - 2];
  if (std::abs(last) <= t.plateau) return Trend::Converging;
  if (n < 4) return Trend::Undecided;
  const double d1 = deficits[n - 3] - deficits[n - 4];
  const double d2 = deficits[n - 2] - deficits[n - 3];
  const double d3 = last;
  if (d1 <= t.plateau || d2 <= t.plateau || d3 <= 0.0) return Trend::Undecided;
  const double r1 = d2 / d1;
  const double r2 = d3 / d2;
  if (r1 >= t.ratio_diverge && r2 >= t.ratio_diverge) return Trend::Diverging;
  if (r1 <= t.ratio_converge && r2 <= t.ratio_converge) return Trend::Converging;
  return Trend::Undecided;
}

std::vector<std::int64_t> default_cap_schedule() {
  std::vector<std::int64_t> caps;
  for (int k = 0; k < 8; ++k) caps.push_back(std::int64_t{25} << k);
  return caps;
}

std::vector<std::int64_t> trim_schedule(std::span<const std::int64_t> caps, std::size_t dim,
                                        std::size_t max_states) {
  std::vector<std::int64_t> out;
  for (auto cap : caps) {
    if (simplex_count(dim, cap) > max_states) break;
    out.push_back(cap);
  }
  if (out.empty() && !caps.empty())
    throw ResourceError("window with level_cap " + std::to_string(caps.front()) + " in dimension " +
                        std::to_string(dim) + " has more than " + std::to_string(max_states) + " states");
  return out;
}

}  // namespace qmc
