#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmc/generator.hpp"
#include "qmc/kernels.hpp"
#include "qmc/verdict.hpp"
#include "qmc/window.hpp"

namespace qmc {

enum class CertificateKind { Uniqueness, CorollaryUniqueness, NonUniqueness };
enum class Support { Supported, Violated, Inconclusive };

std::string_view to_string(CertificateKind k);
std::string_view to_string(Support s);

/// A drift certificate checked on finite windows {level <= cap}.
struct LyapunovCertificate {
  StateFunction phi;
  double c = 0.0;
  /// Level caps whose shells feed the growth check, strictly increasing and
  /// not above the checked cap. Empty: cap/8, cap/4, cap/2, cap.
  std::vector<std::int64_t> window_family;
  CertificateKind kind = CertificateKind::Uniqueness;
  std::optional<double> bound;       // B with phi <= B, required for NonUniqueness
  /// Bounded-rate declaration: the states selected by `infinite_part` (all
  /// states when it is empty) lie in every E_n and have q <= rate_bound.
  std::optional<double> rate_bound;
  std::function<bool(const StateVec&)> infinite_part;
};

struct Violation {
  StateVec state;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string condition;  // "drift", "phi >= q", "phi <= B", "sup phi > 0", "rate bound"
};

struct CertificateReport {
  Support verdict = Support::Inconclusive;
  std::vector<Violation> violations;  // canonical state order, at most max_violations kept
  std::size_t violation_count = 0;
  std::vector<double> growth_trace;   // min phi on each shell of the window family
  double growth_threshold = 0.0;
  std::size_t checked_states = 0;
  double c = 0.0;
  std::vector<std::string> notes;
};

struct CheckOptions {
  Exec exec = Exec::Parallel;
  double tol_rel = 1e-9;     // tolerance 1e-9 * (1 + |c phi(i)|)
  double growth_floor = 10.0;
  std::size_t max_violations = 1000;
  std::size_t max_states = kDefaultWindowStateCap;
};

/// Omega phi <= c phi on the window plus growth of phi along the window family.
/// Supported is finite-window evidence only.
CertificateReport check_uniqueness_certificate(const GeneratorModel& model,
                                               const LyapunovCertificate& cert,
                                               std::int64_t level_cap,
                                               const CheckOptions& opts = {});

/// phi >= q and Omega phi <= c phi on the window.
CertificateReport check_corollary_certificate(const GeneratorModel& model, const StateFunction& phi,
                                              double c, std::int64_t level_cap,
                                              const CheckOptions& opts = {});

/// Omega phi >= c phi, phi <= B, and max phi > 0 on the window; c must be > 0.
CertificateReport check_nonuniqueness_certificate(const GeneratorModel& model,
                                                  const LyapunovCertificate& cert,
                                                  std::int64_t level_cap,
                                                  const CheckOptions& opts = {});

/// Tight windowed drift constant: max of Omega phi / phi over states with
/// phi > 0. nullopt when phi vanishes somewhere with Omega phi > 0.
std::optional<double> scan_drift_constant(const GeneratorModel& model, const StateFunction& phi,
                                          std::int64_t level_cap, Exec exec = Exec::Parallel);

/// Smallest gamma with gamma * phi >= q on the window (nullopt if phi = 0
/// where q > 0).
std::optional<double> scan_dominating_scale(const GeneratorModel& model, const StateFunction& phi,
                                            std::int64_t level_cap, Exec exec = Exec::Parallel);

enum class SeriesClass { Diverges, Converges, Inconclusive };
std::string_view to_string(SeriesClass s);

struct SeriesOptions {
  double margin = 0.25;        // power-law band around slope -1
  double margin2 = 0.1;        // beta <= 1 + margin2 reads as divergent
  double converge_beta = 1.3;  // beta >= this reads as convergent
};

struct SeriesReport {
  SeriesClass verdict = SeriesClass::Inconclusive;
  double slope = 0.0;       // log t(n) against log n over [n_max/2, n_max]
  double halfwidth = 0.0;   // 95% half-width of the slope
  std::optional<double> beta;  // log t(n) ~ -log n - beta log log n, fitted in the critical band
  double partial_sum = 0.0;
  std::int64_t n_max = 0;
};

/// Decides convergence of sum_{n>=1} t(n) from its first n_max terms.
SeriesReport classify_series(const std::function<double(std::int64_t)>& terms, std::int64_t n_max,
                             const SeriesOptions& opts = {});

struct SeriesVerdict {
  Evidence evidence = Evidence::Inconclusive;
  SeriesReport series;
};

/// Pure birth with q_{n,n+1} = rate(n): unique iff sum_n 1/rate(n) diverges.
SeriesVerdict pure_birth_verdict(const std::function<double(std::int64_t)>& rate,
                                 std::int64_t n_max = 100'000, const SeriesOptions& opts = {});

}  // namespace qmc
