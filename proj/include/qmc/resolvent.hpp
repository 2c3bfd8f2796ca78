#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "qmc/generator.hpp"
#include "qmc/kernels.hpp"
#include "qmc/verdict.hpp"
#include "qmc/window.hpp"

namespace qmc {

/// A window together with its compiled transition rows.
struct CompiledWindow {
  std::shared_ptr<const Window> window;
  std::shared_ptr<const WindowRows> rows;
};

CompiledWindow compile_window(const GeneratorModel& model, std::int64_t level_cap,
                              Exec exec = Exec::Parallel,
                              std::size_t max_states = kDefaultWindowStateCap);

/// Lazily built windows of one model, shared between methods. Thread-safe.
class WindowSeries {
 public:
  explicit WindowSeries(GeneratorModel model, Exec exec = Exec::Parallel,
                        std::size_t max_states = kDefaultWindowStateCap);
  CompiledWindow get(std::int64_t level_cap);
  const GeneratorModel& model() const noexcept { return model_; }

 private:
  GeneratorModel model_;
  Exec exec_;
  std::size_t max_states_;
  std::mutex mu_;
  std::map<std::int64_t, CompiledWindow> cache_;
};

/// Pi(lambda) restricted to a window: row i holds q_ij/(lambda+q_i), split into
/// targets inside the window, targets on the boundary, and the killing mass
/// lambda/(lambda+q_i).
struct EmbeddedMatrix {
  CompiledWindow source;
  double lambda = 1.0;
  std::vector<double> interior_mass;
  std::vector<double> boundary_mass;
  std::vector<double> killing_mass;
  std::vector<std::size_t> row_start, col;  // interior entries
  std::vector<double> prob;
  std::vector<std::size_t> brow_start, bcol;  // boundary entries, bcol indexes window.boundary
  std::vector<double> bprob;

  const Window& window() const { return *source.window; }
  std::size_t size() const noexcept { return interior_mass.size(); }
};

EmbeddedMatrix build_embedded(const CompiledWindow& cw, double lambda);
EmbeddedMatrix build_embedded(const GeneratorModel& model, double lambda, std::int64_t level_cap,
                              Exec exec = Exec::Parallel);

struct BracketOptions {
  double tol = 1e-12;
  std::size_t max_iter = 1'000'000;
  Exec exec = Exec::Parallel;
  ExplosionTimeBound tail;  // exterior data for the lower sequence; null = none
};

/// lower <= z_lambda <= upper pointwise on the window.
struct SolutionBracket {
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t iterations = 0;
  double gap = 0.0;
  bool converged = true;  // false: max_iter hit, the bracket is still valid but loose
};

/// max(0, 1 - lambda * T(b)) for every boundary state b (0 without a tail).
std::vector<double> exterior_lower_values(const Window& window, double lambda,
                                          const ExplosionTimeBound& tail);

/// Bracket for the maximal solution of (lambda - Q)u = 0, 0 <= u <= 1.
///
/// Upper: iterate u <- Pi u from u = 1 with boundary value 1; the iterates
/// are non-increasing and dominate z_lambda at every step. Lower: iterate
/// from u = 0 with boundary value L(b) = max(0, 1 - lambda T(b)); the iterates
/// are non-decreasing and stay below z_lambda. Without a tail bound the lower
/// sequence is identically 0.
SolutionBracket maximal_solution_bracket(const EmbeddedMatrix& pi, const BracketOptions& opts = {});
SolutionBracket maximal_solution_bracket(const GeneratorModel& model, double lambda,
                                         std::int64_t level_cap, const BracketOptions& opts = {});

/// Partial sums of lambda P^min(lambda) 1 = sum_n Pi^n (lambda/(lambda+q)) on
/// the window, exterior contributing 0. Stops early once a term adds nothing.
struct ResolventMass {
  std::vector<double> mass;
  std::size_t terms = 0;
};

ResolventMass resolvent_mass(const EmbeddedMatrix& pi, std::size_t n_terms, Exec exec = Exec::Parallel);
ResolventMass resolvent_mass(const GeneratorModel& model, double lambda, std::int64_t level_cap,
                             std::size_t n_terms, Exec exec = Exec::Parallel);

struct ChainVerdictOptions {
  std::vector<std::int64_t> cap_schedule = default_cap_schedule();
  VerdictThresholds thresholds;
  std::optional<StateVec> reference;  // default: all-zeros state
  BracketOptions bracket;
  std::size_t max_window_states = kDefaultVerdictWindowStates;  // larger caps are dropped with a note
  WindowSeries* windows = nullptr;    // optional shared cache
};

/// Criterion (C3) on a cap schedule. Rules, in order:
///   lower(ref) > positive at any cap               -> NonUnique
///   upper(ref) < zero at the largest cap and
///   non-increasing along the schedule              -> Unique
///   deficit -log upper(ref) diverging / plateauing -> Unique / NonUnique
///   otherwise                                      -> Inconclusive
ChainVerdict uniqueness_verdict_resolvent(const GeneratorModel& model, double lambda,
                                          const ChainVerdictOptions& opts = {});

}  // namespace qmc
