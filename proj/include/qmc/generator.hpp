#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qmc/state.hpp"

namespace qmc {

struct Transition {
  StateVec target;
  double rate = 0.0;  // events per unit time, > 0
};

using ParamRecord = std::vector<std::pair<std::string, double>>;
using StateFunction = std::function<double(const StateVec&)>;

/// Lazily evaluated conservative, totally stable Q-matrix.
///
/// The raw transition function may emit zero rates and duplicate targets;
/// transitions_of() drops the former, merges the latter and returns the row
/// sorted by target. The diagonal is never stored: q_i is the row sum.
/// Raw functions must be pure and safe to call concurrently.
class GeneratorModel {
 public:
  using RawTransitions = std::function<void(const StateVec& from, std::vector<Transition>& out)>;

  GeneratorModel(std::string name, std::size_t dim, RawTransitions raw, ParamRecord params = {});

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return dim_; }
  const ParamRecord& params() const noexcept { return params_; }

  std::vector<Transition> transitions_of(const StateVec& i) const;

  /// Same as transitions_of, reusing `out` (cleared first).
  void transitions_into(const StateVec& i, std::vector<Transition>& out) const;

 private:
  std::string name_;
  std::size_t dim_;
  RawTransitions raw_;
  ParamRecord params_;
};

/// q_i. Throws UsageError on dimension mismatch, ModelError on a negative or
/// overflowing rate.
double total_rate(const GeneratorModel& model, const StateVec& i);

/// (Omega f)(i) = sum_j q_ij (f(j) - f(i)).
double apply_generator(const GeneratorModel& model, const StateFunction& f, const StateVec& i);

}  // namespace qmc

namespace qmc {

/// Upper bound T(j) on the expected explosion time E_j[zeta] of the minimal
/// process started at j (+inf when nothing is known). Used as exterior data:
/// the maximal solution satisfies z_lambda(j) >= max(0, 1 - lambda*T(j)).
using ExplosionTimeBound = StateFunction;

}  // namespace qmc
