#include "qmc/generator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmc/error.hpp"

namespace qmc {

GeneratorModel::GeneratorModel(std::string name, std::size_t dim, RawTransitions raw,
                               ParamRecord params)
    : name_(std::move(name)), dim_(dim), raw_(std::move(raw)), params_(std::move(params)) {
  if (dim_ == 0) throw UsageError("model dimension must be >= 1");
  if (!raw_) throw UsageError("model '" + name_ + "' has no transition function");
}

std::vector<Transition> GeneratorModel::transitions_of(const StateVec& i) const {
  std::vector<Transition> out;
  transitions_into(i, out);
  return out;
}

void GeneratorModel::transitions_into(const StateVec& i, std::vector<Transition>& out) const {
  if (i.dim() != dim_) {
    std::ostringstream os;
    os << "state " << i << " has dimension " << i.dim() << ", model '" << name_ << "' expects "
       << dim_;
    throw UsageError(os.str());
  }
  out.clear();
  raw_(i, out);

  for (const auto& t : out) {
    if (t.target.dim() != dim_ || t.target == i || std::isnan(t.rate) || t.rate < 0.0 ||
        std::isinf(t.rate)) {
      std::ostringstream os;
      os << "model '" << name_ << "': ";
      if (t.target.dim() != dim_)
        os << "transition target " << t.target << " has wrong dimension";
      else if (t.target == i)
        os << "self-transition";
      else if (std::isinf(t.rate))
        os << "rate overflow (inf)";
      else
        os << "invalid rate " << t.rate;
      os << " at state " << i << " -> " << t.target;
      if (std::isinf(t.rate)) throw RateOverflowError(os.str());
      throw ModelError(os.str());
    }
  }
  std::erase_if(out, [](const Transition& t) { return t.rate == 0.0; });
  std::sort(out.begin(), out.end(),
            [](const Transition& a, const Transition& b) { return a.target < b.target; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (w > 0 && out[w - 1].target == out[r].target) {
      out[w - 1].rate += out[r].rate;
    } else {
      if (w != r) out[w] = std::move(out[r]);
      ++w;
    }
  }
  out.resize(w);
  for (const auto& t : out)
    if (std::isinf(t.rate))
      throw RateOverflowError("model '" + name_ + "': merged rate overflows at state " + i.str());
}

double total_rate(const GeneratorModel& model, const StateVec& i) {
  double q = 0.0;
  for (const auto& t : model.transitions_of(i)) q += t.rate;
  if (!std::isfinite(q)) throw RateOverflowError("total rate overflows at state " + i.str());
  return q;
}

double apply_generator(const GeneratorModel& model, const StateFunction& f, const StateVec& i) {
  const double fi = f(i);
  if (!std::isfinite(fi)) throw EvaluationError("function is not finite at state " + i.str());
  double acc = 0.0;
  for (const auto& t : model.transitions_of(i)) {
    const double fj = f(t.target);
    if (!std::isfinite(fj))
      throw EvaluationError("function is not finite at state " + t.target.str());
    acc += t.rate * (fj - fi);
  }
  return acc;
}

}  // namespace qmc
