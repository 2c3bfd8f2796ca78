#include "qmc/state.hpp"

#include <limits>
#include <sstream>

#include "qmc/error.hpp"

namespace qmc {

StateVec::StateVec(std::vector<std::int64_t> coords) : coords_(std::move(coords)) {
  for (auto c : coords_) {
    if (c < 0) throw PreconditionError("state coordinates must be nonnegative: " + str());
    if (level_ > std::numeric_limits<std::int64_t>::max() - c)
      throw ResourceError("state level overflows int64");
    level_ += c;
  }
}

StateVec::StateVec(std::initializer_list<std::int64_t> coords)
    : StateVec(std::vector<std::int64_t>(coords)) {}

StateVec StateVec::zeros(std::size_t dim) { return StateVec(std::vector<std::int64_t>(dim, 0)); }

std::optional<StateVec> StateVec::shifted(std::span<const std::int64_t> delta) const {
  std::vector<std::int64_t> out(coords_.begin(), coords_.end());
  for (std::size_t u = 0; u < out.size() && u < delta.size(); ++u) {
    const auto d = delta[u];
    if (d > 0 && out[u] > std::numeric_limits<std::int64_t>::max() - d)
      throw ResourceError("coordinate overflow at " + str());
    out[u] += d;
    if (out[u] < 0) return std::nullopt;
  }
  return StateVec(std::move(out));
}

std::string StateVec::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t u = 0; u < coords_.size(); ++u) {
    if (u) os << ',';
    os << coords_[u];
  }
  os << ')';
  return os.str();
}

std::strong_ordering operator<=>(const StateVec& a, const StateVec& b) noexcept {
  if (auto c = a.level_ <=> b.level_; c != 0) return c;
  if (auto c = a.coords_.size() <=> b.coords_.size(); c != 0) return c;
  for (std::size_t u = 0; u < a.coords_.size(); ++u) {
    // descending: more mass on earlier sites comes first
    if (auto c = b.coords_[u] <=> a.coords_[u]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const StateVec& s) { return os << s.str(); }

std::size_t StateHash::operator()(const StateVec& s) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto c : s.coords()) {
    h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

}  // namespace qmc
