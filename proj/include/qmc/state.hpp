#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace qmc {

/// Point of Z_+^d. Immutable; ordered by level first, then by descending
/// lexicographic coordinates, so that (0,0) < (1,0) < (0,1) < (2,0) < ...
class StateVec {
 public:
  StateVec() = default;
  explicit StateVec(std::vector<std::int64_t> coords);
  StateVec(std::initializer_list<std::int64_t> coords);

  static StateVec zeros(std::size_t dim);

  std::size_t dim() const noexcept { return coords_.size(); }
  std::int64_t level() const noexcept { return level_; }
  std::int64_t operator[](std::size_t u) const { return coords_[u]; }
  std::span<const std::int64_t> coords() const noexcept { return coords_; }

  /// this + delta, or nullopt if a coordinate would become negative.
  /// Throws ResourceError on int64 overflow.
  std::optional<StateVec> shifted(std::span<const std::int64_t> delta) const;

  std::string str() const;

  friend bool operator==(const StateVec& a, const StateVec& b) noexcept {
    return a.coords_ == b.coords_;
  }
  friend std::strong_ordering operator<=>(const StateVec& a, const StateVec& b) noexcept;

 private:
  std::vector<std::int64_t> coords_;
  std::int64_t level_ = 0;
};

std::ostream& operator<<(std::ostream& os, const StateVec& s);

struct StateHash {
  std::size_t operator()(const StateVec& s) const noexcept;
};

}  // namespace qmc
