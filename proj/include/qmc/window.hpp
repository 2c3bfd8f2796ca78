#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qmc/generator.hpp"
#include "qmc/kernels.hpp"
#include "qmc/state.hpp"

namespace qmc {

inline constexpr std::size_t kDefaultWindowStateCap = 5'000'000;

/// Finite truncation E_N = {i : |i| <= N} plus its one-step exterior.
struct Window {
  std::int64_t level_cap = 0;
  std::vector<StateVec> states;    // canonical order
  std::vector<StateVec> boundary;  // canonical order, disjoint from states
  std::unordered_map<StateVec, std::size_t, StateHash> index;

  std::size_t size() const noexcept { return states.size(); }
  std::optional<std::size_t> find(const StateVec& s) const;
};

/// Number of states of Z_+^d with level <= cap, saturating at SIZE_MAX.
std::size_t simplex_count(std::size_t dim, std::int64_t cap);

Window enumerate_window(const GeneratorModel& model, std::int64_t level_cap,
                        std::size_t max_states = kDefaultWindowStateCap);

/// Transition rates of a window in CSR form. Column c < size() is an interior
/// state index; c >= size() refers to boundary[c - size()].
struct WindowRows {
  std::vector<double> total_rate;
  std::vector<std::size_t> row_start;
  std::vector<std::size_t> col;
  std::vector<double> rate;

  std::size_t rows() const noexcept { return total_rate.size(); }
};

WindowRows compile_rows(const GeneratorModel& model, const Window& window,
                        Exec exec = Exec::Parallel);

}  // namespace qmc
