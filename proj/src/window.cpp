#include "qmc/window.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"
#include "qmc/error.hpp"

namespace qmc {

std::optional<std::size_t> Window::find(const StateVec& s) const {
  auto it = index.find(s);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::size_t simplex_count(std::size_t dim, std::int64_t cap) {
  if (cap < 0) return 0;
  // C(cap + dim, dim), computed incrementally; saturates on overflow.
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  unsigned __int128 acc = 1;
  for (std::size_t k = 1; k <= dim; ++k) {
    acc = acc * static_cast<unsigned __int128>(static_cast<std::uint64_t>(cap) + k) / k;
    if (acc > kMax) return kMax;
  }
  return static_cast<std::size_t>(acc);
}

namespace {

// Compositions of `level` into coords[pos..], first coordinate descending.
void emit_level(std::vector<std::int64_t>& coords, std::size_t pos, std::int64_t remaining,
                std::vector<StateVec>& out) {
  if (pos + 1 == coords.size()) {
    coords[pos] = remaining;
    out.emplace_back(coords);
    return;
  }
  for (std::int64_t c = remaining; c >= 0; --c) {
    coords[pos] = c;
    emit_level(coords, pos + 1, remaining - c, out);
  }
  coords[pos] = 0;
}

}  // namespace

Window enumerate_window(const GeneratorModel& model, std::int64_t level_cap,
                        std::size_t max_states) {
  if (level_cap < 0) throw UsageError("level_cap must be >= 0");
  const std::size_t dim = model.dimension();
  const std::size_t count = simplex_count(dim, level_cap);
  if (count > max_states) {
    std::ostringstream os;
    os << "window with level_cap " << level_cap << " in dimension " << dim << " has " << count
       << " states, above the cap of " << max_states << "; use a smaller level_cap";
    throw ResourceError(os.str());
  }

  Window w;
  w.level_cap = level_cap;
  w.states.reserve(count);
  std::vector<std::int64_t> coords(dim, 0);
  for (std::int64_t level = 0; level <= level_cap; ++level) emit_level(coords, 0, level, w.states);
  w.index.reserve(count);
  for (std::size_t k = 0; k < w.states.size(); ++k) w.index.emplace(w.states[k], k);

  // Targets are computed per row, then merged serially so the result does
  // not depend on scheduling.
  std::vector<std::vector<StateVec>> exits(w.states.size());
  detail::for_each_index(Exec::Parallel, w.states.size(), [&](std::size_t k) {
    thread_local std::vector<Transition> buf;
    model.transitions_into(w.states[k], buf);
    for (auto& t : buf)
      if (t.target.level() > level_cap) exits[k].push_back(t.target);
  });
  for (auto& e : exits)
    for (auto& s : e) w.boundary.push_back(std::move(s));
  std::sort(w.boundary.begin(), w.boundary.end());
  w.boundary.erase(std::unique(w.boundary.begin(), w.boundary.end()), w.boundary.end());
  return w;
}

WindowRows compile_rows(const GeneratorModel& model, const Window& window, Exec exec) {
  const std::size_t n = window.size();
  std::vector<std::vector<Transition>> rows(n);
  detail::for_each_index(exec, n, [&](std::size_t k) {
    model.transitions_into(window.states[k], rows[k]);
  });

  std::unordered_map<StateVec, std::size_t, StateHash> boundary_index;
  boundary_index.reserve(window.boundary.size());
  for (std::size_t b = 0; b < window.boundary.size(); ++b)
    boundary_index.emplace(window.boundary[b], b);

  WindowRows out;
  out.total_rate.resize(n);
  out.row_start.resize(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) out.row_start[k + 1] = out.row_start[k] + rows[k].size();
  out.col.resize(out.row_start[n]);
  out.rate.resize(out.row_start[n]);
  for (std::size_t k = 0; k < n; ++k) {
    double q = 0.0;
    std::size_t pos = out.row_start[k];
    for (const auto& t : rows[k]) {
      q += t.rate;
      if (auto it = window.index.find(t.target); it != window.index.end()) {
        out.col[pos] = it->second;
      } else if (auto bt = boundary_index.find(t.target); bt != boundary_index.end()) {
        out.col[pos] = n + bt->second;
      } else {
        throw ModelError("transition target " + t.target.str() + " from " +
                         window.states[k].str() + " is neither in the window nor its boundary");
      }
      out.rate[pos] = t.rate;
      ++pos;
    }
    if (!std::isfinite(q)) throw RateOverflowError("total rate overflows at state " + window.states[k].str());
    out.total_rate[k] = q;
  }
  return out;
}

}  // namespace qmc
