#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qmc/error.hpp"
#include "qmc/primes.hpp"
#include "qmc/resolvent.hpp"
#include "qmc/zoo.hpp"

using namespace qmc;

namespace {

GeneratorModel absorbing() {
  return GeneratorModel("absorbing", 1, [](const StateVec&, std::vector<Transition>&) {});
}

// Up to 5, then back down: every orbit stays in {0..max(5, start)}.
GeneratorModel finite_orbit() {
  return GeneratorModel("finite", 1, [](const StateVec& s, std::vector<Transition>& out) {
    if (s[0] < 5) out.push_back({StateVec{s[0] + 1}, 1.0 + s[0]});
    if (s[0] >= 5) out.push_back({StateVec{s[0] - 1}, 2.0});
  });
}

std::int64_t small_cap(const GeneratorModel& m) { return m.dimension() == 1 ? 400 : 50; }

std::vector<zoo::Fixture> fixtures() {
  auto fx = zoo::grid_fixtures();
  fx.push_back(zoo::make("cubic-bd"));
  fx.push_back(zoo::make("quartic-bd"));
  return fx;
}

}  // namespace

TEST(Embedded, AbsorbingState) {
  const auto pi = build_embedded(absorbing(), 1.0, 3);
  for (std::size_t i = 0; i < pi.size(); ++i) {
    EXPECT_EQ(pi.killing_mass[i], 1.0);
    EXPECT_EQ(pi.interior_mass[i], 0.0);
    EXPECT_EQ(pi.boundary_mass[i], 0.0);
  }
}

TEST(Embedded, LinearBirth) {
  const auto pi = build_embedded(zoo::make("linear-birth").model, 1.0, 10);
  for (std::size_t k = 0; k <= 10; ++k) {
    const double p = (k + 1.0) / (k + 2.0);
    EXPECT_DOUBLE_EQ(pi.interior_mass[k] + pi.boundary_mass[k], p);
    EXPECT_DOUBLE_EQ(pi.killing_mass[k], 1.0 / (k + 2.0));
  }
  EXPECT_EQ(pi.interior_mass[10], 0.0);
  EXPECT_EQ(pi.boundary_mass[9], 0.0);
  EXPECT_EQ(pi.window().boundary, std::vector<StateVec>{StateVec{11}});
}

TEST(Embedded, BoundedBirthDeathAtLambdaTwo) {
  const auto pi = build_embedded(zoo::make("bounded-bd").model, 2.0, 20);
  for (std::size_t k = 1; k < 20; ++k) {
    ASSERT_EQ(pi.row_start[k + 1] - pi.row_start[k], 2u);
    for (std::size_t e = pi.row_start[k]; e < pi.row_start[k + 1]; ++e) EXPECT_DOUBLE_EQ(pi.prob[e], 0.25);
    EXPECT_DOUBLE_EQ(pi.killing_mass[k], 0.5);
  }
}

TEST(Embedded, LambdaMustBePositive) {
  const auto m = zoo::make("linear-birth").model;
  EXPECT_THROW(build_embedded(m, 0.0, 5), PreconditionError);
  EXPECT_THROW(build_embedded(m, -1.0, 5), PreconditionError);
  EXPECT_THROW(build_embedded(m, NAN, 5), PreconditionError);
}

TEST(Embedded, RowsAreSubstochastic) {
  for (const auto& fx : fixtures())
    for (const double lambda : {0.5, 1.0, 2.0}) {
      const auto pi = build_embedded(fx.model, lambda, small_cap(fx.model));
      for (std::size_t i = 0; i < pi.size(); ++i) {
        double interior = 0.0, boundary = 0.0;
        for (std::size_t e = pi.row_start[i]; e < pi.row_start[i + 1]; ++e) interior += pi.prob[e];
        for (std::size_t e = pi.brow_start[i]; e < pi.brow_start[i + 1]; ++e) boundary += pi.bprob[e];
        EXPECT_NEAR(interior, pi.interior_mass[i], 1e-12);
        EXPECT_NEAR(boundary, pi.boundary_mass[i], 1e-12);
        ASSERT_NEAR(pi.interior_mass[i] + pi.boundary_mass[i] + pi.killing_mass[i], 1.0, 1e-12) << fx.name;
        ASSERT_GE(std::min({pi.interior_mass[i], pi.boundary_mass[i], pi.killing_mass[i]}), 0.0);
      }
    }
}

TEST(Bracket, FiniteOrbitIsExactlyZero) {
  const auto br = maximal_solution_bracket(finite_orbit(), 1.0, 12);
  for (std::size_t i = 0; i < br.upper.size() - 1; ++i) {
    EXPECT_EQ(br.upper[i], 0.0) << i;
    EXPECT_EQ(br.lower[i], 0.0) << i;
  }
  EXPECT_TRUE(br.converged);
  const auto abs = maximal_solution_bracket(absorbing(), 1.0, 5);
  for (double u : abs.upper) EXPECT_EQ(u, 0.0);
}

TEST(Bracket, LinearBirthProduct) {
  // 999 factors (k+1)/(k+2): the window {0..998}
  const auto br = maximal_solution_bracket(zoo::make("linear-birth").model, 1.0, 998);
  EXPECT_NEAR(br.upper[0], 1e-3, 1e-12);
  EXPECT_EQ(br.lower[0], 0.0);
}

TEST(Bracket, Exp2AtCapSixty) {
  const auto fx = zoo::make("exp2-birth");
  BracketOptions opts;
  opts.tol = 1e-12;
  opts.tail = fx.tail;
  const auto br = maximal_solution_bracket(fx.model, 1.0, 60, opts);
  EXPECT_LT(br.upper[0] - br.lower[0], 1e-8);
  EXPECT_GT(br.lower[0], 0.1);
  EXPECT_GT(br.upper[0], 0.1);
  const auto product = oracle::birth_product([](std::int64_t k) { return std::ldexp(1.0, static_cast<int>(k)); }, 1.0, 61);
  EXPECT_NEAR(br.upper[0], product, 1e-12);
  const auto dense = oracle::window_solve(fx.model, 1.0, 60, [&](const StateVec& s) {
    return std::max(0.0, 1.0 - fx.tail(s));
  });
  EXPECT_NEAR(br.lower[0], dense[0], 1e-10);
}

TEST(Bracket, ProductOracle) {
  const std::vector<std::pair<std::string, std::function<double(std::int64_t)>>> births = {
      {"linear-birth", [](std::int64_t k) { return k + 1.0; }},
      {"quadratic-birth", [](std::int64_t k) { return (k + 1.0) * (k + 1.0); }},
      {"prime-birth", [](std::int64_t k) { return static_cast<double>(nth_prime(k + 1)); }},
      {"exp2-birth", [](std::int64_t k) { return std::ldexp(1.0, static_cast<int>(k)); }},
  };
  for (const auto& [name, q] : births) {
    const auto m = zoo::make(name).model;
    for (const double lambda : {0.5, 1.0, 2.0})
      for (const std::int64_t n : {10, 100, 1000}) {
        const auto br = maximal_solution_bracket(m, lambda, n - 1);
        EXPECT_NEAR(br.upper[0], oracle::birth_product(q, lambda, n), 1e-10) << name << " N=" << n;
      }
  }
}

TEST(Bracket, DenseOracle) {
  for (const auto& fx : fixtures()) {
    const std::int64_t cap = fx.model.dimension() == 1 ? (fx.name == "exp2-birth" ? 200 : 1500) : 60;
    for (const double lambda : {0.5, 2.0}) {
      BracketOptions opts;
      opts.tail = fx.tail;
      const auto br = maximal_solution_bracket(fx.model, lambda, cap, opts);
      const auto up = oracle::window_solve(fx.model, lambda, cap, [](const StateVec&) { return 1.0; });
      const auto ext = exterior_lower_values(enumerate_window(fx.model, cap), lambda, fx.tail);
      const auto w = enumerate_window(fx.model, cap);
      const auto lo = oracle::window_solve(fx.model, lambda, cap, [&](const StateVec& s) {
        const auto it = std::find(w.boundary.begin(), w.boundary.end(), s);
        return ext[it - w.boundary.begin()];
      });
      for (std::size_t i = 0; i < up.size(); ++i) {
        ASSERT_NEAR(br.upper[i], up[i], 1e-8) << fx.name << " " << w.states[i];
        ASSERT_NEAR(br.lower[i], lo[i], 1e-8) << fx.name << " " << w.states[i];
      }
    }
  }
}

TEST(Bracket, NonConvergenceIsTagged) {
  BracketOptions opts;
  opts.max_iter = 3;
  const auto br = maximal_solution_bracket(zoo::make("schlogl-2").model, 1.0, 40, opts);
  EXPECT_FALSE(br.converged);
  EXPECT_EQ(br.iterations, 3u);
  for (std::size_t i = 0; i < br.upper.size(); ++i) EXPECT_LE(br.lower[i], br.upper[i]);
}

TEST(Bracket, TolMustBePositive) {
  BracketOptions opts;
  opts.tol = 0.0;
  EXPECT_THROW(maximal_solution_bracket(zoo::make("linear-birth").model, 1.0, 5, opts), PreconditionError);
}

TEST(Bracket, ExteriorLowerValues) {
  const auto fx = zoo::make("quadratic-birth");
  const auto w = enumerate_window(fx.model, 9);
  const auto ext = exterior_lower_values(w, 2.0, fx.tail);
  ASSERT_EQ(ext.size(), 1u);
  EXPECT_DOUBLE_EQ(ext[0], 1.0 - 2.0 / 10.5);
  EXPECT_EQ(exterior_lower_values(w, 2.0, nullptr), std::vector<double>{0.0});
  EXPECT_EQ(exterior_lower_values(w, 100.0, fx.tail), std::vector<double>{0.0});
}

// ---- properties ----

TEST(Properties, UpperNonIncreasingInIterations) {
  for (const auto& fx : fixtures()) {
    const std::int64_t cap = small_cap(fx.model);
    std::vector<double> prev;
    for (std::size_t it = 1; it <= 30; ++it) {
      BracketOptions opts;
      opts.max_iter = it;
      opts.tol = 1e-300;
      const auto br = maximal_solution_bracket(fx.model, 1.0, cap, opts);
      if (!prev.empty())
        for (std::size_t i = 0; i < prev.size(); ++i) ASSERT_LE(br.upper[i], prev[i]) << fx.name << " it=" << it;
      prev = br.upper;
    }
  }
}

TEST(Properties, MonotoneInCap) {
  for (const auto& fx : fixtures()) {
    const std::vector<std::int64_t> caps =
        fx.model.dimension() == 1 ? std::vector<std::int64_t>{25, 50, 100, 200, 400} : std::vector<std::int64_t>{25, 50, 100};
    BracketOptions opts;
    opts.tail = fx.tail;
    std::optional<SolutionBracket> prev;
    std::optional<Window> prev_w;
    for (auto cap : caps) {
      auto br = maximal_solution_bracket(fx.model, 1.0, cap, opts);
      auto w = enumerate_window(fx.model, cap);
      for (std::size_t i = 0; i < br.upper.size(); ++i) ASSERT_LE(br.lower[i], br.upper[i]);
      if (prev)
        for (std::size_t i = 0; i < prev_w->size(); ++i) {
          const std::size_t j = *w.find(prev_w->states[i]);
          ASSERT_LE(br.upper[j], prev->upper[i] + 1e-12) << fx.name << " cap " << cap << " " << w.states[j];
          ASSERT_GE(br.lower[j], prev->lower[i] - 1e-12) << fx.name << " cap " << cap << " " << w.states[j];
        }
      prev = std::move(br);
      prev_w = std::move(w);
    }
  }
}

TEST(Properties, ComplementIdentity) {
  for (const auto& fx : fixtures()) {
    const std::int64_t cap = small_cap(fx.model);
    BracketOptions opts;
    opts.tail = fx.tail;
    const auto pi = build_embedded(fx.model, 1.0, cap);
    const auto br = maximal_solution_bracket(pi, opts);
    const auto mass = resolvent_mass(pi, 1'000'000);
    for (std::size_t i = 0; i < pi.size(); ++i) {
      ASSERT_GE(mass.mass[i] + br.upper[i], 1.0 - 1e-8) << fx.name << " " << pi.window().states[i];
      ASSERT_LE(mass.mass[i] + br.lower[i], 1.0 + 1e-8) << fx.name << " " << pi.window().states[i];
    }
  }
}

TEST(Properties, LambdaIndependentVerdict) {
  for (const auto& fx : fixtures()) {
    ChainVerdictOptions opts;
    opts.bracket.tail = fx.tail;
    std::vector<Evidence> seen;
    for (const double lambda : {0.5, 1.0, 2.0}) seen.push_back(uniqueness_verdict_resolvent(fx.model, lambda, opts).evidence);
    const Evidence expected = fx.expected == zoo::Expected::Unique ? Evidence::Unique : Evidence::NonUnique;
    for (auto e : seen) EXPECT_EQ(e, expected) << fx.name;
  }
}

// ---- mass ----

TEST(Mass, AbsorbingAfterOneTerm) {
  const auto m = resolvent_mass(absorbing(), 1.0, 4, 1);
  EXPECT_EQ(m.terms, 1u);
  for (double v : m.mass) EXPECT_EQ(v, 1.0);
}

TEST(Mass, BoundedModel) {
  const auto m = resolvent_mass(zoo::make("bounded-bd").model, 1.0, 200, 10'000);
  EXPECT_GE(m.mass[0], 0.999);
}

TEST(Mass, Exp2BelowComplement) {
  const auto fx = zoo::make("exp2-birth");
  BracketOptions opts;
  opts.tail = fx.tail;
  const auto br = maximal_solution_bracket(fx.model, 1.0, 60, opts);
  const auto m = resolvent_mass(fx.model, 1.0, 60, 100'000);
  EXPECT_LE(m.mass[0], 1.0 - br.lower[0] + 1e-12);
  EXPECT_LT(m.mass[0], 0.9);
}

TEST(Mass, PartialSumsIncrease) {
  const auto model = zoo::make("schlogl-2").model;
  double prev = 0.0;
  for (std::size_t n = 1; n <= 40; ++n) {
    const auto m = resolvent_mass(model, 1.0, 30, n);
    EXPECT_GE(m.mass[0], prev);
    prev = m.mass[0];
  }
  EXPECT_THROW(resolvent_mass(model, 1.0, 30, 0), PreconditionError);
}

// ---- verdict ----

TEST(Verdict, Examples) {
  EXPECT_EQ(uniqueness_verdict_resolvent(zoo::make("quadratic-birth").model, 1.0).evidence, Evidence::NonUnique);
  EXPECT_EQ(uniqueness_verdict_resolvent(zoo::make("linear-birth").model, 1.0).evidence, Evidence::Unique);
  const auto v = uniqueness_verdict_resolvent(zoo::make("schlogl-2").model, 1.0);
  EXPECT_EQ(v.evidence, Evidence::Unique);
  EXPECT_EQ(v.reference, (StateVec{0, 0}));
  EXPECT_EQ(v.trace.back().cap, 400);
  ASSERT_EQ(v.notes.size(), 1u);
  EXPECT_NE(v.notes[0].find("dropped"), std::string::npos);
  ASSERT_FALSE(v.trace.empty());
  for (std::size_t k = 1; k < v.trace.size(); ++k) EXPECT_LE(v.trace[k].upper, v.trace[k - 1].upper);
}

TEST(Verdict, TraceFollowsSchedule) {
  ChainVerdictOptions opts;
  opts.cap_schedule = {10, 20, 40};
  const auto v = uniqueness_verdict_resolvent(zoo::make("linear-birth").model, 1.0, opts);
  ASSERT_EQ(v.trace.size(), 3u);
  EXPECT_EQ(v.trace[2].cap, 40);
  EXPECT_EQ(v.trace[2].states, 41u);
  EXPECT_NEAR(v.trace[2].upper, 1.0 / 42.0, 1e-12);
}

TEST(Verdict, ScheduleErrors) {
  const auto m = zoo::make("linear-birth").model;
  ChainVerdictOptions opts;
  opts.cap_schedule = {};
  EXPECT_THROW(uniqueness_verdict_resolvent(m, 1.0, opts), UsageError);
  opts.cap_schedule = {10, 10};
  EXPECT_THROW(uniqueness_verdict_resolvent(m, 1.0, opts), UsageError);
  opts.cap_schedule = {10, 20};
  opts.reference = StateVec{15};
  EXPECT_THROW(uniqueness_verdict_resolvent(m, 1.0, opts), UsageError);
}

TEST(Verdict, FirstCapTooLarge) {
  ChainVerdictOptions opts;
  opts.cap_schedule = {500, 1000};
  opts.max_window_states = 1000;
  EXPECT_THROW(uniqueness_verdict_resolvent(zoo::make("schlogl-2").model, 1.0, opts), ResourceError);
}

TEST(Verdict, OverflowStopsSchedule) {
  const auto fx = zoo::make("exp2-birth");
  ChainVerdictOptions opts;
  opts.bracket.tail = fx.tail;
  const auto v = uniqueness_verdict_resolvent(fx.model, 1.0, opts);
  EXPECT_EQ(v.evidence, Evidence::NonUnique);
  EXPECT_LT(v.trace.back().cap, 1024);
  ASSERT_EQ(v.notes.size(), 1u);
}

TEST(Verdict, SharedWindowsGiveSameTrace) {
  const auto m = zoo::make("schlogl-2").model;
  WindowSeries series(m);
  ChainVerdictOptions opts;
  opts.cap_schedule = {25, 50, 100};
  const auto a = uniqueness_verdict_resolvent(m, 1.0, opts);
  opts.windows = &series;
  const auto b = uniqueness_verdict_resolvent(m, 1.0, opts);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].upper, b.trace[k].upper);
    EXPECT_EQ(a.trace[k].lower, b.trace[k].lower);
  }
}
