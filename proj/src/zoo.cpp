#include "qmc/zoo.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qmc/error.hpp"
#include "qmc/primes.hpp"

namespace qmc::zoo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_positive(const std::string& model, const char* what, std::int64_t n, double r) {
  if (!(r > 0.0) && !std::isinf(r)) {
    std::ostringstream os;
    os << "model '" << model << "': nonpositive " << what << " rate " << r << " at state (" << n << ")";
    throw ModelError(os.str());
  }
}

}  // namespace

GeneratorModel pure_birth(RateFn rate, std::string name) {
  auto raw = [rate, name](const StateVec& s, std::vector<Transition>& out) {
    const std::int64_t n = s[0];
    const double r = rate(n);
    check_positive(name, "birth", n, r);
    out.push_back({StateVec{n + 1}, r});
  };
  return GeneratorModel(name, 1, std::move(raw));
}

GeneratorModel birth_death(RateFn birth, RateFn death, std::string name) {
  if (const double a0 = death(0); a0 != 0.0) {
    std::ostringstream os;
    os << "model '" << name << "': death rate at 0 must be 0 (got " << a0 << "), the chain would leave Z_+";
    throw ModelError(os.str());
  }
  auto raw = [birth, death, name](const StateVec& s, std::vector<Transition>& out) {
    const std::int64_t n = s[0];
    const double b = birth(n);
    check_positive(name, "birth", n, b);
    out.push_back({StateVec{n + 1}, b});
    if (n > 0) {
      const double a = death(n);
      check_positive(name, "death", n, a);
      out.push_back({StateVec{n - 1}, a});
    }
  };
  return GeneratorModel(name, 1, std::move(raw));
}

double schlogl_birth(const SchloglParams& p, std::int64_t k) {
  const double x = static_cast<double>(k);
  return p.beta0 + p.beta2 * x * (x - 1.0);
}

double schlogl_death(const SchloglParams& p, std::int64_t k) {
  const double x = static_cast<double>(k);
  return p.delta1 * x + p.delta3 * x * (x - 1.0) * (x - 2.0);
}

GeneratorModel schlogl(const SchloglParams& in) {
  if (in.sites < 1) throw ModelError("schlogl: sites must be >= 1");
  if (!(in.beta0 > 0 && in.beta2 > 0 && in.delta1 > 0 && in.delta3 > 0))
    throw ModelError("schlogl: beta0, beta2, delta1, delta3 must all be > 0");
  SchloglParams p = in;
  const auto d = static_cast<std::size_t>(p.sites);
  if (p.p.empty()) {
    p.p.assign(d, std::vector<double>(d, d > 1 ? 1.0 / static_cast<double>(d - 1) : 0.0));
    for (std::size_t u = 0; u < d; ++u) p.p[u][u] = 0.0;
  }
  if (p.p.size() != d) throw ModelError("schlogl: p must be sites x sites");
  for (std::size_t u = 0; u < d; ++u) {
    if (p.p[u].size() != d) throw ModelError("schlogl: p must be sites x sites");
    if (p.p[u][u] != 0.0) throw ModelError("schlogl: p must have zero diagonal");
    double row = 0.0;
    for (double v : p.p[u]) {
      if (v < 0.0) throw ModelError("schlogl: p has a negative entry");
      row += v;
    }
    if (d > 1 && std::abs(row - 1.0) > 1e-12)
      throw ModelError("schlogl: row " + std::to_string(u) + " of p does not sum to 1");
  }

  auto raw = [p, d](const StateVec& s, std::vector<Transition>& out) {
    std::vector<std::int64_t> delta(d, 0);
    for (std::size_t u = 0; u < d; ++u) {
      const std::int64_t k = s[u];
      delta[u] = +1;
      out.push_back({*s.shifted(delta), schlogl_birth(p, k)});
      delta[u] = 0;
      if (k == 0) continue;
      delta[u] = -1;
      out.push_back({*s.shifted(delta), schlogl_death(p, k)});
      for (std::size_t v = 0; v < d; ++v) {
        if (v == u || p.p[u][v] == 0.0) continue;
        delta[v] = +1;
        out.push_back({*s.shifted(delta), static_cast<double>(k) * p.p[u][v]});
        delta[v] = 0;
      }
      delta[u] = 0;
    }
  };
  ParamRecord rec{{"sites", static_cast<double>(p.sites)}, {"beta0", p.beta0}, {"beta2", p.beta2},
                  {"delta1", p.delta1}, {"delta3", p.delta3}};
  return GeneratorModel("schlogl", d, std::move(raw), std::move(rec));
}

GeneratorModel interleaved(const GeneratorModel& q1, const GeneratorModel& q2, bool bridge,
                           std::string name) {
  if (q1.dimension() != 1 || q2.dimension() != 1)
    throw UsageError("interleaved: both component models must be 1-dimensional");
  auto raw = [q1, q2, bridge](const StateVec& s, std::vector<Transition>& out) {
    const std::int64_t n = s[0];
    const bool odd = n % 2 == 1;
    const std::int64_t m = odd ? (n - 1) / 2 : n / 2;
    const auto& part = odd ? q1 : q2;
    for (const auto& t : part.transitions_of(StateVec{m}))
      out.push_back({StateVec{2 * t.target[0] + (odd ? 1 : 0)}, t.rate});
    if (bridge && n <= 1) out.push_back({StateVec{1 - n}, 1.0});
  };
  return GeneratorModel(std::move(name), 1, std::move(raw), {{"bridge", bridge ? 1.0 : 0.0}});
}

namespace {

double get(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void allow_only(std::string_view fixture, const std::map<std::string, double>& params,
                std::initializer_list<std::string_view> keys) {
  for (const auto& [k, v] : params) {
    bool ok = false;
    for (auto a : keys) ok = ok || k == a;
    if (!ok) throw UsageError("zoo model '" + std::string(fixture) + "' has no parameter '" + k + "'");
  }
}

// sum_{k>=n} 1/(k+1)^2 = sum_{m>=n+1} 1/m^2 < 1/(n + 1/2)
double quadratic_tail(const StateVec& s) { return 1.0 / (static_cast<double>(s[0]) + 0.5); }

// sum_{k>=n} 2^-k = 2^(1-n)
double exp2_tail(const StateVec& s) { return std::ldexp(1.0, static_cast<int>(1 - std::min<std::int64_t>(s[0], 2000))); }

// sum_{m>=a} 1/m^2: direct up to 64, Euler-Maclaurin beyond.
double inverse_square_tail(std::int64_t a) {
  double s = 0.0;
  for (; a < 64; ++a) s += 1.0 / (static_cast<double>(a) * static_cast<double>(a));
  const double x = static_cast<double>(a);
  return s + 1.0 / x + 0.5 / (x * x) + 1.0 / (6.0 * x * x * x) - 1.0 / (30.0 * std::pow(x, 5)) +
         1.0 / (42.0 * std::pow(x, 7));
}

// phi_k = 1/2 + sum_{1<=j<=k-1} 1/q_j - sum_{j>=1} 1/q_j = 1/2 - sum_{j>=max(k,1)} 1/q_j
NonUniquenessHint quadratic_hint() {
  return {[](const StateVec& s) { return 0.5 - inverse_square_tail(std::max<std::int64_t>(s[0], 1) + 1); },
          0.5, 1.0};
}

// 0.5 - 2^(1-k) is exact up to k = 53; beyond that the increments vanish.
NonUniquenessHint exp2_hint() {
  return {[](const StateVec& s) {
            return 0.5 - std::ldexp(1.0, static_cast<int>(1 - std::min<std::int64_t>(std::max<std::int64_t>(s[0], 1), 2000)));
          },
          0.5, 1.0, 50};
}

GeneratorModel bounded_bd(double b, double a) {
  return birth_death([b](std::int64_t) { return b; },
                     [a](std::int64_t n) { return n == 0 ? 0.0 : a; }, "bounded-bd");
}

GeneratorModel quadratic_birth() {
  return pure_birth([](std::int64_t n) { const double x = static_cast<double>(n + 1); return x * x; },
                    "quadratic-birth");
}

}  // namespace

Fixture make(std::string_view name, const std::map<std::string, double>& params) {
  if (name == "bounded-bd") {
    allow_only(name, params, {"b", "a"});
    return {"bounded-bd", bounded_bd(get(params, "b", 1.0), get(params, "a", 1.0)), nullptr,
            Expected::Unique, "bounded_bd.qm"};
  }
  if (name == "linear-birth") {
    allow_only(name, params, {});
    return {"linear-birth", pure_birth([](std::int64_t n) { return static_cast<double>(n + 1); }, "linear-birth"),
            nullptr, Expected::Unique, "linear_birth.qm"};
  }
  if (name == "prime-birth") {
    allow_only(name, params, {});
    // q_{n,n+1} = the (n+1)-th prime, so the first rate is 2
    return {"prime-birth",
            pure_birth([](std::int64_t n) { return static_cast<double>(nth_prime(n + 1)); }, "prime-birth"),
            nullptr, Expected::Unique, "prime_birth.qm"};
  }
  if (name == "quadratic-birth") {
    allow_only(name, params, {});
    return {"quadratic-birth", quadratic_birth(), quadratic_tail, Expected::NonUnique, "quadratic_birth.qm",
            quadratic_hint()};
  }
  if (name == "exp2-birth") {
    allow_only(name, params, {});
    return {"exp2-birth", pure_birth([](std::int64_t n) {
              return std::ldexp(1.0, static_cast<int>(std::min<std::int64_t>(n, 5000)));
            }, "exp2-birth"),
            exp2_tail, Expected::NonUnique, "exp2_birth.qm", exp2_hint()};
  }
  if (name == "schlogl" || name == "schlogl-1" || name == "schlogl-2") {
    allow_only(name, params, {"sites", "beta0", "beta2", "delta1", "delta3"});
    SchloglParams p;
    p.sites = name == "schlogl-2" ? 2 : 1;
    p.sites = static_cast<std::int64_t>(get(params, "sites", static_cast<double>(p.sites)));
    p.beta0 = get(params, "beta0", 1.0);
    p.beta2 = get(params, "beta2", 1.0);
    p.delta1 = get(params, "delta1", 1.0);
    p.delta3 = get(params, "delta3", 1.0);
    std::string fname = name == "schlogl" ? "schlogl-" + std::to_string(p.sites) : std::string(name);
    const bool unit = p.beta0 == 1.0 && p.beta2 == 1.0 && p.delta1 == 1.0 && p.delta3 == 1.0;
    std::string file = unit && p.sites <= 3 ? "schlogl" + std::to_string(p.sites) + ".qm" : "";
    return {fname, schlogl(p), nullptr, Expected::Unique, file};
  }
  if (name == "interleaved") {
    allow_only(name, params, {"bridge"});
    const bool bridge = get(params, "bridge", 0.0) != 0.0;
    ExplosionTimeBound tail = [bridge](const StateVec& s) {
      const std::int64_t n = s[0];
      if (n % 2 == 1 || (bridge && n == 0)) return kInf;
      return quadratic_tail(StateVec{n / 2});
    };
    return {"interleaved", interleaved(bounded_bd(1.0, 1.0), quadratic_birth(), bridge), std::move(tail),
            Expected::NonUnique, bridge ? "interleaved_bridge.qm" : "interleaved.qm"};
  }
  if (name == "cubic-bd") {
    allow_only(name, params, {});
    return {"cubic-bd",
            birth_death([](std::int64_t n) { const double x = static_cast<double>(n + 1); return x * x * x; },
                        [](std::int64_t n) { return static_cast<double>(n); }, "cubic-bd"),
            nullptr, Expected::NonUnique, "cubic_bd.qm"};
  }
  if (name == "quartic-bd") {
    allow_only(name, params, {});
    return {"quartic-bd",
            birth_death([](std::int64_t n) { const double x = static_cast<double>(n); return 1.0 + x * x; },
                        [](std::int64_t n) { const double x = static_cast<double>(n); return x * x * x * x; },
                        "quartic-bd"),
            nullptr, Expected::Unique, "quartic_bd.qm"};
  }
  throw UsageError("unknown zoo model '" + std::string(name) + "'");
}

std::vector<Fixture> grid_fixtures() {
  std::vector<Fixture> out;
  for (auto n : {"bounded-bd", "linear-birth", "prime-birth", "quadratic-birth", "exp2-birth",
                 "schlogl-1", "schlogl-2", "interleaved"})
    out.push_back(make(n));
  return out;
}

std::vector<std::string> names() {
  return {"bounded-bd", "linear-birth", "prime-birth", "quadratic-birth", "exp2-birth", "schlogl",
          "schlogl-1", "schlogl-2", "interleaved", "cubic-bd", "quartic-bd"};
}

}  // namespace qmc::zoo
