#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "qmc/analysis.hpp"
#include "qmc/dsl.hpp"
#include "qmc/error.hpp"

namespace qmc {

using dsl::ExprContext;
using dsl::make_state_function;
using dsl::parse_expression;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(std::size_t line, const std::string& msg) {
  throw UsageError("certificate line " + std::to_string(line) + ": " + msg);
}

double number(std::size_t line, const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(line, "'" + key + "' expects a number, got '" + v + "'");
  return out;
}

}  // namespace

CertificateFile parse_certificate(std::string_view text) {
  CertificateFile f;
  bool have_kind = false;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string l = trim(raw);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string::npos) bad(line, "expected 'key = value'");
    const std::string key = trim(std::string_view(l).substr(0, eq));
    const std::string val = trim(std::string_view(l).substr(eq + 1));
    if (val.empty()) bad(line, "'" + key + "' has no value");
    if (!seen.insert(key).second) bad(line, "duplicate key '" + key + "'");
    if (key == "kind") {
      have_kind = true;
      if (val == "uniqueness") f.kind = CertificateKind::Uniqueness;
      else if (val == "corollary") f.kind = CertificateKind::CorollaryUniqueness;
      else if (val == "nonuniqueness") f.kind = CertificateKind::NonUniqueness;
      else bad(line, "unknown kind '" + val + "' (expected uniqueness, corollary or nonuniqueness)");
    } else if (key == "phi") {
      f.phi = val;
    } else if (key == "c") {
      if (val != "scan") f.c = number(line, key, val);
    } else if (key == "bound") {
      f.bound = number(line, key, val);
    } else if (key == "rate_bound") {
      f.rate_bound = number(line, key, val);
    } else if (key == "infinite_part") {
      f.infinite_part = val;
    } else if (key == "windows") {
      std::istringstream parts(val);
      std::string item;
      while (std::getline(parts, item, ',')) {
        const std::string t = trim(item);
        std::int64_t cap = 0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), cap);
        if (ec != std::errc() || p != t.data() + t.size()) bad(line, "bad window cap '" + t + "'");
        f.windows.push_back(cap);
      }
    } else {
      bad(line, "unknown key '" + key + "'");
    }
  }
  if (!have_kind) throw UsageError("certificate has no 'kind'");
  if (f.phi.empty()) throw UsageError("certificate has no 'phi'");
  if (f.kind == CertificateKind::NonUniqueness && !f.bound)
    throw UsageError("nonuniqueness certificate needs 'bound'");
  return f;
}

CertificateFile parse_certificate_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open certificate file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_certificate(ss.str());
  } catch (const UsageError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

LyapunovCertificate compile_certificate(const CertificateFile& file, const LoadedModel& model) {
  const ExprContext ctx{static_cast<std::int64_t>(model.model.dimension()), model.params, true};
  LyapunovCertificate cert;
  cert.kind = file.kind;
  cert.phi = make_state_function(parse_expression(file.phi, ctx), ctx);
  cert.c = file.c.value_or(0.0);
  cert.window_family = file.windows;
  cert.bound = file.bound;
  cert.rate_bound = file.rate_bound;
  if (!file.infinite_part.empty()) {
    auto sel = make_state_function(parse_expression(file.infinite_part, ctx), ctx);
    cert.infinite_part = [sel](const StateVec& s) { return sel(s) != 0.0; };
  }
  return cert;
}

}  // namespace qmc
