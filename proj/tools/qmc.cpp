#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmc/analysis.hpp"
#include "qmc/certificate.hpp"
#include "qmc/dsl.hpp"
#include "qmc/error.hpp"
#include "qmc/simulator.hpp"

namespace {

using namespace qmc;

struct ModelFlags {
  std::string model, zoo;
  std::vector<std::string> params;

  void add(CLI::App* app) {
    auto* m = app->add_option("--model", model, "model file (.qm)");
    auto* z = app->add_option("--zoo", zoo, "zoo fixture name");
    m->excludes(z);
    app->add_option("--param", params, "zoo parameter k=v (repeatable)");
  }

  ModelSource source() const {
    ModelSource s{model, zoo, {}};
    for (const auto& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--param expects k=v, got '" + kv + "'");
      try {
        std::size_t used = 0;
        const std::string v = kv.substr(eq + 1);
        s.params[kv.substr(0, eq)] = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::logic_error&) {
        throw UsageError("--param value is not a number: '" + kv + "'");
      }
    }
    return s;
  }
};

std::vector<std::int64_t> parse_caps(const std::string& text) {
  std::vector<std::int64_t> caps;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      caps.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError("bad cap '" + item + "' in --cap-schedule");
    }
  }
  return caps;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw UsageError("cannot write '" + out + "'");
  f << text;
}

void write_traces(const AnalysisResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& m : r.methods) {
    if (m.trace_csv.empty()) continue;
    std::ofstream f(std::filesystem::path(dir) / (std::string(to_string(m.method)) + ".csv"));
    f << m.trace_csv;
  }
}

// 0 once any method voted; otherwise 3 for a broken model, 4 for numerics.
int exit_code_for(const AnalysisResult& r) {
  bool model_error = false;
  for (const auto& m : r.methods) {
    if (!m.failed && m.applicable) return 0;
    model_error = model_error || m.model_error;
  }
  if (model_error) return 3;
  return std::any_of(r.methods.begin(), r.methods.end(), [](const MethodRecord& m) { return m.failed; }) ? 4 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uniqueness analysis for continuous-time Markov chain Q-matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qmc::version()));

  // analyze / certify share most options.
  ModelFlags mf;
  AnalysisConfig cfg;
  std::vector<std::string> methods;
  std::string caps, out, format = "text", trace_dir, cert;
  std::uint64_t seed = 0;
  std::int64_t cap = 0;
  std::string phi = "1 + level", path_csv;

  auto add_run_options = [&](CLI::App* sub) {
    mf.add(sub);
    sub->add_option("--lambda", cfg.lambdas, "lambda values (repeatable)");
    sub->add_option("--cap-schedule", caps, "comma-separated level caps");
    sub->add_option("--max-states", cfg.max_window_states, "largest window size in states");
    sub->add_option("--trials", cfg.trials, "simulation trials");
    sub->add_option("--seed", seed, "simulation seed");
    sub->add_option("--t-max", cfg.simulation.t_max, "simulation time cap");
    sub->add_option("--max-jumps", cfg.simulation.max_jumps, "simulation jump cap");
    sub->add_option("--cert", cert, "certificate sidecar file");
    sub->add_option("--cert-cap", cfg.certificate_cap, "level cap for certificate checks");
    sub->add_option("--out", out, "write the report here instead of stdout");
    sub->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--trace-dir", trace_dir, "write per-method CSV traces into this directory");
    sub->add_flag("--parallel", cfg.parallel_methods, "run methods concurrently");
    sub->add_flag("--timestamp", cfg.timestamp, "record a timestamp in the report");
  };

  auto* analyze = app.add_subcommand("analyze", "run uniqueness methods and reconcile their evidence");
  add_run_options(analyze);
  analyze->add_option("--method", methods, "method (repeatable; default: all analytic, plus simulate with --seed)");

  auto* certify = app.add_subcommand("certify", "check a certificate sidecar file");
  add_run_options(certify);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo explosion test");
  mf.add(simulate);
  simulate->add_option("--seed", seed, "seed")->required();
  simulate->add_option("--trials", cfg.trials, "trials");
  simulate->add_option("--t-max", cfg.simulation.t_max, "time cap");
  simulate->add_option("--max-jumps", cfg.simulation.max_jumps, "jump cap");
  simulate->add_option("--path-csv", path_csv, "dump the first trial's path as CSV");
  simulate->add_option("--out", out, "write the report here");
  simulate->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* parse_check = app.add_subcommand("parse-check", "parse a .qm file and print its canonical form");
  std::string qm;
  parse_check->add_option("file", qm, "model file")->required();

  auto* scan = app.add_subcommand("scan-c", "tightest drift constant for phi on a window");
  mf.add(scan);
  scan->add_option("--phi", phi, "phi expression over x(i), level and parameters");
  scan->add_option("--cap", cap, "level cap")->required();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }

    if (parse_check->parsed()) {
      const auto spec = dsl::parse_model_file(qm);
      dsl::instantiate(spec);
      std::cout << dsl::pretty_print(spec);
      return 0;
    }

    cfg.source = mf.source();
    if (!caps.empty()) cfg.cap_schedule = parse_caps(caps);

    if (scan->parsed()) {
      const LoadedModel model = load_model(cfg.source);
      const dsl::ExprContext ctx{static_cast<std::int64_t>(model.model.dimension()), model.params, true};
      const auto f = dsl::make_state_function(dsl::parse_expression(phi, ctx), ctx);
      const auto c = scan_drift_constant(model.model, f, cap);
      if (c)
        std::printf("%.17g\n", *c);
      else
        std::printf("none\n");
      return 0;
    }

    if (simulate->parsed()) {
      cfg.methods = {Method::Simulate};
      cfg.seed = seed;
      const LoadedModel model = load_model(cfg.source);
      if (!path_csv.empty()) {
        std::ofstream f(path_csv);
        if (!f) throw UsageError("cannot write '" + path_csv + "'");
        write_path_csv(f, simulate_path(model.model, StateVec::zeros(model.model.dimension()), seed,
                                        cfg.simulation));
      }
      const auto r = run_analysis(cfg, model);
      emit(format == "json" ? r.report.dump(2) + "\n" : render_text(r), out);
      return exit_code_for(r);
    }

    if (analyze->count("--seed") || certify->count("--seed")) cfg.seed = seed;
    if (!cert.empty()) cfg.certificate_path = cert;
    if (certify->parsed()) {
      if (cert.empty()) throw UsageError("certify needs --cert");
      switch (parse_certificate_file(cert).kind) {
        case CertificateKind::Uniqueness: cfg.methods = {Method::Lyapunov}; break;
        case CertificateKind::CorollaryUniqueness: cfg.methods = {Method::Corollary}; break;
        case CertificateKind::NonUniqueness: cfg.methods = {Method::NonUniqueness}; break;
      }
    } else if (methods.empty()) {
      for (auto m : all_methods())
        if (m != Method::Simulate || cfg.seed) cfg.methods.push_back(m);
    } else {
      for (const auto& m : methods) cfg.methods.push_back(parse_method(m));
    }
    const auto r = run_analysis(cfg);
    emit(format == "json" ? r.report.dump(2) + "\n" : render_text(r), out);
    if (!trace_dir.empty()) write_traces(r, trace_dir);
    return exit_code_for(r);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return 3;
  } catch (const SyntaxError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
