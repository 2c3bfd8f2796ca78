#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmc/certificate.hpp"
#include "qmc/generator.hpp"
#include "qmc/simulator.hpp"
#include "qmc/verdict.hpp"
#include "qmc/zoo.hpp"

namespace qmc {

using Json = nlohmann::ordered_json;

std::string_view version();

// ---- model loading ----

struct ModelSource {
  std::string qm_path;                   // either a .qm file ...
  std::string zoo_name;                  // ... or a zoo fixture name
  std::map<std::string, double> params;  // zoo parameters
};

struct LoadedModel {
  GeneratorModel model;
  ExplosionTimeBound tail;
  std::optional<zoo::NonUniquenessHint> nonuniqueness;
  std::string source;  // "zoo:<name>" or the file path
  std::vector<std::pair<std::string, double>> params;
};

LoadedModel load_model(const ModelSource& source);

// ---- certificate sidecar files ----
//
//   # comment
//   kind = uniqueness | corollary | nonuniqueness
//   phi = <expression over x(i), level, params>
//   c = <number> | scan
//   bound = <number>               (nonuniqueness)
//   windows = 25, 50, 100          (growth-check caps)
//   rate_bound = <number>          (bounded-rate declaration)
//   infinite_part = <condition>    (states covered by the declaration)

struct CertificateFile {
  CertificateKind kind = CertificateKind::Uniqueness;
  std::string phi;
  std::optional<double> c;  // nullopt: scan
  std::optional<double> bound;
  std::vector<std::int64_t> windows;
  std::optional<double> rate_bound;
  std::string infinite_part;
};

CertificateFile parse_certificate(std::string_view text);
CertificateFile parse_certificate_file(const std::string& path);

/// Compiles phi and infinite_part against the model's dimension and parameters.
LyapunovCertificate compile_certificate(const CertificateFile& file, const LoadedModel& model);

// ---- analysis ----

enum class Method { Corollary, Embedded, Lyapunov, NonUniqueness, PureBirthSeries, Resolvent, Simulate };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
std::vector<Method> all_methods();

struct AnalysisConfig {
  ModelSource source;
  std::vector<Method> methods;
  std::vector<double> lambdas{1.0};
  std::vector<std::int64_t> cap_schedule = default_cap_schedule();
  std::size_t max_window_states = 100'000;  // larger caps are dropped from the schedule
  std::int64_t certificate_cap = 0;          // 0: largest schedule cap within max_window_states
  VerdictThresholds thresholds;
  double weights_decay = 0.5;
  SimulationCaps simulation{5.0, 100'000};
  std::size_t trials = 200;
  std::optional<std::uint64_t> seed;
  double epsilon = kDefaultExplosionEpsilon;
  std::optional<std::string> certificate_path;
  std::int64_t series_n_max = 100'000;
  bool parallel_methods = false;
  Exec exec = Exec::Parallel;
  bool timestamp = false;
};

/// Throws UsageError when the config violates its invariants.
void validate(const AnalysisConfig& config);

enum class Overall { Unique, NonUnique, Inconclusive, Contradictory };
std::string_view to_string(Overall o);

struct MethodRecord {
  Method method = Method::Resolvent;
  bool failed = false;
  bool applicable = true;  // false: no certificate or wrong model class; abstains
  std::string error;       // set when failed
  bool model_error = false;  // the failure came from the model definition
  Evidence evidence = Evidence::Inconclusive;
  std::string summary;
  Json details;       // thresholds, caps and per-method numbers
  std::string trace_csv;
};

struct AnalysisResult {
  Overall overall = Overall::Inconclusive;
  std::string confidence;  // "analytic", "simulation-only", or empty
  std::vector<std::string> notes;
  std::vector<MethodRecord> methods;  // sorted by method name
  Json report;
};

/// Runs every selected method and reconciles the evidence. A method that
/// throws is recorded as failed; the others still report.
AnalysisResult run_analysis(const AnalysisConfig& config);
AnalysisResult run_analysis(const AnalysisConfig& config, const LoadedModel& model);

/// Evidence reconciliation: Unique and NonUnique together give Contradictory;
/// otherwise any NonUnique gives NonUnique; all Unique gives Unique. Failed
/// and not-applicable methods do not vote.
Overall reconcile(const std::vector<MethodRecord>& records);

std::string render_text(const AnalysisResult& result);

}  // namespace qmc
