#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdris/bcd.hpp"
#include "bdris/config.hpp"
#include "bdris/metrics.hpp"

namespace bdris {

enum class ExperimentKind {
  kConvergence,
  kSweepElements,
  kSweepUlAngle,
  kRateRegion,
  kGroupSize,
  kSiSweep,
  kBeampattern,
  kBoundCheck,
  kMuRateRegion,
};

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

/// One RIS flavour solved at every sweep point. Names: nonreciprocal, reciprocal, diagonal.
struct Variant {
  std::string name;
  RisConfig ris;
};

Variant variant_by_name(const std::string& name);
std::vector<Variant> default_variants();

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kRateRegion;
  RunConfig base;
  std::vector<double> sweep_values;  // a single ignored point for kinds without a sweep axis
  int n_seeds = 1;
  std::vector<Variant> variants;
  std::string output_path;
  int parallelism = 1;

  void validate() const;
};

/// Reference geometry, sweep grid and variants for one kind.
ExperimentSpec default_spec(ExperimentKind kind);

/// Applies a YAML document on top of default_spec(kind). The kind comes from `kind_override`,
/// else from experiment.kind in the document, else rate_region.
ExperimentSpec parse_experiment(const std::string& yaml_text,
                                std::optional<ExperimentKind> kind_override = std::nullopt);

/// Config and RIS variant for one (sweep value, seed) point.
RunConfig apply_sweep(const ExperimentSpec& spec, double value, std::uint64_t seed,
                      Variant& variant);

struct BoundRecord {
  double ul_bound = 0.0;
  double dl_bound = 0.0;
  bool ul_attained = false;
  bool dl_attained = false;
  double colinearity_gap = 0.0;
};

struct VariantOutcome {
  std::string variant;
  double dl_rate = 0.0;
  double ul_rate = 0.0;
  double sum_rate = 0.0;  // dl_rate + ul_rate
  double objective = 0.0;
  int iters = 0;
  double pdd_violation = 0.0;
  bool converged = false;
  bool failed = false;
  std::string error;
  std::vector<double> objective_trace;
  std::vector<BcdTraceRow> bcd_trace;
  std::vector<PddTraceRow> pdd_trace;
  std::optional<BeampatternSet> beampattern;  // normalized, on ExperimentResult::beam_grid
};

struct ExperimentRecord {
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  std::vector<VariantOutcome> variants;
  std::optional<BoundRecord> bounds;
};

struct Aggregate {
  double sweep_value = 0.0;
  std::string variant;
  int n_ok = 0;
  double mean_sum_rate = 0.0;
  double std_sum_rate = 0.0;
  double mean_dl_rate = 0.0;
  double mean_ul_rate = 0.0;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ExperimentRecord> records;  // sweep-major, then seed
  std::vector<Aggregate> aggregates;
  std::vector<double> beam_grid;
};

/// Solves every (sweep value, seed, variant) triple. All variants at one point share the same
/// channel realization. Solver failures are recorded per variant; a sweep point where every run
/// failed raises NumericalFailure after the pool drains.
ExperimentResult run_experiment(const ExperimentSpec& spec);

std::vector<Aggregate> aggregate(const std::vector<ExperimentRecord>& records,
                                 const std::vector<Variant>& variants);

enum class OutputFormat { kCsv, kJson };
OutputFormat parse_output_format(const std::string& s);

nlohmann::json to_json(const ExperimentSpec& spec);
nlohmann::json to_json(const ExperimentResult& result);
/// Reads back the records written by to_json(ExperimentResult).
std::vector<ExperimentRecord> records_from_json(const nlohmann::json& j);

/// CSV: '#'-prefixed config echo lines, one header row, one row per record.
void write_results_csv(std::ostream& out, const ExperimentResult& result);
void emit_results(const ExperimentResult& result, OutputFormat format, std::ostream& out);
void emit_results(const ExperimentResult& result, OutputFormat format, const std::string& path);

}  // namespace bdris
