// Command-line front end: run experiments, check single-user bounds, export beampatterns.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bdris/bcd.hpp"
#include "bdris/channel.hpp"
#include "bdris/config.hpp"
#include "bdris/experiments.hpp"
#include "bdris/metrics.hpp"
#include "bdris/reciprocity.hpp"

namespace fs = std::filesystem;
using namespace bdris;

namespace {

// Relative config paths that do not exist as given are looked up in BDRIS_CONFIG_DIR.
std::string resolve_config(const std::string& path) {
  if (path.empty() || fs::exists(path)) return path;
  if (const char* dir = std::getenv("BDRIS_CONFIG_DIR"); dir && fs::path(path).is_relative()) {
    const fs::path alt = fs::path(dir) / path;
    if (fs::exists(alt)) return alt.string();
  }
  return path;
}

std::string config_text(const std::string& path) {
  return path.empty() ? std::string() : read_text_file(resolve_config(path));
}

OutputFormat pick_format(const std::string& flag, const std::string& out) {
  if (!flag.empty()) return parse_output_format(flag);
  if (fs::path(out).extension() == ".json") return OutputFormat::kJson;
  return OutputFormat::kCsv;
}

void write_traces(const ExperimentResult& res, const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& r : res.records)
    for (const auto& o : r.variants) {
      const std::string stem = o.variant + "_" + std::to_string(r.sweep_value) + "_seed" +
                               std::to_string(r.seed);
      std::ofstream bcd(fs::path(dir) / ("bcd_" + stem + ".csv"));
      write_bcd_trace_csv(bcd, o.bcd_trace);
      std::ofstream pdd(fs::path(dir) / ("pdd_" + stem + ".csv"));
      write_pdd_trace_csv(pdd, o.pdd_trace);
    }
}

nlohmann::json report_json(const BoundReport& r) {
  return {{"bound_value", r.bound_value},
          {"phase_beta", {r.phase_beta.real(), r.phase_beta.imag()}},
          {"attained", r.attained},
          {"residual", r.residual}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-duplex RIS transceiver optimization experiments"};
  app.require_subcommand(1);

  std::string config_path, kind, out = "-", format, trace_dir;
  int seeds = 0, parallelism = 0;

  auto* run = app.add_subcommand("run", "Run an experiment sweep and write its records");
  run->add_option("--config", config_path, "YAML config file");
  run->add_option("--kind", kind, "Experiment kind (overrides experiment.kind)");
  run->add_option("--seeds", seeds, "Number of seeds (overrides experiment.n_seeds)")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output file, '-' for stdout");
  run->add_option("--format", format, "csv or json (default: from --out extension, else csv)");
  run->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--trace-dir", trace_dir, "Write per-run BCD and PDD trace CSVs here");

  std::string bc_config;
  auto* bound = app.add_subcommand("bound-check", "Single-user received-power bounds as JSON");
  bound->add_option("--config", bc_config, "YAML config file");

  std::string bp_config, bp_out = "-";
  auto* beam = app.add_subcommand("beampattern", "Solve once and write normalized beampatterns");
  beam->add_option("--config", bp_config, "YAML config file");
  beam->add_option("--out", bp_out, "Output CSV, '-' for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::optional<ExperimentKind> k;
      if (!kind.empty()) k = parse_experiment_kind(kind);
      ExperimentSpec spec = parse_experiment(config_text(config_path), k);
      if (seeds > 0) spec.n_seeds = seeds;
      if (parallelism > 0) spec.parallelism = parallelism;
      spec.output_path = out;
      if (!trace_dir.empty()) spec.base.solver.record_trace = spec.base.solver.pdd.record_trace = true;
      const ExperimentResult res = run_experiment(spec);
      const OutputFormat fmt = pick_format(format, out);
      if (out == "-")
        emit_results(res, fmt, std::cout);
      else
        emit_results(res, fmt, out);
      if (!trace_dir.empty()) write_traces(res, trace_dir);
    } else if (*bound) {
      const RunConfig cfg = parse_config(config_text(bc_config));
      const ChannelSet ch = generate_channel_set(cfg.scenario, cfg.ris);
      if (ch.n_dl() == 0 || ch.n_ul() == 0)
        throw InvalidArgument("bound-check needs at least one DL and one UL user");
      const CVec g = ch.g_bs_ris.col(0);
      nlohmann::json j{{"ul", report_json(ul_power_bound(g, ch.h_ref_ul[0]))},
                       {"dl", report_json(dl_power_bound(ch.h_ref_dl[0], g))},
                       {"colinearity_gap", colinearity_gap(ch.h_ref_dl[0], ch.h_ref_ul[0], g)},
                       {"colinearity_gap_best_phase", colinearity_gap(ch.h_ref_dl[0], ch.h_ref_ul[0])}};
      std::cout << j.dump(2) << '\n';
    } else if (*beam) {
      const RunConfig cfg = parse_config(config_text(bp_config));
      const ChannelSet ch = generate_channel_set(cfg.scenario, cfg.ris);
      if (ch.n_dl() == 0 || ch.n_ul() == 0)
        throw InvalidArgument("beampattern needs at least one DL and one UL user");
      const SolverResult r = run_bcd(ch, cfg.ris, cfg.scenario, cfg.solver);
      const auto grid = default_beam_grid();
      const bool st = cfg.ris.structural_scattering;
      const auto& s = r.final_state;
      const BeampatternSet pats = normalize_beampatterns(
          {beampattern(s, ch, BeamKind::kDlImpinging, grid, st, 0),
           beampattern(s, ch, BeamKind::kDlReflected, grid, st, 0),
           beampattern(s, ch, BeamKind::kUlImpinging, grid, st, 0),
           beampattern(s, ch, BeamKind::kUlReflected, grid, st, 0)});
      if (bp_out == "-") {
        write_beampattern_csv(std::cout, grid, pats);
      } else {
        std::ofstream f(bp_out);
        if (!f) throw InvalidArgument("cannot open output file '" + bp_out + "'");
        write_beampattern_csv(f, grid, pats);
      }
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
