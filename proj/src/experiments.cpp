#include "bdris/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "bdris/channel.hpp"
#include "bdris/reciprocity.hpp"

namespace bdris {
namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names{
      {ExperimentKind::kConvergence, "convergence"},
      {ExperimentKind::kSweepElements, "sweep_elements"},
      {ExperimentKind::kSweepUlAngle, "sweep_ul_angle"},
      {ExperimentKind::kRateRegion, "rate_region"},
      {ExperimentKind::kGroupSize, "group_size"},
      {ExperimentKind::kSiSweep, "si_sweep"},
      {ExperimentKind::kBeampattern, "beampattern"},
      {ExperimentKind::kBoundCheck, "bound_check"},
      {ExperimentKind::kMuRateRegion, "mu_rate_region"},
  };
  return names;
}

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) v.push_back(lo + step * i);
  return v;
}

void set_geometry(ScenarioConfig& s, double bs, double dl, double ul) {
  s.angle_bs_deg = bs;
  s.angles_dl_deg = {dl};
  s.angles_ul_deg = {ul};
}

VariantOutcome solve_variant(const ChannelSet& ch, const RunConfig& cfg, const Variant& v,
                             ExperimentKind kind, const std::vector<double>& grid) {
  VariantOutcome o;
  o.variant = v.name;
  try {
    const SolverResult r = run_bcd(ch, v.ris, cfg.scenario, cfg.solver);
    o.dl_rate = r.dl_rate;
    o.ul_rate = r.ul_rate;
    o.sum_rate = r.dl_rate + r.ul_rate;
    o.objective = r.objective;
    o.iters = r.iters_used;
    o.pdd_violation = r.pdd_violation;
    o.converged = r.converged;
    o.objective_trace = r.objective_trace;
    o.bcd_trace = r.trace;
    o.pdd_trace = r.last_pdd_trace;
    if (kind == ExperimentKind::kBeampattern && ch.n_dl() > 0 && ch.n_ul() > 0) {
      const bool st = v.ris.structural_scattering;
      const auto& s = r.final_state;
      o.beampattern = normalize_beampatterns(
          {beampattern(s, ch, BeamKind::kDlImpinging, grid, st, 0),
           beampattern(s, ch, BeamKind::kDlReflected, grid, st, 0),
           beampattern(s, ch, BeamKind::kUlImpinging, grid, st, 0),
           beampattern(s, ch, BeamKind::kUlReflected, grid, st, 0)});
    }
  } catch (const NumericalFailure& e) {
    o.failed = true;
    o.error = e.what();
  }
  return o;
}

BoundRecord bound_record(const ChannelSet& ch) {
  if (ch.n_dl() == 0 || ch.n_ul() == 0) throw InvalidArgument("bound_check needs one DL and one UL user");
  const CVec g = ch.g_bs_ris.col(0);
  const auto ul = ul_power_bound(g, ch.h_ref_ul[0]);
  const auto dl = dl_power_bound(ch.h_ref_dl[0], g);
  return {ul.bound_value, dl.bound_value, ul.attained, dl.attained,
          colinearity_gap(ch.h_ref_dl[0], ch.h_ref_ul[0], g)};
}

nlohmann::json to_json(const VariantOutcome& o) {
  nlohmann::json j{{"variant", o.variant},     {"dl_rate", o.dl_rate},
                   {"ul_rate", o.ul_rate},     {"sum_rate", o.sum_rate},
                   {"objective", o.objective}, {"iters", o.iters},
                   {"pdd_violation", o.pdd_violation}, {"converged", o.converged},
                   {"failed", o.failed},       {"error", o.error},
                   {"objective_trace", o.objective_trace}};
  if (o.beampattern) {
    const auto& b = *o.beampattern;
    j["beampattern"] = {{"dl_impinging", b[0]},
                        {"dl_reflected", b[1]},
                        {"ul_impinging", b[2]},
                        {"ul_reflected", b[3]}};
  }
  return j;
}

VariantOutcome outcome_from_json(const nlohmann::json& j) {
  VariantOutcome o;
  o.variant = j.at("variant").get<std::string>();
  o.dl_rate = j.at("dl_rate").get<double>();
  o.ul_rate = j.at("ul_rate").get<double>();
  o.sum_rate = j.at("sum_rate").get<double>();
  o.objective = j.at("objective").get<double>();
  o.iters = j.at("iters").get<int>();
  o.pdd_violation = j.at("pdd_violation").get<double>();
  o.converged = j.at("converged").get<bool>();
  o.failed = j.at("failed").get<bool>();
  o.error = j.at("error").get<std::string>();
  o.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  if (j.contains("beampattern")) {
    const auto& b = j.at("beampattern");
    o.beampattern = BeampatternSet{b.at("dl_impinging").get<std::vector<double>>(),
                                   b.at("dl_reflected").get<std::vector<double>>(),
                                   b.at("ul_impinging").get<std::vector<double>>(),
                                   b.at("ul_reflected").get<std::vector<double>>()};
  }
  return o;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kind_names())
    if (kind == k) return name;
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  for (const auto& [kind, name] : kind_names())
    if (name == s) return kind;
  throw InvalidArgument("unknown experiment kind '" + s + "'");
}

Variant variant_by_name(const std::string& name) {
  Variant v;
  v.name = name;
  if (name == "nonreciprocal") {
    v.ris.architecture = Architecture::kFull;
    v.ris.reciprocal = false;
  } else if (name == "reciprocal") {
    v.ris.architecture = Architecture::kFull;
    v.ris.reciprocal = true;
  } else if (name == "diagonal") {
    v.ris.architecture = Architecture::kSingle;
    v.ris.reciprocal = true;
  } else {
    throw InvalidArgument("unknown RIS variant '" + name + "'");
  }
  return v;
}

std::vector<Variant> default_variants() {
  return {variant_by_name("nonreciprocal"), variant_by_name("reciprocal"),
          variant_by_name("diagonal")};
}

void ExperimentSpec::validate() const {
  if (n_seeds < 1) throw InvalidArgument("n_seeds must be >= 1");
  if (sweep_values.empty()) throw InvalidArgument("sweep_values must not be empty");
  if (parallelism < 1) throw InvalidArgument("parallelism must be >= 1");
  if (variants.empty() && kind != ExperimentKind::kBoundCheck)
    throw InvalidArgument("at least one RIS variant is required");
  base.scenario.validate();
  base.solver.validate();
}

ExperimentSpec default_spec(ExperimentKind kind) {
  ExperimentSpec sp;
  sp.kind = kind;
  sp.variants = default_variants();
  sp.sweep_values = {0.0};
  auto& s = sp.base.scenario;
  s.n_ris_elements = 16;
  s.n_antennas = 1;
  s.n_dl_users = 1;
  s.n_ul_users = 1;
  set_geometry(s, 30.0, 90.0, 60.0);
  s.direct_links_blocked = true;
  switch (kind) {
    case ExperimentKind::kConvergence:
      s.n_ris_elements = 32;
      s.n_antennas = 2;
      s.n_dl_users = 2;
      s.n_ul_users = 2;
      set_geometry(s, 30.0, 150.0, 75.0);
      s.direct_links_blocked = false;
      break;
    case ExperimentKind::kSweepElements:
      set_geometry(s, 30.0, 150.0, 75.0);
      s.direct_links_blocked = false;
      sp.sweep_values = {8, 16, 24, 32};
      break;
    case ExperimentKind::kSweepUlAngle:
      sp.sweep_values = range(0.0, 180.0, 15.0);
      break;
    case ExperimentKind::kRateRegion:
      sp.sweep_values = range(0.0, 1.0, 0.1);
      break;
    case ExperimentKind::kGroupSize:
      sp.sweep_values = {1, 2, 4, 8, 16};
      sp.variants = {variant_by_name("nonreciprocal"), variant_by_name("reciprocal")};
      break;
    case ExperimentKind::kSiSweep:
      set_geometry(s, 30.0, 150.0, 75.0);
      sp.sweep_values = range(-130.0, -70.0, 10.0);
      break;
    case ExperimentKind::kBeampattern:
    case ExperimentKind::kBoundCheck:
      break;
    case ExperimentKind::kMuRateRegion:
      s.n_antennas = 2;
      s.n_dl_users = 2;
      s.n_ul_users = 2;
      s.angles_dl_deg = {90.0, 120.0};
      s.angles_ul_deg = {60.0, 75.0};
      sp.sweep_values = range(0.0, 1.0, 0.1);
      break;
  }
  return sp;
}

ExperimentSpec parse_experiment(const std::string& yaml_text,
                                std::optional<ExperimentKind> kind_override) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw InvalidArgument(std::string("config parse error: ") + e.what());
  }
  const YAML::Node ex = root && root.IsMap() ? root["experiment"] : YAML::Node();
  if (ex && !ex.IsMap()) throw InvalidArgument("config section 'experiment' must be a mapping");

  ExperimentKind kind = ExperimentKind::kRateRegion;
  if (kind_override)
    kind = *kind_override;
  else if (ex && ex["kind"])
    kind = parse_experiment_kind(ex["kind"].as<std::string>());

  ExperimentSpec sp = default_spec(kind);
  sp.base = parse_config(yaml_text, sp.base);
  if (ex) {
    try {
      for (const auto& kv : ex) {
        const auto key = kv.first.as<std::string>();
        if (key == "kind") continue;
        if (key == "sweep_values") {
          sp.sweep_values = kv.second.as<std::vector<double>>();
        } else if (key == "n_seeds") {
          sp.n_seeds = kv.second.as<int>();
        } else if (key == "parallelism") {
          sp.parallelism = kv.second.as<int>();
        } else if (key == "variants") {
          sp.variants.clear();
          for (const auto& n : kv.second) sp.variants.push_back(variant_by_name(n.as<std::string>()));
        } else {
          throw InvalidArgument("unknown key '" + key + "' in section 'experiment'");
        }
      }
    } catch (const YAML::Exception& e) {
      throw InvalidArgument(std::string("bad value in section 'experiment': ") + e.what());
    }
  }
  // the scattering flag is a property of the model, not of the variant
  for (auto& v : sp.variants) v.ris.structural_scattering = sp.base.ris.structural_scattering;
  sp.validate();
  return sp;
}

RunConfig apply_sweep(const ExperimentSpec& spec, double value, std::uint64_t seed,
                      Variant& variant) {
  RunConfig c = spec.base;
  c.scenario.rng_seed = seed;
  auto& s = c.scenario;
  switch (spec.kind) {
    case ExperimentKind::kSweepElements:
      s.n_ris_elements = static_cast<int>(std::lround(value));
      break;
    case ExperimentKind::kSweepUlAngle:
      s.angles_ul_deg = {value};
      break;
    case ExperimentKind::kRateRegion:
    case ExperimentKind::kMuRateRegion:
      s.alpha_dl = value;
      break;
    case ExperimentKind::kGroupSize:
      if (variant.ris.architecture != Architecture::kSingle) {
        variant.ris.architecture = Architecture::kGroup;
        variant.ris.group_size = static_cast<int>(std::lround(value));
      }
      break;
    case ExperimentKind::kSiSweep:
      s.si_power_db = value;
      break;
    case ExperimentKind::kConvergence:
    case ExperimentKind::kBeampattern:
    case ExperimentKind::kBoundCheck:
      break;
  }
  s.validate();
  variant.ris.validate(s.n_ris_elements);
  c.ris = variant.ris;
  return c;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult res;
  res.spec = spec;
  if (spec.kind == ExperimentKind::kBeampattern) res.beam_grid = default_beam_grid();
  const std::size_t n_points = spec.sweep_values.size();
  const std::size_t n_tasks = n_points * static_cast<std::size_t>(spec.n_seeds);
  res.records.resize(n_tasks);

  auto run_task = [&](std::size_t idx) {
    const std::size_t p = idx / spec.n_seeds;
    const std::size_t j = idx % spec.n_seeds;
    ExperimentRecord& rec = res.records[idx];
    rec.sweep_value = spec.sweep_values[p];
    rec.seed = spec.base.scenario.rng_seed + j;

    // the channel depends on the sweep point and seed only
    Variant probe{"probe", RisConfig{Architecture::kSingle, 0, false, true}};
    const RunConfig chan_cfg = apply_sweep(spec, rec.sweep_value, rec.seed, probe);
    const ChannelSet ch = generate_channel_set(chan_cfg.scenario, probe.ris);

    if (spec.kind == ExperimentKind::kBoundCheck) {
      rec.bounds = bound_record(ch);
      return;
    }
    for (const auto& v0 : spec.variants) {
      Variant v = v0;
      const RunConfig cfg = apply_sweep(spec, rec.sweep_value, rec.seed, v);
      rec.variants.push_back(solve_variant(ch, cfg, v, spec.kind, res.beam_grid));
    }
  };

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= n_tasks) return;
      try {
        run_task(idx);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::min<std::size_t>(spec.parallelism, std::max<std::size_t>(1, n_tasks));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  if (spec.kind != ExperimentKind::kBoundCheck) {
    for (std::size_t p = 0; p < n_points; ++p) {
      bool any_ok = false;
      for (int j = 0; j < spec.n_seeds; ++j)
        for (const auto& o : res.records[p * spec.n_seeds + j].variants) any_ok |= !o.failed;
      if (!any_ok)
        throw NumericalFailure("every solver run failed at sweep value " +
                               std::to_string(spec.sweep_values[p]));
    }
  }
  res.aggregates = aggregate(res.records, spec.variants);
  return res;
}

std::vector<Aggregate> aggregate(const std::vector<ExperimentRecord>& records,
                                 const std::vector<Variant>& variants) {
  std::vector<double> points;
  for (const auto& r : records)
    if (std::find(points.begin(), points.end(), r.sweep_value) == points.end())
      points.push_back(r.sweep_value);
  std::vector<Aggregate> out;
  for (double p : points)
    for (const auto& v : variants) {
      Aggregate a;
      a.sweep_value = p;
      a.variant = v.name;
      std::vector<double> sums;
      double dl = 0.0, ul = 0.0;
      for (const auto& r : records) {
        if (r.sweep_value != p) continue;
        for (const auto& o : r.variants)
          if (o.variant == v.name && !o.failed) {
            sums.push_back(o.sum_rate);
            dl += o.dl_rate;
            ul += o.ul_rate;
          }
      }
      a.n_ok = static_cast<int>(sums.size());
      if (a.n_ok > 0) {
        double mean = 0.0;
        for (double x : sums) mean += x;
        mean /= a.n_ok;
        double var = 0.0;
        for (double x : sums) var += (x - mean) * (x - mean);
        a.mean_sum_rate = mean;
        a.std_sum_rate = a.n_ok > 1 ? std::sqrt(var / (a.n_ok - 1)) : 0.0;
        a.mean_dl_rate = dl / a.n_ok;
        a.mean_ul_rate = ul / a.n_ok;
      }
      out.push_back(a);
    }
  return out;
}

OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "json") return OutputFormat::kJson;
  throw InvalidArgument("unknown output format '" + s + "'");
}

nlohmann::json to_json(const ExperimentSpec& spec) {
  nlohmann::json j = to_json(spec.base);
  std::vector<std::string> names;
  for (const auto& v : spec.variants) names.push_back(v.name);
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < spec.n_seeds; ++i) seeds.push_back(spec.base.scenario.rng_seed + i);
  j["experiment"] = {{"kind", to_string(spec.kind)},
                     {"sweep_values", spec.sweep_values},
                     {"n_seeds", spec.n_seeds},
                     {"seeds", seeds},
                     {"variants", names}};
  return j;
}

nlohmann::json to_json(const ExperimentResult& result) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : result.records) {
    nlohmann::json jr{{"sweep_value", r.sweep_value}, {"seed", r.seed}};
    jr["variants"] = nlohmann::json::array();
    for (const auto& o : r.variants) jr["variants"].push_back(to_json(o));
    if (r.bounds) {
      const auto& b = *r.bounds;
      jr["bounds"] = {{"ul_bound", b.ul_bound},
                      {"dl_bound", b.dl_bound},
                      {"ul_attained", b.ul_attained},
                      {"dl_attained", b.dl_attained},
                      {"colinearity_gap", b.colinearity_gap}};
    }
    recs.push_back(jr);
  }
  nlohmann::json aggs = nlohmann::json::array();
  for (const auto& a : result.aggregates)
    aggs.push_back({{"sweep_value", a.sweep_value},
                    {"variant", a.variant},
                    {"n_ok", a.n_ok},
                    {"mean_sum_rate", a.mean_sum_rate},
                    {"std_sum_rate", a.std_sum_rate},
                    {"mean_dl_rate", a.mean_dl_rate},
                    {"mean_ul_rate", a.mean_ul_rate}});
  nlohmann::json j{{"config", to_json(result.spec)}, {"records", recs}, {"aggregates", aggs}};
  if (!result.beam_grid.empty()) j["beam_grid"] = result.beam_grid;
  return j;
}

std::vector<ExperimentRecord> records_from_json(const nlohmann::json& j) {
  std::vector<ExperimentRecord> out;
  for (const auto& jr : j.at("records")) {
    ExperimentRecord r;
    r.sweep_value = jr.at("sweep_value").get<double>();
    r.seed = jr.at("seed").get<std::uint64_t>();
    for (const auto& jo : jr.at("variants")) r.variants.push_back(outcome_from_json(jo));
    if (jr.contains("bounds")) {
      const auto& b = jr.at("bounds");
      r.bounds = BoundRecord{b.at("ul_bound").get<double>(), b.at("dl_bound").get<double>(),
                             b.at("ul_attained").get<bool>(), b.at("dl_attained").get<bool>(),
                             b.at("colinearity_gap").get<double>()};
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_results_csv(std::ostream& out, const ExperimentResult& result) {
  out << "# config: " << to_json(result.spec).dump() << '\n';
  const bool bounds = result.spec.kind == ExperimentKind::kBoundCheck;
  static const char* fields[] = {"dl_rate", "ul_rate", "sum_rate", "objective", "iters",
                                 "pdd_violation", "converged", "failed"};
  out << "sweep_value,seed";
  if (bounds) {
    out << ",ul_bound,dl_bound,ul_attained,dl_attained,colinearity_gap";
  } else {
    for (const auto& v : result.spec.variants)
      for (const char* f : fields) out << ',' << v.name << '_' << f;
  }
  out << '\n';
  out.precision(17);
  for (const auto& r : result.records) {
    out << r.sweep_value << ',' << r.seed;
    if (bounds) {
      const BoundRecord b = r.bounds.value_or(BoundRecord{});
      out << ',' << b.ul_bound << ',' << b.dl_bound << ',' << b.ul_attained << ','
          << b.dl_attained << ',' << b.colinearity_gap;
    } else {
      for (const auto& v : result.spec.variants) {
        const auto it = std::find_if(r.variants.begin(), r.variants.end(),
                                     [&](const VariantOutcome& o) { return o.variant == v.name; });
        if (it == r.variants.end()) {
          out << ",,,,,,,,";
          continue;
        }
        out << ',' << it->dl_rate << ',' << it->ul_rate << ',' << it->sum_rate << ','
            << it->objective << ',' << it->iters << ',' << it->pdd_violation << ','
            << it->converged << ',' << it->failed;
      }
    }
    out << '\n';
  }
}

void emit_results(const ExperimentResult& result, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::kCsv)
    write_results_csv(out, result);
  else
    out << to_json(result).dump(2) << '\n';
}

void emit_results(const ExperimentResult& result, OutputFormat format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open output file '" + path + "'");
  emit_results(result, format, out);
  if (!out) throw InvalidArgument("failed writing output file '" + path + "'");
}

}  // namespace bdris
