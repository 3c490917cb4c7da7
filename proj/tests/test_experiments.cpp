#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "bdris/experiments.hpp"

using namespace bdris;

namespace {

const char* kSmall = R"(
scenario:
  n_ris_elements: 4
solver:
  max_bcd_iters: 15
experiment:
  kind: rate_region
  sweep_values: [0.2, 0.8]
  n_seeds: 2
)";

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream os;
  write_results_csv(os, r);
  return os.str();
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("experiment kinds round trip through their names") {
  for (auto k : {ExperimentKind::kConvergence, ExperimentKind::kSweepElements,
                 ExperimentKind::kSweepUlAngle, ExperimentKind::kRateRegion,
                 ExperimentKind::kGroupSize, ExperimentKind::kSiSweep, ExperimentKind::kBeampattern,
                 ExperimentKind::kBoundCheck, ExperimentKind::kMuRateRegion})
    CHECK(parse_experiment_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_experiment_kind("rate-region"), InvalidArgument);
  CHECK(parse_output_format("json") == OutputFormat::kJson);
  CHECK_THROWS_AS(parse_output_format("xml"), InvalidArgument);
  CHECK_THROWS_AS(variant_by_name("hybrid"), InvalidArgument);
}

TEST_CASE("default specs") {
  const ExperimentSpec rr = default_spec(ExperimentKind::kRateRegion);
  CHECK(rr.sweep_values.size() == 11u);
  CHECK(rr.sweep_values.back() == doctest::Approx(1.0));
  CHECK(rr.variants.size() == 3u);
  const ExperimentSpec gs = default_spec(ExperimentKind::kGroupSize);
  CHECK(gs.sweep_values == std::vector<double>{1, 2, 4, 8, 16});
  CHECK(gs.variants.size() == 2u);
  CHECK(default_spec(ExperimentKind::kSweepUlAngle).sweep_values.size() == 13u);
  CHECK(default_spec(ExperimentKind::kSiSweep).sweep_values.front() == -130.0);
  const ExperimentSpec cv = default_spec(ExperimentKind::kConvergence);
  CHECK(cv.base.scenario.n_ris_elements == 32);
  CHECK(!cv.base.scenario.direct_links_blocked);
}

TEST_CASE("experiment section parsing") {
  const ExperimentSpec sp = parse_experiment(kSmall);
  CHECK(sp.kind == ExperimentKind::kRateRegion);
  CHECK(sp.sweep_values == std::vector<double>{0.2, 0.8});
  CHECK(sp.n_seeds == 2);
  CHECK(sp.base.scenario.n_ris_elements == 4);
  CHECK(sp.base.solver.max_bcd_iters == 15);

  const ExperimentSpec ov = parse_experiment(kSmall, ExperimentKind::kSiSweep);
  CHECK(ov.kind == ExperimentKind::kSiSweep);
  CHECK(ov.sweep_values == std::vector<double>{0.2, 0.8});

  const ExperimentSpec v = parse_experiment("experiment: {variants: [diagonal]}");
  REQUIRE(v.variants.size() == 1u);
  CHECK(v.variants[0].ris.architecture == Architecture::kSingle);
  const ExperimentSpec flat = parse_experiment("ris: {structural_scattering: false}");
  for (const auto& var : flat.variants) CHECK(!var.ris.structural_scattering);

  CHECK_THROWS_AS(parse_experiment("experiment: {n_seed: 2}"), InvalidArgument);
  CHECK_THROWS_AS(parse_experiment("experiment: {n_seeds: 0}"), InvalidArgument);
  CHECK_THROWS_AS(parse_experiment("experiment: {sweep_values: []}"), InvalidArgument);
  CHECK_THROWS_AS(parse_experiment("experiment: {kind: nope}"), InvalidArgument);
  CHECK_THROWS_AS(parse_experiment("experiment: [1, 2]"), InvalidArgument);
  CHECK_THROWS_AS(parse_experiment("experiment: {variants: [hybrid]}"), InvalidArgument);
}

TEST_CASE("sweep application") {
  ExperimentSpec sp = default_spec(ExperimentKind::kGroupSize);
  Variant v = variant_by_name("reciprocal");
  const RunConfig c = apply_sweep(sp, 4.0, 9, v);
  CHECK(c.scenario.rng_seed == 9u);
  CHECK(c.ris.architecture == Architecture::kGroup);
  CHECK(c.ris.effective_group_size(16) == 4);
  CHECK(c.ris.reciprocal);
  Variant bad = variant_by_name("nonreciprocal");
  CHECK_THROWS_AS(apply_sweep(sp, 3.0, 1, bad), InvalidArgument);

  sp = default_spec(ExperimentKind::kSweepElements);
  v = variant_by_name("diagonal");
  CHECK(apply_sweep(sp, 24.0, 1, v).scenario.n_ris_elements == 24);
  sp = default_spec(ExperimentKind::kSweepUlAngle);
  CHECK(apply_sweep(sp, 45.0, 1, v).scenario.ul_angle(0) == 45.0);
  sp = default_spec(ExperimentKind::kSiSweep);
  CHECK(apply_sweep(sp, -90.0, 1, v).scenario.si_power_db == -90.0);
  sp = default_spec(ExperimentKind::kRateRegion);
  CHECK(apply_sweep(sp, 0.3, 1, v).scenario.alpha_dl == 0.3);
}

TEST_CASE("records, CSV rows and JSON round trip") {
  const ExperimentSpec sp = parse_experiment(kSmall);
  const ExperimentResult r = run_experiment(sp);
  REQUIRE(r.records.size() == 4u);
  CHECK(r.records[0].sweep_value == 0.2);
  CHECK(r.records[1].seed == sp.base.scenario.rng_seed + 1);
  CHECK(r.records[2].sweep_value == 0.8);
  for (const auto& rec : r.records) {
    REQUIRE(rec.variants.size() == 3u);
    for (const auto& o : rec.variants) {
      CHECK(!o.failed);
      CHECK(o.sum_rate == doctest::Approx(o.dl_rate + o.ul_rate));
      CHECK(o.objective == doctest::Approx(rec.sweep_value * o.dl_rate + (1 - rec.sweep_value) * o.ul_rate));
    }
  }
  CHECK(r.aggregates.size() == 6u);
  for (const auto& a : r.aggregates) CHECK(a.n_ok == 2);

  const std::string csv = csv_of(r);
  CHECK(count_lines(csv) == 1 + 1 + 4);
  CHECK(csv.rfind("# config: ", 0) == 0);
  CHECK(csv.find("\nsweep_value,seed,nonreciprocal_dl_rate,") != std::string::npos);

  const nlohmann::json j = nlohmann::json::parse(to_json(r).dump());
  const auto back = records_from_json(j);
  REQUIRE(back.size() == r.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].seed == r.records[i].seed);
    CHECK(back[i].sweep_value == r.records[i].sweep_value);
    for (std::size_t v = 0; v < 3; ++v) {
      CHECK(back[i].variants[v].variant == r.records[i].variants[v].variant);
      CHECK(back[i].variants[v].sum_rate == r.records[i].variants[v].sum_rate);
      CHECK(back[i].variants[v].objective_trace == r.records[i].variants[v].objective_trace);
    }
  }
  CHECK(j.at("config").at("experiment").at("seeds").size() == 2u);
}

TEST_CASE("single point gives a single record") {
  ExperimentSpec sp = parse_experiment(kSmall);
  sp.sweep_values = {0.5};
  sp.n_seeds = 1;
  sp.variants = {variant_by_name("diagonal")};
  const ExperimentResult r = run_experiment(sp);
  CHECK(r.records.size() == 1u);
  CHECK(count_lines(csv_of(r)) == 3);
}

TEST_CASE("output does not depend on the worker count") {
  ExperimentSpec sp = parse_experiment(kSmall);
  sp.parallelism = 1;
  const std::string a = to_json(run_experiment(sp)).dump();
  sp.parallelism = 3;
  const std::string b = to_json(run_experiment(sp)).dump();
  CHECK(a == b);
}

TEST_CASE("variants at one point share the channel realization") {
  ExperimentSpec sp = parse_experiment(kSmall);
  sp.sweep_values = {0.5};
  sp.n_seeds = 1;
  const ExperimentResult r = run_experiment(sp);
  for (const auto& v : sp.variants) {
    const ChannelSet ch = generate_channel_set(sp.base.scenario, v.ris);
    ScenarioConfig sc = sp.base.scenario;
    sc.alpha_dl = 0.5;
    const SolverResult direct = run_bcd(ch, v.ris, sc, sp.base.solver);
    const auto& o = r.records[0].variants;
    const auto it = std::find_if(o.begin(), o.end(), [&](const VariantOutcome& x) { return x.variant == v.name; });
    REQUIRE(it != o.end());
    CHECK(it->objective == direct.objective);
  }
}

TEST_CASE("bound check records") {
  ExperimentSpec sp = default_spec(ExperimentKind::kBoundCheck);
  sp.n_seeds = 3;
  const ExperimentResult r = run_experiment(sp);
  REQUIRE(r.records.size() == 3u);
  for (const auto& rec : r.records) {
    REQUIRE(rec.bounds.has_value());
    CHECK(rec.bounds->ul_attained);
    CHECK(rec.bounds->dl_attained);
    CHECK(rec.bounds->ul_bound > 0.0);
    CHECK(rec.variants.empty());
  }
  const std::string csv = csv_of(r);
  CHECK(csv.find("sweep_value,seed,ul_bound,dl_bound,ul_attained,dl_attained,colinearity_gap\n") != std::string::npos);
  CHECK(count_lines(csv) == 5);
  const auto back = records_from_json(to_json(r));
  CHECK(back[1].bounds->dl_bound == r.records[1].bounds->dl_bound);
}

TEST_CASE("aggregates skip failures and handle empty groups") {
  std::vector<ExperimentRecord> recs(3);
  const std::vector<Variant> vars{variant_by_name("nonreciprocal"), variant_by_name("diagonal")};
  for (int i = 0; i < 3; ++i) {
    recs[i].sweep_value = 1.0;
    VariantOutcome o;
    o.variant = "nonreciprocal";
    o.sum_rate = 2.0 * i;
    o.dl_rate = i;
    o.ul_rate = i;
    o.failed = i == 2;
    recs[i].variants.push_back(o);
  }
  const auto agg = aggregate(recs, vars);
  REQUIRE(agg.size() == 2u);
  CHECK(agg[0].n_ok == 2);
  CHECK(agg[0].mean_sum_rate == 1.0);
  CHECK(agg[0].std_sum_rate == doctest::Approx(std::sqrt(2.0)));
  CHECK(agg[0].mean_dl_rate == 0.5);
  CHECK(agg[1].n_ok == 0);
  CHECK(agg[1].mean_sum_rate == 0.0);
  CHECK(aggregate({}, vars).empty());
}
