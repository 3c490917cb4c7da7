// Acceptance runner: one PASS/FAIL line per criterion, exit code 1 if any fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bdris/bcd.hpp"
#include "bdris/channel.hpp"
#include "bdris/experiments.hpp"
#include "bdris/fp_transforms.hpp"
#include "bdris/metrics.hpp"
#include "bdris/pdd.hpp"
#include "bdris/reciprocity.hpp"
#include "oracle.hpp"

using namespace bdris;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// Random small instance with M <= 8 and K, I <= 2.
struct Instance {
  ChannelSet ch;
  RisConfig ris;
  TransceiverState s;
  double alpha = 0.5;
};

Instance random_instance(std::uint64_t seed) {
  CounterRng rng(seed, Stream::kTest, 1);
  auto pick = [&](int lo, int hi) {
    return lo + std::min(hi - lo, static_cast<int>(rng.uniform() * (hi - lo + 1)));
  };
  RunConfig c;
  auto& sc = c.scenario;
  sc.n_ris_elements = pick(1, 8);
  sc.n_antennas = pick(1, 3);
  sc.n_dl_users = pick(1, 2);
  sc.n_ul_users = pick(1, 2);
  sc.angles_dl_deg = {180.0 * rng.uniform()};
  sc.angles_ul_deg = {180.0 * rng.uniform()};
  sc.direct_links_blocked = rng.uniform() < 0.5;
  sc.alpha_dl = rng.uniform();
  sc.rng_seed = seed;

  std::vector<int> divisors;
  for (int d = 1; d <= sc.n_ris_elements; ++d)
    if (sc.n_ris_elements % d == 0) divisors.push_back(d);
  c.ris.architecture = Architecture::kGroup;
  c.ris.group_size = divisors[pick(0, static_cast<int>(divisors.size()) - 1)];
  c.ris.reciprocal = rng.uniform() < 0.5;

  Instance in;
  in.ris = c.ris;
  in.alpha = sc.alpha_dl;
  in.ch = generate_channel_set(sc, c.ris);
  const CMat phi =
      oracle::random_scattering(sc.n_ris_elements, c.ris.group_size, c.ris.reciprocal, rng);
  in.s = oracle::random_state(in.ch, phi, rng);
  return in;
}

// ---------------------------------------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = Clock::now();
  double worst = 0.0, worst_iota = 0.0;
  for (int n = 0; n < 100; ++n) {
    Instance in = random_instance(1000 + n);
    AuxVars aux = update_iota(in.s, in.ch, in.ris);
    aux = update_tau(in.s, in.ch, in.ris, aux);
    const double fo = oracle::objective(in.s, in.ch, in.ris.structural_scattering, in.alpha);
    const double ft = eval_f_tau(in.s, in.ch, in.ris, aux, in.alpha);
    const double fi = eval_f_iota(in.s, in.ch, in.ris, aux, in.alpha);
    const double scale = std::max(std::abs(fo), 1e-300);
    worst = std::max(worst, std::abs(ft - fo) / scale);
    worst_iota = std::max(worst_iota, std::abs(fi - fo) / scale);
  }
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = worst <= 1e-10 && worst_iota <= 1e-10 && dt < 10.0;
  o.detail = "max rel |f_tau - f_o| = " + fmt("%.2e", worst) + ", |f_iota - f_o| = " +
             fmt("%.2e", worst_iota) + ", " + fmt("%.2f s", dt);
  return o;
}

// Scale-free central-difference gradient: max_j |df/dx_j| * ||x|| over real and imaginary parts.
double fd_residual(CMat& x, const std::function<double()>& f) {
  const double norm = std::max(x.norm(), 1e-300);
  const double h = 1e-5 * norm;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    for (const cd dir : {cd{1.0, 0.0}, cd{0.0, 1.0}}) {
      const cd keep = x(j);
      x(j) = keep + h * dir;
      const double fp = f();
      x(j) = keep - h * dir;
      const double fm = f();
      x(j) = keep;
      worst = std::max(worst, std::abs(fp - fm) / (2.0 * h) * norm);
    }
  }
  return worst;
}

Outcome criterion2() {
  double r_tau = 0.0, r_w = 0.0, r_p = 0.0;
  for (int n = 0; n < 50; ++n) {
    Instance in = random_instance(2000 + n);
    AuxVars aux = update_iota(in.s, in.ch, in.ris);
    aux = update_tau(in.s, in.ch, in.ris, aux);

    CMat tau_dl = aux.tau_dl, tau_ul = aux.tau_ul;
    auto f_tau_of = [&]() {
      AuxVars a = aux;
      a.tau_dl = tau_dl;
      a.tau_ul = tau_ul;
      return eval_f_tau(in.s, in.ch, in.ris, a, in.alpha);
    };
    r_tau = std::max({r_tau, fd_residual(tau_dl, f_tau_of), fd_residual(tau_ul, f_tau_of)});

    TransceiverState s = in.s;
    s.combiner = update_combiner_raw(in.s, in.ch, in.ris, aux);
    r_w = std::max(r_w, fd_residual(s.combiner, [&]() {
                     return eval_f_tau(s, in.ch, in.ris, aux, in.alpha);
                   }));
  }

  // The precoder check needs instances whose unconstrained maximizer is finite, i.e. the power
  // multiplier stays at zero under an unlimited budget.
  int interior = 0;
  for (int n = 0; interior < 50 && n < 1000; ++n) {
    Instance in = random_instance(3000 + n);
    AuxVars aux = update_iota(in.s, in.ch, in.ris);
    aux = update_tau(in.s, in.ch, in.ris, aux);
    TransceiverState s = in.s;
    const PrecoderUpdate pu = update_precoder(s, in.ch, in.ris, aux, in.alpha, 1e30);
    if (pu.mu != 0.0) continue;
    ++interior;
    s.precoder = pu.precoder;
    r_p = std::max(r_p, fd_residual(s.precoder, [&]() {
                     return eval_f_tau(s, in.ch, in.ris, aux, in.alpha);
                   }));
  }
  Outcome o;
  o.pass = r_tau < 1e-6 && r_w < 1e-6 && r_p < 1e-6 && interior == 50;
  o.detail = "gradient residuals tau " + fmt("%.2e", r_tau) + ", w " + fmt("%.2e", r_w) +
             ", p " + fmt("%.2e", r_p) + " (50 instances each)";
  return o;
}

struct FeasibilityReport {
  double power_excess = 0.0;
  double combiner_norm_err = 0.0;
  double unitarity = 0.0;
  bool symmetric = true;
  bool block_structure = true;
  double violation = 0.0;
};

void check_feasibility(const SolverResult& r, const ChannelSet& ch, const RisConfig& ris,
                       FeasibilityReport& rep) {
  const auto& st = r.final_state;
  rep.power_excess =
      std::max(rep.power_excess, st.precoder.squaredNorm() / ch.p_dl_linear - 1.0);
  if (st.combiner.size() > 0)
    rep.combiner_norm_err = std::max(rep.combiner_norm_err, std::abs(st.combiner.norm() - 1.0));
  const int m = ch.n_elements();
  const int mg = ris.effective_group_size(m);
  for (int g = 0; g < m / mg; ++g)
    rep.unitarity =
        std::max(rep.unitarity, oracle::unitarity_error(st.scattering.block(g * mg, g * mg, mg, mg)));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (a / mg != b / mg && st.scattering(a, b) != cd{0.0, 0.0}) rep.block_structure = false;
      if (ris.reciprocal && st.scattering(a, b) != st.scattering(b, a)) rep.symmetric = false;
    }
  rep.violation = std::max(rep.violation, r.pdd_violation);
}

Outcome criterion3() {
  FeasibilityReport rep;
  int runs = 0;
  std::vector<Variant> variants = default_variants();
  for (bool rec : {false, true}) {
    Variant v{rec ? "group4_reciprocal" : "group4", {}};
    v.ris.architecture = Architecture::kGroup;
    v.ris.group_size = 4;
    v.ris.reciprocal = rec;
    variants.push_back(v);
  }
  for (int geometry = 0; geometry < 2; ++geometry) {
    ExperimentSpec spec = default_spec(ExperimentKind::kRateRegion);
    if (geometry == 1) {
      spec.base.scenario.n_ris_elements = 8;
      spec.base.scenario.n_antennas = 2;
      spec.base.scenario.n_dl_users = 2;
      spec.base.scenario.n_ul_users = 2;
      spec.base.scenario.direct_links_blocked = false;
    }
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      for (Variant v : variants) {
        const RunConfig c = apply_sweep(spec, 0.5, seed, v);
        const ChannelSet ch = generate_channel_set(c.scenario, v.ris);
        const SolverResult r = run_bcd(ch, v.ris, c.scenario, c.solver);
        check_feasibility(r, ch, v.ris, rep);
        ++runs;
      }
    }
  }
  Outcome o;
  o.pass = rep.power_excess <= 1e-9 && rep.combiner_norm_err <= 1e-12 && rep.unitarity <= 1e-6 &&
           rep.symmetric && rep.block_structure && rep.violation <= 1e-4;
  o.detail = std::to_string(runs) + " runs: power excess " + fmt("%.2e", rep.power_excess) +
             ", | ||W|| - 1 | " + fmt("%.2e", rep.combiner_norm_err) + ", unitarity " +
             fmt("%.2e", rep.unitarity) + ", symmetric " + (rep.symmetric ? "yes" : "no") +
             ", block-diagonal " + (rep.block_structure ? "yes" : "no") + ", PDD violation " +
             fmt("%.2e", rep.violation);
  return o;
}

Outcome criterion4() {
  const ExperimentSpec spec = default_spec(ExperimentKind::kConvergence);
  Outcome o;
  o.pass = true;
  std::ostringstream os;
  for (Variant v : default_variants()) {
    const RunConfig c = apply_sweep(spec, 0.0, 1, v);
    const ChannelSet ch = generate_channel_set(c.scenario, v.ris);
    const auto t0 = Clock::now();
    const SolverResult r = run_bcd(ch, v.ris, c.scenario, c.solver);
    const double dt = seconds_since(t0);
    const auto& tr = r.objective_trace;
    double last_change = 1.0;
    if (tr.size() >= 2)
      last_change = std::abs(tr.back() - tr[tr.size() - 2]) / std::max(std::abs(tr.back()), 1e-300);
    const bool ok = r.converged && r.iters_used <= 100 && last_change < 1e-4 && dt < 300.0;
    o.pass = o.pass && ok;
    os << v.name << " " << r.iters_used << " iters " << fmt("%.1f s", dt) << (ok ? "" : " (!)")
       << "; ";
  }
  o.detail = os.str();
  return o;
}

// Exhaustive 1 degree x 1 degree phase grid for a 2-element diagonal surface, N = K = I = 1.
// For each phase pair the DL power is optimized exactly over [0, P_d].
double brute_force_two_element(const ChannelSet& ch, bool structural, double alpha) {
  const double pu = ch.p_ul_linear, s2 = ch.noise_var_linear, pmax = ch.p_dl_linear;
  const cd g0 = ch.g_bs_ris(0, 0), g1 = ch.g_bs_ris(1, 0);
  const cd hd0 = ch.h_ref_dl[0](0), hd1 = ch.h_ref_dl[0](1);
  const cd hu0 = ch.h_ref_ul[0](0), hu1 = ch.h_ref_ul[0](1);
  const cd si = ch.h_si(0, 0);
  std::vector<cd> phase(360);
  for (int d = 0; d < 360; ++d) phase[d] = std::polar(1.0, d * kPi / 180.0);
  const double off = structural ? 1.0 : 0.0;

  auto value = [&](double a, double b, double c, double q) {
    return alpha * std::log2(1.0 + a * q) + (1.0 - alpha) * std::log2(1.0 + b / (c * q + s2));
  };
  double best = -1.0;
  for (int d0 = 0; d0 < 360; ++d0) {
    const cd t0 = phase[d0] - off;
    for (int d1 = 0; d1 < 360; ++d1) {
      const cd t1 = phase[d1] - off;
      const cd hdl = ch.h_dir_dl[0](0) + hd0 * t0 * g0 + hd1 * t1 * g1;
      const cd hul = ch.h_dir_ul_bs[0](0) + g0 * t0 * hu0 + g1 * t1 * hu1;
      const cd hud = ch.h_dir_ul_dl[0][0] + hd0 * t0 * hu0 + hd1 * t1 * hu1;
      const cd loop = si + g0 * t0 * g0 + g1 * t1 * g1;
      const double a = std::norm(hdl) / (pu * std::norm(hud) + s2);
      const double b = pu * std::norm(hul);
      const double c = std::norm(loop);
      // stationary points of the weighted rate in q: alpha a (cq+s2+b)(cq+s2) = (1-alpha) c b (1+aq)
      std::vector<double> cand{0.0, pmax};
      const double qa = alpha * a * c * c;
      const double qb = alpha * a * c * (2.0 * s2 + b) - (1.0 - alpha) * c * b * a;
      const double qc = alpha * a * s2 * (s2 + b) - (1.0 - alpha) * c * b;
      if (qa > 0.0) {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
          cand.push_back((-qb + std::sqrt(disc)) / (2.0 * qa));
          cand.push_back((-qb - std::sqrt(disc)) / (2.0 * qa));
        }
      } else if (qb != 0.0) {
        cand.push_back(-qc / qb);
      }
      for (double q : cand)
        if (q >= 0.0 && q <= pmax) best = std::max(best, value(a, b, c, q));
    }
  }
  return best;
}

Outcome criterion5() {
  const auto t0 = Clock::now();
  ExperimentSpec spec = default_spec(ExperimentKind::kRateRegion);
  spec.base.scenario.n_ris_elements = 2;
  // the two-phase landscape has several basins; a single random start lands in the wrong one
  // on about half of the seeds
  spec.base.solver.n_starts = 32;
  double worst = 1e300;
  std::ostringstream os;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Variant v = variant_by_name("diagonal");
    const RunConfig c = apply_sweep(spec, 0.5, seed, v);
    const ChannelSet ch = generate_channel_set(c.scenario, v.ris);
    const SolverResult r = run_bcd(ch, v.ris, c.scenario, c.solver);
    const double solver = oracle::objective(r.final_state, ch, v.ris.structural_scattering, 0.5);
    const double grid = brute_force_two_element(ch, v.ris.structural_scattering, 0.5);
    worst = std::min(worst, solver / grid);
  }
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = worst >= 0.99 && dt < 120.0;
  o.detail = "min solver/grid objective ratio " + fmt("%.4f", worst) + " over 10 seeds, " +
             fmt("%.1f s", dt);
  return o;
}

Outcome criterion6() {
  double worst_gap = 0.0;
  double worst_excess = -1e300;
  int samples = 0;
  CounterRng rng(6, Stream::kTest, 6);
  for (int m : {2, 4, 8, 16}) {
    for (int n = 0; n < 100; ++n) {
      const CVec g = oracle::random_vector(m, rng);
      const CVec h = oracle::random_vector(m, rng);
      const cd gh = (g.transpose() * h).value();
      const double bound = std::pow(g.norm() * h.norm() + std::abs(gh), 2);
      const double attained = std::norm(oracle::bilinear(g, phi_ul_optimal(g, h) - CMat::Identity(m, m), h));
      worst_gap = std::max(worst_gap, std::abs(attained - bound) / bound);
      worst_gap = std::max(worst_gap, std::abs(ul_power_bound(g, h).bound_value - bound) / bound);
      if (n < 25) {
        for (int u = 0; u < 100; ++u) {
          const CMat phi = oracle::random_unitary(m, rng);
          const double p = std::norm(oracle::bilinear(g, phi - CMat::Identity(m, m), h));
          worst_excess = std::max(worst_excess, p / bound - 1.0);
          ++samples;
        }
      }
    }
  }
  Outcome o;
  o.pass = worst_gap <= 1e-9 && worst_excess <= 0.0;
  o.detail = "max rel gap to bound " + fmt("%.2e", worst_gap) + "; " + std::to_string(samples) +
             " random unitaries, max power/bound - 1 = " + fmt("%.3f", worst_excess);
  return o;
}

// Per-variant sum rates of one experiment, indexed [variant][record].
std::vector<std::vector<double>> sum_rates(const ExperimentResult& res, bool& any_failed) {
  std::vector<std::vector<double>> out(res.spec.variants.size());
  for (const auto& rec : res.records)
    for (std::size_t v = 0; v < rec.variants.size(); ++v) {
      any_failed = any_failed || rec.variants[v].failed;
      out[v].push_back(rec.variants[v].sum_rate);
    }
  return out;
}

double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

double standard_error(const std::vector<double>& x) {
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  ExperimentSpec spec = default_spec(ExperimentKind::kRateRegion);
  spec.sweep_values = {0.5};
  spec.n_seeds = 20;
  spec.variants = default_variants();
  const ExperimentResult res = run_experiment(spec);
  bool failed = false;
  const auto r = sum_rates(res, failed);
  const double gap1 = mean(diff(r[0], r[1]));
  const double gap2 = mean(diff(r[1], r[2]));
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = !failed && gap1 >= -1e-6 && gap2 >= -1e-6 && dt < 600.0;
  o.detail = "means " + fmt("%.3f", mean(r[0])) + " / " + fmt("%.3f", mean(r[1])) + " / " +
             fmt("%.3f", mean(r[2])) + " (non-reciprocal / reciprocal / diagonal), " +
             fmt("%.1f s", dt);
  return o;
}

Outcome criterion8() {
  ExperimentSpec spec = default_spec(ExperimentKind::kRateRegion);
  spec.base.scenario.angles_dl_deg = {90.0};
  spec.base.scenario.angles_ul_deg = {90.0};
  spec.base.scenario.rician_k_reflected = 1e12;
  spec.sweep_values = {0.5};
  spec.n_seeds = 3;
  spec.variants = default_variants();
  const ExperimentResult res = run_experiment(spec);
  bool failed = false;
  const auto r = sum_rates(res, failed);
  std::vector<double> means{mean(r[0]), mean(r[1]), mean(r[2])};
  const double hi = *std::max_element(means.begin(), means.end());
  const double lo = *std::min_element(means.begin(), means.end());
  const double spread = (hi - lo) / hi;
  Outcome o;
  o.pass = !failed && spread <= 0.05;
  o.detail = "sum-rates " + fmt("%.4f", means[0]) + " / " + fmt("%.4f", means[1]) + " / " +
             fmt("%.4f", means[2]) + ", relative spread " + fmt("%.2e", spread);
  return o;
}

Outcome criterion9() {
  const std::vector<double> grid = default_beam_grid();
  auto peak = [&](const CVec& g) {
    const std::vector<double> resp = specular_response(g, grid);
    return grid[std::max_element(resp.begin(), resp.end()) - resp.begin()];
  };
  ScenarioConfig sc;
  sc.angle_bs_deg = 30.0;
  sc.n_ris_elements = 16;
  sc.rician_k_reflected = 1e12;
  const ChannelSet ch = generate_channel_set(sc, RisConfig{});
  const double p_channel = peak(ch.g_bs_ris.col(0));
  const double p_los = peak(steering_vector(30.0, 16));
  Outcome o;
  o.pass = std::abs(p_channel - 150.0) <= 0.5 && std::abs(p_los - 150.0) <= 0.5;
  o.detail = "peak of |g^T a(theta)| at " + fmt("%.1f deg", p_channel) + " (sampled G), " +
             fmt("%.1f deg", p_los) + " (LoS array)";
  return o;
}

Outcome criterion10() {
  const auto t0 = Clock::now();
  ExperimentSpec spec = default_spec(ExperimentKind::kGroupSize);
  spec.n_seeds = 20;
  spec.variants = {variant_by_name("nonreciprocal")};
  const ExperimentResult res = run_experiment(spec);
  std::map<double, std::vector<double>> by_size;
  bool failed = false;
  for (const auto& rec : res.records) {
    failed = failed || rec.variants[0].failed;
    by_size[rec.sweep_value].push_back(rec.variants[0].sum_rate);
  }
  Outcome o;
  o.pass = !failed;
  std::ostringstream os;
  const std::vector<double>* prev = nullptr;
  for (const auto& [mg, rates] : by_size) {
    os << "Mg=" << mg << ": " << fmt("%.3f", mean(rates));
    if (prev) {
      const auto d = diff(rates, *prev);
      const bool ok = mean(d) >= -standard_error(d);
      o.pass = o.pass && ok;
      if (!ok) os << " (drop)";
    }
    os << "; ";
    prev = &rates;
  }
  os << fmt("%.1f s", seconds_since(t0));
  o.detail = os.str();
  return o;
}

// Packed index of (p, q) computed by direct enumeration of the free entries.
int enumerated_index(int p, int q, int m, bool rec) {
  if (!rec) return q * m + p;
  if (p < q) std::swap(p, q);
  int idx = 0;
  for (int c = 0; c < m; ++c)
    for (int r = c; r < m; ++r) {
      if (r == p && c == q) return idx;
      ++idx;
    }
  return -1;
}

Outcome criterion11() {
  int cases = 0;
  bool enumeration_ok = true;
  double worst = 0.0;
  CounterRng rng(11, Stream::kTest, 11);
  for (int m = 1; m <= 8; ++m) {
    for (int mg = 1; mg <= m; ++mg) {
      if (m % mg != 0) continue;
      for (bool rec : {false, true}) {
        ++cases;
        const Eigen::MatrixXd k = build_permutation(mg, rec);
        if (k.rows() != mg * mg || k.cols() != packed_size(mg, rec)) enumeration_ok = false;
        for (int q = 0; q < mg && enumeration_ok; ++q)
          for (int p = 0; p < mg; ++p) {
            const int col = enumerated_index(p, q, mg, rec);
            for (int c = 0; c < k.cols(); ++c)
              if (k(q * mg + p, c) != (c == col ? 1.0 : 0.0)) enumeration_ok = false;
            if (packed_index(p, q, mg, rec) != col) enumeration_ok = false;
          }
        for (int g = 0; g < m / mg; ++g) {
          const Eigen::MatrixXd r = build_reshape(m, mg, g);
          if (r.rows() != m * m || r.cols() != mg * mg) {
            enumeration_ok = false;
            continue;
          }
          for (int q = 0; q < mg; ++q)
            for (int p = 0; p < mg; ++p) {
              const int row = (g * mg + q) * m + (g * mg + p);
              for (int rr = 0; rr < m * m; ++rr)
                if (r(rr, q * mg + p) != (rr == row ? 1.0 : 0.0)) enumeration_ok = false;
            }
        }

        const CMat phi = oracle::random_scattering(m, mg, rec, rng);
        const CMat c = bdris::complex_normal_matrix(rng, m, m);
        const CMat b = bdris::complex_normal_matrix(rng, m, m);
        const CMat a = bdris::complex_normal_matrix(rng, m, m);
        const auto [t1, t2] = trace_vec_identity_check(c, phi, mg, rec);
        const auto [q1, q2] = quadratic_identity_check(b, a, phi, mg, rec);
        cd trace_direct{0.0, 0.0};
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) trace_direct += c(i, j) * phi(j, i);
        worst = std::max({worst, std::abs(t1 - t2) / std::max(1.0, std::abs(t1)),
                          std::abs(t1 - trace_direct) / std::max(1.0, std::abs(t1)),
                          std::abs(q1 - q2) / std::max(1.0, std::abs(q1))});
      }
    }
  }
  Outcome o;
  o.pass = enumeration_ok && worst <= 1e-10;
  o.detail = std::to_string(cases) + " (M, Mg, mode) cases, enumerations " +
             (enumeration_ok ? "match" : "MISMATCH") + ", max identity rel err " +
             fmt("%.2e", worst);
  return o;
}

Outcome criterion12() {
  Outcome o;
  o.pass = true;
  o.detail =
      "informational: sweep curves have no tabulated reference values, covered by criteria 7, 8 and 10";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, Outcome (*)()>> criteria{
      {"transform tightness", criterion1},   {"stationarity", criterion2},
      {"constraint feasibility", criterion3}, {"convergence", criterion4},
      {"brute-force oracle", criterion5},    {"bound attainment", criterion6},
      {"architecture ordering", criterion7}, {"aligned-user equivalence", criterion8},
      {"specular reflection", criterion9},   {"group-size monotonicity", criterion10},
      {"identity oracles", criterion11},     {"sweep curves", criterion12},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
