#include "bdris/bcd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "bdris/rng.hpp"

namespace bdris {
namespace {

// Power of sum_k (A + mu I)^{-1} b_k given the eigendecomposition of A.
struct PowerProfile {
  RVec lambda;  // eigenvalues of A
  RVec weight;  // sum_k |(U^H b_k)_n|^2
  double power(double mu) const {
    double p = 0.0;
    for (Eigen::Index n = 0; n < lambda.size(); ++n) {
      if (weight(n) == 0.0) continue;
      const double d = lambda(n) + mu;
      if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
      p += weight(n) / (d * d);
    }
    return p;
  }
};

CMat random_unitary(CounterRng& rng, int m) {
  const CMat x = complex_normal_matrix(rng, m, m);
  Eigen::HouseholderQR<CMat> qr(x);
  return qr.householderQ() * CMat::Identity(m, m);
}

}  // namespace

PrecoderUpdate update_precoder(const TransceiverState& s, const ChannelSet& ch,
                               const RisConfig& ris, const AuxVars& aux, double alpha_dl,
                               double p_budget, const SolverOptions& opts) {
  if (!(p_budget >= 0.0)) throw InvalidArgument("power budget must be >= 0");
  const int n = ch.n_antennas(), kd = ch.n_dl();
  if (aux.tau_dl.size() != kd || aux.iota_dl.size() != kd || aux.tau_ul.size() != ch.n_ul())
    throw InvalidArgument("auxiliary variables do not match the user counts");
  PrecoderUpdate out{CMat::Zero(n, kd), 0.0};
  if (kd == 0) return out;
  const double ad = alpha_dl, au = 1.0 - alpha_dl;
  const auto eff = effective_channels(ch, s.scattering, ris.structural_scattering);

  CMat a = CMat::Zero(n, n);
  CMat b(n, kd);
  for (int k = 0; k < kd; ++k) {
    const CVec hc = eff.dl[k].conjugate();
    a += ad * std::norm(aux.tau_dl(k)) * hc * hc.adjoint();
    b.col(k) = ad * std::sqrt(1.0 + aux.iota_dl(k)) * aux.tau_dl(k) * hc;
  }
  if (ch.n_ul() > 0) {
    const CMat wt = s.combiner * aux.tau_ul.cwiseAbs2().cast<cd>().asDiagonal() * s.combiner.adjoint();
    a += au * eff.si_loop.adjoint() * wt * eff.si_loop;
  }
  a = 0.5 * (a + a.adjoint());

  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  if (es.info() != Eigen::Success) throw NumericalFailure("precoder eigendecomposition failed");
  const CMat ub = es.eigenvectors().adjoint() * b;
  PowerProfile prof{es.eigenvalues(), ub.rowwise().squaredNorm()};
  // eigenvalues at rounding level count as zero so that a null-space component forces mu > 0
  const double floor = 1e-14 * std::max(1.0, prof.lambda.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < prof.lambda.size(); ++i)
    if (prof.lambda(i) < floor) prof.lambda(i) = 0.0;

  double mu = 0.0;
  if (!(prof.power(0.0) <= p_budget)) {
    double hi = 1.0;
    int guard = 0;
    while (!(prof.power(hi) <= p_budget)) {
      hi *= 2.0;
      if (++guard > 2000) throw NumericalFailure("precoder multiplier bracket diverged");
    }
    double lo = 0.0;
    for (int it = 0; it < opts.bisection_max; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double pm = prof.power(mid);
      if (pm <= p_budget)
        hi = mid;
      else
        lo = mid;
      if (std::abs(hi * (prof.power(hi) - p_budget)) <= opts.bisection_tol && hi - lo <= 1e-15 * hi)
        break;
    }
    mu = hi;  // feasible side
  }
  RVec inv(prof.lambda.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    const double d = prof.lambda(i) + mu;
    inv(i) = d > 0.0 ? 1.0 / d : 0.0;
  }
  out.precoder = es.eigenvectors() * (inv.cast<cd>().asDiagonal() * ub);
  out.mu = mu;
  if (!out.precoder.allFinite()) throw NumericalFailure("precoder update produced non-finite values");
  return out;
}

CMat update_combiner_raw(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                         const AuxVars& aux) {
  const int n = ch.n_antennas(), iu = ch.n_ul();
  if (aux.tau_ul.size() != iu || aux.iota_ul.size() != iu)
    throw InvalidArgument("auxiliary variables do not match the user counts");
  CMat w = CMat::Zero(n, iu);
  if (iu == 0) return w;
  const auto eff = effective_channels(ch, s.scattering, ris.structural_scattering);
  CMat zeta = ch.noise_var_linear * CMat::Identity(n, n);
  for (int p = 0; p < iu; ++p) zeta += ch.p_ul_linear * eff.ul[p] * eff.ul[p].adjoint();
  const CMat mp = eff.si_loop * s.precoder;
  zeta += mp * mp.adjoint();
  zeta = 0.5 * (zeta + zeta.adjoint());
  const Eigen::LDLT<CMat> ldlt(zeta);
  for (int i = 0; i < iu; ++i) {
    const cd tau = aux.tau_ul(i);
    if (std::norm(tau) == 0.0) {
      const double hn = eff.ul[i].norm();
      w.col(i) = hn > 0.0 ? CVec(eff.ul[i] / hn) : CVec(CVec::Unit(n, 0));
      continue;
    }
    const cd coef = std::sqrt((1.0 + aux.iota_ul(i)) * ch.p_ul_linear) * std::conj(tau) / std::norm(tau);
    w.col(i) = ldlt.solve(eff.ul[i]) * coef;
  }
  if (!w.allFinite()) throw NumericalFailure("combiner update produced non-finite values");
  return w;
}

CombinerUpdate update_combiner(const TransceiverState& s, const ChannelSet& ch,
                               const RisConfig& ris, const AuxVars& aux) {
  CombinerUpdate out;
  out.combiner = update_combiner_raw(s, ch, ris, aux);
  if (out.combiner.cols() == 0) return out;
  out.scale = out.combiner.norm();
  if (!(out.scale > 0.0)) {
    out.combiner.setZero();
    out.combiner(0, 0) = 1.0;
    out.scale = 1.0;
    return out;
  }
  out.combiner /= out.scale;
  return out;
}

TransceiverState initial_state(const ChannelSet& ch, const RisConfig& ris,
                               const ScenarioConfig& cfg, int start) {
  if (start < 0 || start >= 0x4000) throw InvalidArgument("start index must lie in [0, 16384)");
  const std::uint32_t base = static_cast<std::uint32_t>(start) * 0x20000u;
  const int m = ch.n_elements(), n = ch.n_antennas(), kd = ch.n_dl(), iu = ch.n_ul();
  ris.validate(m);
  const int m_g = ris.effective_group_size(m);
  std::vector<CMat> blocks;
  for (int g = 0; g < m / m_g; ++g) {
    CounterRng rng(cfg.rng_seed, Stream::kSolverInit, base + static_cast<std::uint32_t>(g));
    if (m_g == 1) {
      blocks.push_back(CMat::Constant(1, 1, rng.unit_phase()));
    } else {
      const CMat q = random_unitary(rng, m_g);
      if (ris.reciprocal) {
        const CMat y = q * q.transpose();
        blocks.push_back(0.5 * (y + y.transpose()));
      } else {
        blocks.push_back(q);
      }
    }
  }
  TransceiverState s;
  s.scattering = block_diagonal(blocks);
  const auto eff = effective_channels(ch, s.scattering, ris.structural_scattering);

  s.precoder = CMat::Zero(n, kd);
  if (kd > 0) {
    const double amp = std::sqrt(ch.p_dl_linear / kd);
    for (int k = 0; k < kd; ++k) {
      const double hn = eff.dl[k].norm();
      if (hn > 0.0) {
        s.precoder.col(k) = amp * eff.dl[k].conjugate() / hn;
      } else {
        CounterRng rng(cfg.rng_seed, Stream::kSolverInit, base + 0x10000u + k);
        CVec v = complex_normal_matrix(rng, n, 1);
        s.precoder.col(k) = amp * v / v.norm();
      }
    }
  }
  s.combiner = CMat::Zero(n, iu);
  for (int i = 0; i < iu; ++i) {
    const double hn = eff.ul[i].norm();
    s.combiner.col(i) = hn > 0.0 ? CVec(eff.ul[i] / hn) : CVec(CVec::Unit(n, 0));
  }
  if (iu > 0) s.combiner /= s.combiner.norm();
  return s;
}

SolverResult run_bcd(const ChannelSet& ch, const RisConfig& ris, const ScenarioConfig& cfg,
                     const SolverOptions& opts) {
  opts.validate();
  SolverResult best = run_bcd(ch, ris, cfg, opts, initial_state(ch, ris, cfg, 0));
  for (int j = 1; j < opts.n_starts; ++j) {
    SolverResult r = run_bcd(ch, ris, cfg, opts, initial_state(ch, ris, cfg, j));
    if (r.objective > best.objective) {
      r.best_start = j;
      best = std::move(r);
    }
  }
  return best;
}

SolverResult run_bcd(const ChannelSet& ch, const RisConfig& ris, const ScenarioConfig& cfg,
                     const SolverOptions& opts, TransceiverState s) {
  opts.validate();
  ris.validate(ch.n_elements());
  const double alpha = cfg.alpha_dl;
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha_dl must lie in [0, 1]");
  const bool structural = ris.structural_scattering;

  auto terms = [&](const TransceiverState& st) {
    const auto eff = effective_channels(ch, st.scattering, structural);
    return std::make_pair(dl_terms(st, ch, eff), ul_terms(st, ch, eff));
  };

  SolverResult res;
  Rates rates = evaluate_rates(s, ch, ris, alpha);
  res.initial_objective = rates.objective;
  double prev = rates.objective;
  if (!std::isfinite(prev)) throw NumericalFailure("initial objective is not finite", 0);
  AuxVars aux;

  for (int t = 1; t <= opts.max_bcd_iters; ++t) {
    auto [dl, ul] = terms(s);
    aux = iota_from_terms(dl, ul);
    tau_from_terms(dl, ul, aux);

    s.precoder = update_precoder(s, ch, ris, aux, alpha, ch.p_dl_linear, opts).precoder;

    const CombinerUpdate cu = update_combiner(s, ch, ris, aux);
    s.combiner = cu.combiner;
    aux.tau_ul *= cu.scale;

    // keep the PDD output only when it does not lose surrogate value
    const PddResult pr = run_pdd(s, ch, ris, aux, alpha, opts.pdd);
    {
      auto [dl0, ul0] = terms(s);
      const double before = f_tau_from_terms(dl0, ul0, aux, alpha);
      TransceiverState cand = s;
      cand.scattering = pr.phi;
      auto [dl1, ul1] = terms(cand);
      const double after = f_tau_from_terms(dl1, ul1, aux, alpha);
      if (after >= before) s.scattering = pr.phi;
    }
    res.pdd_violation = pr.violation;
    if (opts.pdd.record_trace) res.last_pdd_trace = pr.trace;

    rates = evaluate_rates(s, ch, ris, alpha);
    if (!std::isfinite(rates.objective)) throw NumericalFailure("objective is not finite", t);
    res.objective_trace.push_back(rates.objective);
    if (opts.record_trace)
      res.trace.push_back({t, rates.objective, rates.dl, rates.ul, pr.violation});
    res.iters_used = t;
    const double change = std::abs(rates.objective - prev) / std::max(std::abs(prev), 1e-12);
    prev = rates.objective;
    if (change < opts.bcd_rel_tol) {
      res.converged = true;
      break;
    }
  }
  res.final_state = std::move(s);
  res.aux = aux;
  res.objective = rates.objective;
  res.dl_rate = rates.dl;
  res.ul_rate = rates.ul;
  return res;
}

void write_bcd_trace_csv(std::ostream& out, const std::vector<BcdTraceRow>& trace) {
  out << "iter,f_o,dl_rate,ul_rate,pdd_violation\n";
  out.precision(17);
  for (const auto& r : trace)
    out << r.iter << ',' << r.objective << ',' << r.dl_rate << ',' << r.ul_rate << ','
        << r.pdd_violation << '\n';
}

void write_pdd_trace_csv(std::ostream& out, const std::vector<PddTraceRow>& trace) {
  out << "outer_iter,inner_iters,rho,violation_inf_norm,inner_objective\n";
  out.precision(17);
  for (const auto& r : trace)
    out << r.outer_iter << ',' << r.inner_iters << ',' << r.rho << ',' << r.violation << ','
        << r.inner_objective << '\n';
}

}  // namespace bdris
