#include "bdris/pdd.hpp"

#include <algorithm>
#include <cmath>

namespace bdris {
namespace {

void check_group_args(int m_total, int m_g) {
  if (m_g < 1) throw InvalidArgument("group size must be >= 1");
  if (m_total < m_g || m_total % m_g != 0)
    throw InvalidArgument("group size must divide the number of elements");
}

CVec vec(const CMat& x) { return Eigen::Map<const CVec>(x.data(), x.size()); }

CMat unvec(const CVec& v, Eigen::Index rows) {
  return Eigen::Map<const CMat>(v.data(), rows, v.size() / rows);
}

// S^T kron T, the quadratic form of Tr(T X S X^H) in vec(X).
CMat kron_transpose(const CMat& s, const CMat& t) {
  const Eigen::Index m = s.rows(), n = t.rows();
  CMat out(m * n, m * n);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index c = 0; c < m; ++c) out.block(a * n, c * n, n, n) = s(c, a) * t;
  return out;
}

// Dense K_g as a complex matrix, for the explicit path.
CMat permutation_c(int m_g, bool reciprocal) { return build_permutation(m_g, reciprocal).cast<cd>(); }

// Packed-domain quadratic K^H (S^T kron T) K for reciprocal groups, built entry by entry.
CMat packed_quadratic(const CMat& s, const CMat& t) {
  const int m = static_cast<int>(s.rows());
  const int n = packed_size(m, true);
  std::vector<std::pair<int, int>> pos(n);
  for (int q = 0; q < m; ++q)
    for (int p = q; p < m; ++p) pos[packed_index(p, q, m, true)] = {p, q};
  CMat out(n, n);
  for (int j2 = 0; j2 < n; ++j2) {
    const auto [p2, q2] = pos[j2];
    for (int j1 = 0; j1 < n; ++j1) {
      const auto [p1, q1] = pos[j1];
      // entry (b, a) of X against entry (d, c): S(c, a) * T(b, d)
      auto term = [&](int b, int a, int d, int c) { return s(c, a) * t(b, d); };
      cd v = term(p1, q1, p2, q2);
      if (p2 != q2) v += term(p1, q1, q2, p2);
      if (p1 != q1) {
        v += term(q1, p1, p2, q2);
        if (p2 != q2) v += term(q1, p1, q2, p2);
      }
      out(j1, j2) = v;
    }
  }
  return out;
}

// Right-hand side of the group-g problem in matrix form (before applying K_g^H).
CMat group_rhs(const PhiQuadratic& q, const CMat& l_adj, const CMat& phi_full, const PddState& st,
               int g, int m_g) {
  const int off = g * m_g;
  CMat rhs = l_adj.block(off, off, m_g, m_g);
  if (phi_full.rows() > m_g) {
    CMat cross = q.t.middleRows(off, m_g) * phi_full * q.s.middleCols(off, m_g);
    cross -= q.t.block(off, off, m_g, m_g) * st.phi[g] * q.s.block(off, off, m_g, m_g);
    rhs -= cross;
  }
  rhs += st.psi[g] / (2.0 * st.rho) - 0.5 * st.lambda[g];
  return rhs;
}

CVec apply_kh(const CMat& rhs, bool reciprocal) {
  if (!reciprocal) return vec(rhs);
  const int m = static_cast<int>(rhs.rows());
  CVec out(packed_size(m, true));
  for (int q = 0; q < m; ++q)
    for (int p = q; p < m; ++p)
      out(packed_index(p, q, m, true)) = p == q ? rhs(p, p) : rhs(p, q) + rhs(q, p);
  return out;
}

// Per-group solver for  min phi^H (Q_gg + I/(2 rho)) phi - 2 Re(phi^H K^H vec(rhs)),
// factored once per PDD call so that each inner solve is a pair of small products.
class GroupSolver {
 public:
  GroupSolver(const CMat& s_gg, const CMat& t_gg, bool reciprocal, bool explicit_solve)
      : m_(static_cast<int>(s_gg.rows())), reciprocal_(reciprocal), explicit_(explicit_solve) {
    if (explicit_) {
      const CMat k = permutation_c(m_, reciprocal_);
      quad_ = k.adjoint() * kron_transpose(s_gg, t_gg) * k;
      ktk_ = (k.adjoint() * k).real().diagonal();
      return;
    }
    if (!reciprocal_) {
      Eigen::SelfAdjointEigenSolver<CMat> et(t_gg), es(s_gg);
      if (et.info() != Eigen::Success || es.info() != Eigen::Success)
        throw NumericalFailure("eigendecomposition failed in group solver");
      ut_ = et.eigenvectors();
      us_ = es.eigenvectors();
      lt_ = et.eigenvalues();
      ls_ = es.eigenvalues();
    } else {
      const int n = packed_size(m_, true);
      scale_.resize(n);
      for (int q = 0; q < m_; ++q)
        for (int p = q; p < m_; ++p)
          scale_(packed_index(p, q, m_, true)) = p == q ? 1.0 : 1.0 / std::sqrt(2.0);
      const CMat h = scale_.asDiagonal() * packed_quadratic(s_gg, t_gg) * scale_.asDiagonal();
      Eigen::SelfAdjointEigenSolver<CMat> eh(h);
      if (eh.info() != Eigen::Success)
        throw NumericalFailure("eigendecomposition failed in group solver");
      v_ = eh.eigenvectors();
      lv_ = eh.eigenvalues();
    }
  }

  CMat solve(const CMat& rhs, double rho) const {
    const double pen = 1.0 / (2.0 * rho);
    if (explicit_) {
      CMat delta = quad_;
      delta.diagonal() += pen * ktk_.cast<cd>();
      return unpack_group(solve_phi_group(delta, apply_kh(rhs, reciprocal_)), m_, reciprocal_);
    }
    if (!reciprocal_) {
      CMat y = ut_.adjoint() * rhs * us_;
      for (int j = 0; j < m_; ++j)
        for (int i = 0; i < m_; ++i) y(i, j) /= lt_(i) * ls_(j) + pen;
      return ut_ * y * us_.adjoint();
    }
    CVec z = v_.adjoint() * (scale_.asDiagonal() * apply_kh(rhs, true));
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) /= lv_(i) + pen;
    const CVec phi = scale_.asDiagonal() * (v_ * z);
    return unpack_group(phi, m_, true);
  }

 private:
  int m_;
  bool reciprocal_;
  bool explicit_;
  CMat quad_;
  RVec ktk_;
  CMat ut_, us_, v_;
  RVec lt_, ls_, lv_, scale_;
};

double augmented_lagrangian(const PhiQuadratic& q, const CMat& phi_full, const PddState& st) {
  double al = phi_cost(q, phi_full);
  for (std::size_t g = 0; g < st.phi.size(); ++g) {
    const CMat diff = st.phi[g] - st.psi[g];
    al += (st.lambda[g].adjoint() * diff).trace().real() + diff.squaredNorm() / (2.0 * st.rho);
  }
  return al;
}

}  // namespace

Eigen::MatrixXd build_permutation(int m_g, bool reciprocal) {
  if (m_g < 1) throw InvalidArgument("group size must be >= 1");
  const int n = packed_size(m_g, reciprocal);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m_g * m_g, n);
  for (int q = 0; q < m_g; ++q)
    for (int p = 0; p < m_g; ++p) k(q * m_g + p, packed_index(p, q, m_g, reciprocal)) = 1.0;
  return k;
}

Eigen::MatrixXd build_reshape(int m_total, int m_g, int g) {
  check_group_args(m_total, m_g);
  if (g < 0 || g >= m_total / m_g) throw InvalidArgument("group index out of range");
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m_total * m_total, m_g * m_g);
  for (int m = 0; m < m_g; ++m)
    for (int n = 0; n < m_g; ++n) r((m_g * g + m) * m_total + (m_g * g + n), m * m_g + n) = 1.0;
  return r;
}

int packed_index(int p, int q, int m_g, bool reciprocal) {
  if (p < 0 || q < 0 || p >= m_g || q >= m_g) throw InvalidArgument("group entry out of range");
  if (!reciprocal) return q * m_g + p;
  if (p < q) std::swap(p, q);
  return q * (2 * m_g - q + 1) / 2 + (p - q);
}

CVec pack_group(const CMat& x, bool reciprocal) {
  if (x.rows() != x.cols()) throw InvalidArgument("group block must be square");
  if (!reciprocal) return vec(x);
  const int m = static_cast<int>(x.rows());
  CVec out(packed_size(m, true));
  for (int q = 0; q < m; ++q)
    for (int p = q; p < m; ++p) out(packed_index(p, q, m, true)) = x(p, q);
  return out;
}

CMat unpack_group(const CVec& packed, int m_g, bool reciprocal) {
  if (packed.size() != packed_size(m_g, reciprocal))
    throw InvalidArgument("packed length does not match the group size");
  if (!reciprocal) return unvec(packed, m_g);
  CMat x(m_g, m_g);
  for (int q = 0; q < m_g; ++q)
    for (int p = q; p < m_g; ++p) x(p, q) = x(q, p) = packed(packed_index(p, q, m_g, true));
  return x;
}

CMat group_block(const CMat& phi, int g, int m_g) {
  check_group_args(static_cast<int>(phi.rows()), m_g);
  if (g < 0 || g >= phi.rows() / m_g) throw InvalidArgument("group index out of range");
  return phi.block(g * m_g, g * m_g, m_g, m_g);
}

CMat block_diagonal(const std::vector<CMat>& blocks) {
  Eigen::Index m = 0;
  for (const auto& b : blocks) m += b.rows();
  CMat out = CMat::Zero(m, m);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return out;
}

std::pair<cd, cd> trace_vec_identity_check(const CMat& c, const CMat& phi, int m_g,
                                           bool reciprocal) {
  const int m = static_cast<int>(phi.rows());
  check_group_args(m, m_g);
  if (c.rows() != m || c.cols() != m) throw InvalidArgument("C must match Phi");
  const CMat ct = c.transpose();
  const CVec lhs_vec = vec(ct);
  CVec phi_vec = CVec::Zero(m * m);
  for (int g = 0; g < m / m_g; ++g)
    phi_vec += build_reshape(m, m_g, g).cast<cd>() * permutation_c(m_g, reciprocal) *
               pack_group(group_block(phi, g, m_g), reciprocal);
  return {(c * phi).trace(), lhs_vec.transpose() * phi_vec};
}

std::pair<cd, cd> quadratic_identity_check(const CMat& b, const CMat& a, const CMat& phi, int m_g,
                                           bool reciprocal) {
  const int m = static_cast<int>(phi.rows());
  check_group_args(m, m_g);
  CVec phi_vec = CVec::Zero(m * m);
  for (int g = 0; g < m / m_g; ++g)
    phi_vec += build_reshape(m, m_g, g).cast<cd>() * permutation_c(m_g, reciprocal) *
               pack_group(group_block(phi, g, m_g), reciprocal);
  const cd rhs = phi_vec.dot(kron_transpose(a, b) * phi_vec);
  return {(b * phi * a * phi.adjoint()).trace(), rhs};
}

CouplingMatrices assemble_coupling(const TransceiverState& s, const ChannelSet& ch,
                                   const AuxVars& aux) {
  const int m = ch.n_elements(), n = ch.n_antennas(), kd = ch.n_dl(), iu = ch.n_ul();
  if (aux.tau_dl.size() != kd || aux.tau_ul.size() != iu || aux.iota_dl.size() != kd ||
      aux.iota_ul.size() != iu)
    throw InvalidArgument("auxiliary variables do not match the user counts");
  const CMat& g = ch.g_bs_ris;

  CMat hd(m, kd), hdir_d(n, kd), hu(m, iu), hdir_u(n, iu), hud(iu, kd);
  for (int k = 0; k < kd; ++k) {
    hd.col(k) = ch.h_ref_dl[k];
    hdir_d.col(k) = ch.h_dir_dl[k];
  }
  for (int i = 0; i < iu; ++i) {
    hu.col(i) = ch.h_ref_ul[i];
    hdir_u.col(i) = ch.h_dir_ul_bs[i];
    for (int k = 0; k < kd; ++k) hud(i, k) = ch.h_dir_ul_dl[i][k];
  }
  const RVec tau_d2 = aux.tau_dl.cwiseAbs2();
  const RVec tau_u2 = aux.tau_ul.cwiseAbs2();
  CVec wd(kd), wu(iu);
  for (int k = 0; k < kd; ++k) wd(k) = std::sqrt(1.0 + aux.iota_dl(k)) * std::conj(aux.tau_dl(k));
  for (int i = 0; i < iu; ++i) wu(i) = std::sqrt(1.0 + aux.iota_ul(i)) * std::conj(aux.tau_ul(i));

  const CMat gp = g * s.precoder;                                               // M x K
  const CMat ppt = s.precoder * s.precoder.adjoint();                            // N x N
  const CMat wt = s.combiner * tau_u2.cast<cd>().asDiagonal() * s.combiner.adjoint();  // N x N
  const CMat gt = g.transpose();

  CouplingMatrices c;
  c.a1 = gp * gp.adjoint();
  c.a2 = g.conjugate() * wt * gt;
  c.b1 = hd.conjugate() * tau_d2.cast<cd>().asDiagonal() * hd.transpose();
  c.b2 = hu * hu.adjoint();
  c.c1 = gp * wd.asDiagonal() * hd.transpose();
  c.c2 = hu * wu.asDiagonal() * s.combiner.adjoint() * gt;
  c.d1 = g * ppt * (hdir_d.conjugate() * tau_d2.cast<cd>().asDiagonal() * hd.transpose());
  c.d2 = hu * (hud.conjugate() * tau_d2.cast<cd>().asDiagonal() * hd.transpose());
  c.d3 = hu * hdir_u.adjoint() * wt * gt;
  c.d = g * ppt * ch.h_si.adjoint() * wt * gt;
  c.f1 = c.a1 * c.b1;
  c.f2 = c.b2 * c.a2;
  c.j1 = c.b2 * c.b1;
  c.j2 = c.a1 * c.a2;
  return c;
}

PhiQuadratic phi_quadratic(const CouplingMatrices& c, bool structural, double alpha_dl,
                           double p_ul) {
  const double ad = alpha_dl, au = 1.0 - alpha_dl, sp = std::sqrt(p_ul);
  PhiQuadratic q;
  q.s = c.a1 + p_ul * c.b2;
  q.t = ad * c.b1 + au * c.a2;
  q.l = ad * (c.c1 - c.d1 - p_ul * c.d2) + au * (sp * c.c2 - p_ul * c.d3 - c.d);
  // expanding Theta = Phi - I moves S T into the linear term
  if (structural) q.l += ad * (c.f1 + p_ul * c.j1) + au * (c.j2 + p_ul * c.f2);
  return q;
}

double phi_cost(const PhiQuadratic& q, const CMat& phi) {
  return (q.t * phi * q.s * phi.adjoint()).trace().real() - 2.0 * (q.l * phi).trace().real();
}

std::pair<CMat, CVec> assemble_quadratic(int g, const CouplingMatrices& coupling,
                                         const PddState& st, const RisConfig& ris, double alpha_dl,
                                         double p_ul) {
  if (!(st.rho > 0.0)) throw InvalidArgument("penalty parameter rho must be positive");
  const int m = static_cast<int>(coupling.a1.rows());
  const int m_g = ris.effective_group_size(m);
  check_group_args(m, m_g);
  if (g < 0 || g >= m / m_g) throw InvalidArgument("group index out of range");
  if (static_cast<int>(st.phi.size()) != m / m_g) throw InvalidArgument("PDD state has wrong group count");
  const PhiQuadratic q = phi_quadratic(coupling, ris.structural_scattering, alpha_dl, p_ul);
  const CMat phi_full = block_diagonal(st.phi);
  const CMat rhs = group_rhs(q, q.l.adjoint(), phi_full, st, g, m_g);
  const int off = g * m_g;
  const CMat k = permutation_c(m_g, ris.reciprocal);
  CMat delta = k.adjoint() *
               (kron_transpose(q.s.block(off, off, m_g, m_g), q.t.block(off, off, m_g, m_g)) +
                CMat::Identity(m_g * m_g, m_g * m_g) / (2.0 * st.rho)) *
               k;
  return {delta, k.adjoint() * vec(rhs)};
}

CVec solve_phi_group(const CMat& delta_mat, const CVec& delta_vec) {
  if (delta_mat.rows() != delta_mat.cols() || delta_mat.rows() != delta_vec.size())
    throw InvalidArgument("solve_phi_group: dimension mismatch");
  if (!delta_mat.allFinite() || !delta_vec.allFinite())
    throw NumericalFailure("solve_phi_group: non-finite input");
  Eigen::LLT<CMat> llt(delta_mat);
  if (llt.info() == Eigen::Success) {
    CVec x = llt.solve(delta_vec);
    if (x.allFinite()) return x;
  }
  const double dim = static_cast<double>(delta_mat.rows());
  double ridge = 1e-12 * delta_mat.trace().real() / dim;
  if (!(ridge > 0.0)) ridge = 1e-12;
  CMat reg = delta_mat;
  reg.diagonal().array() += ridge;
  CVec x = reg.ldlt().solve(delta_vec);
  if (!x.allFinite()) throw NumericalFailure("solve_phi_group: singular system");
  return x;
}

CMat project_unitary(const CMat& x) {
  if (x.rows() != x.cols()) throw InvalidArgument("project_unitary needs a square matrix");
  if (!x.allFinite()) throw InvalidArgument("project_unitary needs finite input");
  Eigen::JacobiSVD<CMat> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

CMat project_symmetric_unitary(const CMat& x) {
  const CMat y = project_unitary(0.5 * (x + x.transpose()));
  return 0.5 * (y + y.transpose());
}

PddResult run_pdd(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                  const AuxVars& aux, double alpha_dl, const PddOptions& opts) {
  opts.validate();
  const int m = ch.n_elements();
  ris.validate(m);
  const int m_g = ris.effective_group_size(m);
  const int n_groups = m / m_g;
  const bool rec = ris.reciprocal;
  if (s.scattering.rows() != m || s.scattering.cols() != m)
    throw InvalidArgument("scattering matrix must be M x M");

  const CouplingMatrices coupling = assemble_coupling(s, ch, aux);
  const PhiQuadratic q = phi_quadratic(coupling, ris.structural_scattering, alpha_dl, ch.p_ul_linear);
  const CMat l_adj = q.l.adjoint();

  std::vector<GroupSolver> solvers;
  solvers.reserve(n_groups);
  for (int g = 0; g < n_groups; ++g) {
    const int off = g * m_g;
    solvers.emplace_back(q.s.block(off, off, m_g, m_g), q.t.block(off, off, m_g, m_g), rec,
                         opts.explicit_solve);
  }

  PddState st;
  st.rho = opts.rho_init;
  for (int g = 0; g < n_groups; ++g) {
    CMat blk = group_block(s.scattering, g, m_g);
    if (rec) blk = unpack_group(pack_group(blk, true), m_g, true);
    st.phi.push_back(blk);
    st.psi.push_back(blk);
    st.lambda.push_back(CMat::Zero(m_g, m_g));
  }
  CMat phi_full = block_diagonal(st.phi);

  PddResult res;
  double eps_switch = opts.dual_switch_init;
  double violation = 0.0;
  for (int outer = 1; outer <= opts.outer_max; ++outer) {
    double prev = augmented_lagrangian(q, phi_full, st);
    double al = prev;
    int inner = 0;
    while (inner < opts.inner_max) {
      ++inner;
      for (int g = 0; g < n_groups; ++g) {
        st.phi[g] = solvers[g].solve(group_rhs(q, l_adj, phi_full, st, g, m_g), st.rho);
        phi_full.block(g * m_g, g * m_g, m_g, m_g) = st.phi[g];
      }
      for (int g = 0; g < n_groups; ++g) st.psi[g] = project_unitary(st.phi[g] + st.rho * st.lambda[g]);
      al = augmented_lagrangian(q, phi_full, st);
      if (!std::isfinite(al)) throw NumericalFailure("PDD inner objective is not finite", outer);
      const bool stalled = std::abs(al - prev) <= opts.inner_tol * std::max(1.0, std::abs(prev));
      prev = al;
      if (stalled) break;
    }
    violation = 0.0;
    for (int g = 0; g < n_groups; ++g) violation = std::max(violation, max_abs(st.phi[g] - st.psi[g]));
    if (opts.record_trace) res.trace.push_back({outer, inner, st.rho, violation, al});
    res.outer_iters = outer;
    if (violation <= opts.outer_eps) {
      res.converged = true;
      break;
    }
    if (violation < eps_switch) {
      for (int g = 0; g < n_groups; ++g) st.lambda[g] += (st.phi[g] - st.psi[g]) / st.rho;
    } else {
      st.rho *= opts.c_penalty;
      if (!(st.rho > 1e-300)) throw NumericalFailure("PDD penalty parameter underflowed", outer);
    }
    eps_switch = std::max(opts.dual_switch_decay * violation, opts.outer_eps);
  }

  std::vector<CMat> out(n_groups);
  for (int g = 0; g < n_groups; ++g) out[g] = rec ? project_symmetric_unitary(st.psi[g]) : st.psi[g];
  res.phi = block_diagonal(out);
  res.violation = violation;
  return res;
}

}  // namespace bdris
