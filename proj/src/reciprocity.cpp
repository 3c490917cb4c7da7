#include "bdris/reciprocity.hpp"

#include <algorithm>
#include <cmath>

#include "bdris/simd/kernels.hpp"

namespace bdris {
namespace {

void require_nonzero(const CVec& v, const char* what) {
  if (v.size() == 0 || !(v.norm() > 0.0) || !v.allFinite())
    throw InvalidArgument(std::string(what) + " must be a finite nonzero vector");
}

void require_same_size(const CVec& a, const CVec& b) {
  if (a.size() != b.size()) throw InvalidArgument("vector lengths differ");
}

cd unit_phase_of(cd z) { return std::polar(1.0, std::arg(z)); }

double relative_gap(double bound, double achieved) {
  return bound > 0.0 ? std::abs(bound - achieved) / bound : std::abs(achieved);
}

}  // namespace

double ul_received_power(const CVec& g, const CVec& h_u, const CMat& phi) {
  require_same_size(g, h_u);
  CMat theta = phi;
  theta.diagonal().array() -= 1.0;
  return std::norm(simd::dotu(g, CVec(theta * h_u)));
}

double dl_received_power(const CVec& h_d, const CVec& g, const CMat& phi) {
  require_same_size(h_d, g);
  CMat theta = phi;
  theta.diagonal().array() -= 1.0;
  return std::norm(simd::dotu(h_d, CVec(theta * g)));
}

BoundReport ul_power_bound(const CVec& g, const CVec& h_u) {
  require_nonzero(g, "g");
  require_nonzero(h_u, "h_u");
  require_same_size(g, h_u);
  const cd inner = simd::dotu(g, h_u);
  BoundReport r;
  const double a = g.norm() * h_u.norm() + std::abs(inner);
  r.bound_value = a * a;
  r.phase_beta = unit_phase_of(-inner);
  r.residual = relative_gap(r.bound_value, ul_received_power(g, h_u, phi_ul_optimal(g, h_u)));
  r.attained = r.residual < kBoundTolerance;
  return r;
}

BoundReport dl_power_bound(const CVec& h_d, const CVec& g) {
  require_nonzero(h_d, "h_d");
  require_nonzero(g, "g");
  require_same_size(h_d, g);
  const cd inner = simd::dotu(h_d, g);
  BoundReport r;
  const double a = h_d.norm() * g.norm() + std::abs(inner);
  r.bound_value = a * a;
  r.phase_beta = unit_phase_of(-inner);
  r.residual = relative_gap(r.bound_value, dl_received_power(h_d, g, phi_dl_optimal(h_d, g)));
  r.attained = r.residual < kBoundTolerance;
  return r;
}

CMat orthonormal_completion(const CVec& x) {
  const Eigen::Index m = x.size();
  if (m == 0 || std::abs(x.norm() - 1.0) > 1e-9)
    throw InvalidArgument("orthonormal_completion needs a unit-norm vector");
  Eigen::Index pivot = 0;
  x.cwiseAbs().maxCoeff(&pivot);
  CMat u(m, m);
  u.col(0) = x;
  Eigen::Index col = 1;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (j == pivot) continue;
    CVec v = CVec::Unit(m, j);
    // two passes of classical Gram-Schmidt keep the columns orthogonal to rounding
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < col; ++c) v -= u.col(c) * u.col(c).dot(v);
    u.col(col++) = v / v.norm();
  }
  return u;
}

CMat construct_unitary_map(const CVec& src, const CVec& dst) {
  if (src.size() != dst.size() || src.size() == 0)
    throw InvalidArgument("construct_unitary_map needs equal non-empty lengths");
  if (std::abs(src.norm() - 1.0) > 1e-9 || std::abs(dst.norm() - 1.0) > 1e-9)
    throw InvalidArgument("construct_unitary_map needs unit-norm vectors");
  return orthonormal_completion(dst) * orthonormal_completion(src).adjoint();
}

CMat phi_ul_optimal(const CVec& g, const CVec& h_u) {
  require_nonzero(g, "g");
  require_nonzero(h_u, "h_u");
  require_same_size(g, h_u);
  const cd beta = unit_phase_of(-simd::dotu(g, h_u));
  return construct_unitary_map(h_u / h_u.norm(), beta * g.conjugate() / g.norm());
}

CMat phi_dl_optimal(const CVec& h_d, const CVec& g) {
  require_nonzero(h_d, "h_d");
  require_nonzero(g, "g");
  require_same_size(h_d, g);
  const cd beta = unit_phase_of(-simd::dotu(h_d, g));
  return construct_unitary_map(g / g.norm(), beta * h_d.conjugate() / h_d.norm());
}

double colinearity_gap(const CVec& h_d, const CVec& h_u) {
  require_nonzero(h_d, "h_d");
  require_nonzero(h_u, "h_u");
  require_same_size(h_d, h_u);
  const double c = std::abs(simd::dotc(h_d, h_u)) / (h_d.norm() * h_u.norm());
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::min(1.0, c)));
}

double colinearity_gap(const CVec& h_d, const CVec& h_u, const CVec& g) {
  require_nonzero(h_d, "h_d");
  require_nonzero(h_u, "h_u");
  require_nonzero(g, "g");
  require_same_size(h_d, h_u);
  require_same_size(h_d, g);
  const cd beta_d = unit_phase_of(-simd::dotu(h_d, g));
  const cd beta_u = unit_phase_of(-simd::dotu(g, h_u));
  return (beta_d * h_d.conjugate() / h_d.norm() - beta_u * h_u.conjugate() / h_u.norm()).norm();
}

}  // namespace bdris
