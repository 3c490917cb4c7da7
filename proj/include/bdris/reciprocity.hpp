#pragma once

#include "bdris/types.hpp"

namespace bdris {

/// Single-user received-power bound together with the phase that attains it. residual is the
/// relative gap between the bound and the power reached by the constructed optimal Phi.
struct BoundReport {
  double bound_value = 0.0;
  cd phase_beta{1.0, 0.0};
  bool attained = false;
  double residual = 0.0;
};

inline constexpr double kBoundTolerance = 1e-9;

/// |g^T (Phi - I) h_u|^2
double ul_received_power(const CVec& g, const CVec& h_u, const CMat& phi);
/// |h_d^T (Phi - I) g|^2
double dl_received_power(const CVec& h_d, const CVec& g, const CMat& phi);

/// (||g|| ||h_u|| + |g^T h_u|)^2 with beta = exp(j angle(-g^T h_u)).
BoundReport ul_power_bound(const CVec& g, const CVec& h_u);
/// (||h_d|| ||g|| + |h_d^T g|)^2 with beta = exp(j angle(-h_d^T g)).
BoundReport dl_power_bound(const CVec& h_d, const CVec& g);

/// Unitary Phi with Phi * src = dst, built as U_dst U_src^H from orthonormal completions.
CMat construct_unitary_map(const CVec& src, const CVec& dst);

/// Unitary whose first column is x (unit norm). The remaining columns come from Gram-Schmidt
/// over the standard basis, skipping the coordinate where |x| is largest.
CMat orthonormal_completion(const CVec& x);

/// Maps h_u/||h_u|| to beta_u conj(g)/||g||, which attains the UL bound.
CMat phi_ul_optimal(const CVec& g, const CVec& h_u);
/// Maps g/||g|| to beta_d conj(h_d)/||h_d||, which attains the DL bound.
CMat phi_dl_optimal(const CVec& h_d, const CVec& g);

/// min over unit phases beta of || conj(h_d)/||h_d|| - beta conj(h_u)/||h_u|| ||. Zero exactly when
/// the normalized channels are co-linear, i.e. a symmetric Phi can attain both bounds.
double colinearity_gap(const CVec& h_d, const CVec& h_u);
/// Same distance with the bound-attaining phases beta_d, beta_u fixed by the BS-RIS channel g.
double colinearity_gap(const CVec& h_d, const CVec& h_u, const CVec& g);

}  // namespace bdris
