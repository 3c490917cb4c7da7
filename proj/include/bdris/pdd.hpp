#pragma once

#include <utility>
#include <vector>

#include "bdris/channel.hpp"
#include "bdris/config.hpp"
#include "bdris/fp_transforms.hpp"
#include "bdris/metrics.hpp"
#include "bdris/types.hpp"

namespace bdris {

// Group indices are 0-based throughout; the index maps below are the 1-based rules shifted by one.

/// Binary m_g^2 x m_g^2 identity (non-reciprocal) or m_g^2 x m_g(m_g+1)/2 duplication matrix
/// (reciprocal) with vec(Phi_g) = K_g * packed, packing the lower triangle column by column.
Eigen::MatrixXd build_permutation(int m_g, bool reciprocal);

/// Binary m_total^2 x m_g^2 matrix placing vec(Phi_g) at block g of vec(Phi).
Eigen::MatrixXd build_reshape(int m_total, int m_g, int g);

/// Packed length of one group's free variables.
inline int packed_size(int m_g, bool reciprocal) {
  return reciprocal ? m_g * (m_g + 1) / 2 : m_g * m_g;
}
/// Packed index (0-based) of entry (p, q) of a group block.
int packed_index(int p, int q, int m_g, bool reciprocal);
/// Free entries of a group block: all of vec(X), or the lower triangle column by column.
CVec pack_group(const CMat& x, bool reciprocal);
/// K_g * packed reshaped to m_g x m_g; reciprocal output is symmetric bit for bit.
CMat unpack_group(const CVec& packed, int m_g, bool reciprocal);

/// Block g of a block-diagonal matrix, and its inverse placement.
CMat group_block(const CMat& phi, int g, int m_g);
CMat block_diagonal(const std::vector<CMat>& blocks);

/// (Tr(C Phi), vec(C^T)^T sum_g R_g K_g phi_g) for block-diagonal Phi.
std::pair<cd, cd> trace_vec_identity_check(const CMat& c, const CMat& phi, int m_g,
                                           bool reciprocal);
/// (Tr(B Phi A Phi^H), phi^H (A^T kron B) phi) with phi assembled through R_g K_g.
std::pair<cd, cd> quadratic_identity_check(const CMat& b, const CMat& a, const CMat& phi, int m_g,
                                           bool reciprocal);

struct CouplingMatrices {
  CMat a1, a2, b1, b2, c1, c2, d1, d2, d3, d, f1, f2, j1, j2;
};

CouplingMatrices assemble_coupling(const TransceiverState& s, const ChannelSet& ch,
                                   const AuxVars& aux);

/// f_tau as a function of Phi is  -Tr(T Theta S Theta^H) + 2 Re Tr(L_theta Theta) + const with
/// Theta the scattering response. Rewritten in Phi this is -Tr(T Phi S Phi^H) + 2 Re Tr(L Phi) + const.
struct PhiQuadratic {
  CMat s;  // right factor, A1 + P_u B2
  CMat t;  // left factor, alpha_d B1 + alpha_u A2
  CMat l;  // linear coefficient in Phi
};

PhiQuadratic phi_quadratic(const CouplingMatrices& c, bool structural, double alpha_dl,
                           double p_ul);

/// Tr(T Phi S Phi^H) - 2 Re Tr(L Phi): the Phi-dependent part of -f_tau (natural-log units).
double phi_cost(const PhiQuadratic& q, const CMat& phi);

struct PddState {
  std::vector<CMat> phi;
  std::vector<CMat> psi;
  std::vector<CMat> lambda;
  double rho = 1.0;
};

/// (Delta, delta) of the group-g subproblem  min phi^H Delta phi - 2 Re(phi^H delta), with the
/// other groups held at their values in `st`.
std::pair<CMat, CVec> assemble_quadratic(int g, const CouplingMatrices& coupling,
                                         const PddState& st, const RisConfig& ris, double alpha_dl,
                                         double p_ul);

/// Minimizer of phi^H Delta phi - 2 Re(phi^H delta) for Hermitian PSD Delta.
CVec solve_phi_group(const CMat& delta_mat, const CVec& delta_vec);

/// Nearest unitary matrix U V^H from X = U Sigma V^H.
CMat project_unitary(const CMat& x);

/// Closest symmetric unitary to a near-symmetric unitary input.
CMat project_symmetric_unitary(const CMat& x);

struct PddTraceRow {
  int outer_iter = 0;
  int inner_iters = 0;
  double rho = 0.0;
  double violation = 0.0;
  double inner_objective = 0.0;
};

struct PddResult {
  CMat phi;  // feasible block-diagonal output
  double violation = 0.0;
  int outer_iters = 0;
  bool converged = false;
  std::vector<PddTraceRow> trace;
};

/// Runs the penalty dual decomposition on the scattering block starting from s.scattering.
PddResult run_pdd(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                  const AuxVars& aux, double alpha_dl, const PddOptions& opts);

}  // namespace bdris
