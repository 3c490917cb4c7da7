#pragma once

#include <vector>

#include "bdris/config.hpp"
#include "bdris/rng.hpp"
#include "bdris/types.hpp"

namespace bdris {

/// One sampled channel realization. Vectors follow the transpose convention used for
/// reciprocal links: the DL effective channel is h_dir^T + h_ref^T (Phi - I) G.
struct ChannelSet {
  CMat g_bs_ris;                             // G, M x N
  std::vector<CVec> h_ref_dl;                // K vectors of length M
  std::vector<CVec> h_ref_ul;                // I vectors of length M
  std::vector<CVec> h_dir_dl;                // K vectors of length N
  std::vector<CVec> h_dir_ul_bs;             // I vectors of length N
  std::vector<std::vector<cd>> h_dir_ul_dl;  // [i][k]
  CMat h_si;                                 // N x N
  double noise_var_linear = 1e-8;            // sigma^2, mW
  double p_ul_linear = 100.0;                // P_u, mW
  double p_dl_linear = 100.0;                // P_d budget, mW

  int n_antennas() const { return static_cast<int>(g_bs_ris.cols()); }
  int n_elements() const { return static_cast<int>(g_bs_ris.rows()); }
  int n_dl() const { return static_cast<int>(h_ref_dl.size()); }
  int n_ul() const { return static_cast<int>(h_ref_ul.size()); }

  /// Zero-filled set with consistent dimensions.
  static ChannelSet zeros(int n_antennas, int n_elements, int n_dl, int n_ul);
};

/// ULA response with half-wavelength spacing, entry m = exp(j*pi*m*cos(theta)) / sqrt(n).
CVec steering_vector(double theta_deg, int n);

/// zeta0 * d^-exponent with zeta0 given in dB at 1 m.
double pathloss_linear(double d_m, double exponent, double zeta0_db);

/// sqrt(gain) * (sqrt(kappa/(1+kappa)) * los + sqrt(1/(1+kappa)) * W), W ~ CN(0, 1) i.i.d.
CMat rician_sample(const CMat& los, double kappa, double pathloss_gain, CounterRng& rng);

/// Distance between two points at radii r1, r2 and angles a1, a2 (degrees) around the RIS,
/// clamped below at the 1 m reference distance.
double layout_distance(double r1, double a1_deg, double r2, double a2_deg);

ChannelSet generate_channel_set(const ScenarioConfig& cfg, const RisConfig& ris);

/// Phi - I when structural scattering is modelled, Phi otherwise.
CMat scattering_response(const CMat& phi, bool structural);

CVec effective_dl_channel(const ChannelSet& ch, const CMat& phi, int k, bool structural);
CVec effective_ul_channel(const ChannelSet& ch, const CMat& phi, int i, bool structural);
cd ul_to_dl_channel(const ChannelSet& ch, const CMat& phi, int i, int k, bool structural);
CMat loop_channel(const ChannelSet& ch, const CMat& phi, bool structural);

}  // namespace bdris
