#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "bdris/channel.hpp"
#include "bdris/config.hpp"
#include "bdris/types.hpp"

namespace bdris {

enum class BeamKind { kDlImpinging, kDlReflected, kUlImpinging, kUlReflected };

struct TransceiverState {
  CMat precoder;    // P, N x K
  CMat combiner;    // W, N x I
  CMat scattering;  // Phi, M x M, block diagonal
};

/// Effective channels for one scattering matrix, evaluated once and shared by all metrics.
struct EffectiveChannels {
  std::vector<CVec> dl;  // h_d,k as column vectors (the row channel transposed)
  std::vector<CVec> ul;  // h_u,i,BS
  CMat ul_to_dl;         // I x K, h_u,i,k
  CMat si_loop;          // H_SI + G^T Theta G
};

EffectiveChannels effective_channels(const ChannelSet& ch, const CMat& phi, bool structural);

/// Per-user decomposition of one SINR: signal = |amplitude|^2, sinr = signal / (interference + noise).
/// DL amplitude is h_d,k^T p_k; UL amplitude is sqrt(P_u) w_i^H h_u,i,BS.
struct UserTerms {
  cd amplitude{0.0, 0.0};
  double signal = 0.0;
  double interference = 0.0;
  double noise = 0.0;

  double sinr() const { return signal / (interference + noise); }
  /// Gamma + noise: everything received, used by the surrogates.
  double total() const { return signal + interference + noise; }
};

std::vector<UserTerms> dl_terms(const TransceiverState& s, const ChannelSet& ch,
                                const EffectiveChannels& eff);
std::vector<UserTerms> ul_terms(const TransceiverState& s, const ChannelSet& ch,
                                const EffectiveChannels& eff);

double dl_interference(int k, const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris);
double ul_interference(int i, const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris);
double dl_sinr(int k, const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris);
double ul_sinr(int i, const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris);

struct Rates {
  double dl = 0.0;         // sum_k log2(1 + gamma_d,k)
  double ul = 0.0;         // sum_i log2(1 + gamma_u,i)
  double objective = 0.0;  // alpha_d * dl + (1 - alpha_d) * ul
};

Rates evaluate_rates(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                     double alpha_dl);
double weighted_sum_rate(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                         double alpha_dl);

/// 0 to 180 degrees in 0.5 degree steps.
std::vector<double> default_beam_grid();

/// One beampattern over theta_grid_deg. index is the DL user for DL kinds and the UL user for UL kinds.
std::vector<double> beampattern(const TransceiverState& s, const ChannelSet& ch, BeamKind kind,
                                const std::vector<double>& theta_grid_deg, bool structural,
                                int index);

/// |g^T a(theta)| for the M-element steering vector, e.g. the specular lobe of G's column.
std::vector<double> specular_response(const CVec& g, const std::vector<double>& theta_grid_deg);

using BeampatternSet = std::array<std::vector<double>, 4>;

/// Divides all four patterns by their common maximum. All-zero input is returned unchanged.
BeampatternSet normalize_beampatterns(BeampatternSet patterns);

/// CSV with columns theta_deg, dl_impinging, dl_reflected, ul_impinging, ul_reflected.
void write_beampattern_csv(std::ostream& out, const std::vector<double>& theta_grid_deg,
                           const BeampatternSet& patterns);

}  // namespace bdris
