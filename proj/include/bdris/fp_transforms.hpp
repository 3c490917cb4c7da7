#pragma once

#include <vector>

#include "bdris/channel.hpp"
#include "bdris/config.hpp"
#include "bdris/metrics.hpp"
#include "bdris/types.hpp"

namespace bdris {

/// Auxiliary variables of the two fractional-programming transforms.
struct AuxVars {
  RVec iota_dl;  // K
  RVec iota_ul;  // I
  CVec tau_dl;   // K
  CVec tau_ul;   // I

  static AuxVars zeros(int n_dl, int n_ul);
};

// The surrogates use natural logarithms and are reported in bits (divided by ln 2), so that at
// the closed-form updates f_tau = f_iota = weighted_sum_rate exactly.

/// iota_d,k = gamma_d,k and iota_u,i = gamma_u,i; tau is left at zero.
AuxVars update_iota(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris);

/// Fills tau from the current state and the iota in `aux`; returns the updated copy.
AuxVars update_tau(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                   const AuxVars& aux);

double eval_f_iota(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                   const AuxVars& aux, double alpha_dl);
double eval_f_tau(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                  const AuxVars& aux, double alpha_dl);

// Variants on precomputed per-user terms, used inside the solver loops.
AuxVars iota_from_terms(const std::vector<UserTerms>& dl, const std::vector<UserTerms>& ul);
void tau_from_terms(const std::vector<UserTerms>& dl, const std::vector<UserTerms>& ul,
                    AuxVars& aux);
double f_iota_from_terms(const std::vector<UserTerms>& dl, const std::vector<UserTerms>& ul,
                         const AuxVars& aux, double alpha_dl);
double f_tau_from_terms(const std::vector<UserTerms>& dl, const std::vector<UserTerms>& ul,
                        const AuxVars& aux, double alpha_dl);

}  // namespace bdris
