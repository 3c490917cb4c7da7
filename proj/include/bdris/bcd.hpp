#pragma once

#include <iosfwd>
#include <vector>

#include "bdris/channel.hpp"
#include "bdris/config.hpp"
#include "bdris/fp_transforms.hpp"
#include "bdris/metrics.hpp"
#include "bdris/pdd.hpp"

namespace bdris {

struct PrecoderUpdate {
  CMat precoder;
  double mu = 0.0;  // power multiplier, 0 when the budget is slack
};

/// p_k = (A + mu I)^{-1} alpha_d sqrt(1 + iota_d,k) tau_d,k conj(h_d,k) with mu >= 0 found by
/// bisection so that ||P||_F^2 <= p_budget.
PrecoderUpdate update_precoder(const TransceiverState& s, const ChannelSet& ch,
                               const RisConfig& ris, const AuxVars& aux, double alpha_dl,
                               double p_budget, const SolverOptions& opts = {});

/// Per-user stationary point of f_tau in w_i, before the global normalization.
CMat update_combiner_raw(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                         const AuxVars& aux);

struct CombinerUpdate {
  CMat combiner;       // unit Frobenius norm
  double scale = 1.0;  // ||W_raw||_F; multiplying tau_ul by it keeps f_tau unchanged
};

CombinerUpdate update_combiner(const TransceiverState& s, const ChannelSet& ch,
                               const RisConfig& ris, const AuxVars& aux);

/// Feasible random start: random scattering blocks (phases, unitary, or symmetric unitary),
/// matched-filter precoder at full power and normalized matched-filter combiner. Each start
/// index draws its scattering blocks from its own substreams; start 0 is the default start.
TransceiverState initial_state(const ChannelSet& ch, const RisConfig& ris, const ScenarioConfig& cfg,
                               int start = 0);

struct BcdTraceRow {
  int iter = 0;
  double objective = 0.0;
  double dl_rate = 0.0;
  double ul_rate = 0.0;
  double pdd_violation = 0.0;
};

struct SolverResult {
  TransceiverState final_state;
  AuxVars aux;
  std::vector<double> objective_trace;
  double initial_objective = 0.0;
  double objective = 0.0;
  double dl_rate = 0.0;
  double ul_rate = 0.0;
  double pdd_violation = 0.0;
  int iters_used = 0;
  bool converged = false;
  int best_start = 0;  // start index that produced this result
  std::vector<BcdTraceRow> trace;
  std::vector<PddTraceRow> last_pdd_trace;
};

/// Runs from opts.n_starts initial states and keeps the highest final objective.
SolverResult run_bcd(const ChannelSet& ch, const RisConfig& ris, const ScenarioConfig& cfg,
                     const SolverOptions& opts);
SolverResult run_bcd(const ChannelSet& ch, const RisConfig& ris, const ScenarioConfig& cfg,
                     const SolverOptions& opts, TransceiverState start);

void write_bcd_trace_csv(std::ostream& out, const std::vector<BcdTraceRow>& trace);
void write_pdd_trace_csv(std::ostream& out, const std::vector<PddTraceRow>& trace);

}  // namespace bdris
