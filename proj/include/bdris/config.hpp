#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdris/types.hpp"

namespace bdris {

/// Geometry, link budget and randomness for one simulated deployment. Angles are measured at
/// the RIS in degrees; the BS and all users sit on circles around it.
struct ScenarioConfig {
  int n_antennas = 1;        // N, transmit = receive
  int n_dl_users = 1;        // K
  int n_ul_users = 1;        // I
  int n_ris_elements = 16;   // M

  double angle_bs_deg = 30.0;
  std::vector<double> angles_dl_deg{90.0};  // one entry per DL user, or a single shared angle
  std::vector<double> angles_ul_deg{60.0};
  /// Departure angle at the BS array for the LoS part of G. Unset means "same as angle_bs_deg".
  std::optional<double> bs_departure_deg;

  double d_bs_ris_m = 30.0;
  double d_ris_user_m = 5.0;
  double zeta0_db = -30.0;
  double exp_reflected = 2.2;
  double exp_direct = 5.0;
  double rician_k_reflected = 10.0;
  double rician_k_direct = 0.0;

  double p_dl_dbm = 20.0;
  double p_ul_dbm = 20.0;
  double noise_dbm = -80.0;
  double si_power_db = -110.0;

  double alpha_dl = 0.5;
  bool direct_links_blocked = true;
  std::uint64_t rng_seed = 1;

  double p_dl_mw() const { return db_to_linear(p_dl_dbm); }
  double p_ul_mw() const { return db_to_linear(p_ul_dbm); }
  double noise_mw() const { return db_to_linear(noise_dbm); }
  double departure_deg() const { return bs_departure_deg.value_or(angle_bs_deg); }
  double dl_angle(int k) const;
  double ul_angle(int i) const;

  /// Throws InvalidArgument on the first violated invariant.
  void validate() const;
};

enum class Architecture { kSingle, kGroup, kFull };

struct RisConfig {
  Architecture architecture = Architecture::kFull;
  int group_size = 0;  // only read for kGroup
  bool reciprocal = false;
  bool structural_scattering = true;

  /// M_g for an M-element surface: 1 for single, M for full.
  int effective_group_size(int n_elements) const;
  int n_groups(int n_elements) const { return n_elements / effective_group_size(n_elements); }
  void validate(int n_elements) const;
};

struct PddOptions {
  double c_penalty = 0.8;
  double rho_init = 1.0;
  double inner_tol = 1e-5;
  int inner_max = 50;
  double outer_eps = 1e-4;
  /// Dual-update threshold schedule: starts at dual_switch_init, then
  /// max(dual_switch_decay * previous violation, outer_eps).
  double dual_switch_init = 0.1;
  double dual_switch_decay = 0.9;
  int outer_max = 100;
  bool record_trace = false;
  /// Solve each group system with an explicit Delta and a dense factorization instead of the
  /// eigen-factored solvers. Slower; kept as a cross-check.
  bool explicit_solve = false;

  void validate() const;
};

struct SolverOptions {
  int max_bcd_iters = 100;
  double bcd_rel_tol = 1e-4;
  double bisection_tol = 1e-10;
  int bisection_max = 100;
  /// Independent random starts per solve; the best final objective is kept.
  int n_starts = 1;
  PddOptions pdd;
  bool record_trace = true;

  void validate() const;
};

/// Everything one config file carries.
struct RunConfig {
  ScenarioConfig scenario;
  RisConfig ris;
  SolverOptions solver;
};

std::string to_string(Architecture a);
Architecture parse_architecture(const std::string& s);

/// Loads a YAML key/value file with optional `scenario`, `ris`, `solver` and `pdd` sections.
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& yaml_text);
/// Same, with missing keys taken from `base` instead of the defaults.
RunConfig parse_config(const std::string& yaml_text, RunConfig base);
/// Reads a whole file; InvalidArgument if it cannot be opened.
std::string read_text_file(const std::string& path);

nlohmann::json to_json(const ScenarioConfig& s);
nlohmann::json to_json(const RisConfig& r);
nlohmann::json to_json(const SolverOptions& o);
nlohmann::json to_json(const RunConfig& c);

}  // namespace bdris
