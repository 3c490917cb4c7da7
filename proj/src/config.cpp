#include "bdris/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace bdris {
namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

bool angle_ok(double deg) { return std::isfinite(deg) && deg >= 0.0 && deg <= 180.0; }

using Setter = std::function<void(const YAML::Node&)>;

template <typename T>
Setter set(T& field) {
  return [&field](const YAML::Node& n) { field = n.as<T>(); };
}

Setter set_angles(std::vector<double>& field) {
  return [&field](const YAML::Node& n) {
    if (n.IsSequence())
      field = n.as<std::vector<double>>();
    else
      field = {n.as<double>()};
  };
}

void apply(const YAML::Node& section, const std::string& name,
           const std::map<std::string, Setter>& setters) {
  if (!section) return;
  require(section.IsMap(), "config section '" + name + "' must be a mapping");
  for (const auto& kv : section) {
    const auto key = kv.first.as<std::string>();
    const auto it = setters.find(key);
    require(it != setters.end(), "unknown key '" + key + "' in section '" + name + "'");
    try {
      it->second(kv.second);
    } catch (const YAML::Exception& e) {
      throw InvalidArgument("bad value for '" + name + "." + key + "': " + e.what());
    }
  }
}

}  // namespace

double ScenarioConfig::dl_angle(int k) const {
  return angles_dl_deg.size() == 1 ? angles_dl_deg[0] : angles_dl_deg.at(k);
}

double ScenarioConfig::ul_angle(int i) const {
  return angles_ul_deg.size() == 1 ? angles_ul_deg[0] : angles_ul_deg.at(i);
}

void ScenarioConfig::validate() const {
  require(n_antennas >= 1, "n_antennas must be >= 1");
  require(n_ris_elements >= 1, "n_ris_elements must be >= 1");
  require(n_dl_users >= 0 && n_ul_users >= 0, "user counts must be non-negative");
  require(n_dl_users + n_ul_users >= 1, "at least one DL or UL user is required");
  require(angle_ok(angle_bs_deg), "angle_bs_deg must lie in [0, 180]");
  if (bs_departure_deg) require(angle_ok(*bs_departure_deg), "bs_departure_deg must lie in [0, 180]");
  auto check_list = [](const std::vector<double>& v, int count, const char* name) {
    if (count == 0) return;
    require(v.size() == 1 || static_cast<int>(v.size()) == count,
            std::string(name) + " needs one angle or one per user");
    for (double a : v) require(angle_ok(a), std::string(name) + " entries must lie in [0, 180]");
  };
  check_list(angles_dl_deg, n_dl_users, "angles_dl_deg");
  check_list(angles_ul_deg, n_ul_users, "angles_ul_deg");
  require(d_bs_ris_m > 0 && d_ris_user_m > 0, "distances must be positive");
  require(rician_k_reflected >= 0 && rician_k_direct >= 0, "Rician factors must be >= 0");
  require(alpha_dl >= 0.0 && alpha_dl <= 1.0, "alpha_dl must lie in [0, 1]");
  require(std::isfinite(zeta0_db) && std::isfinite(p_dl_dbm) && std::isfinite(p_ul_dbm) &&
              std::isfinite(noise_dbm) && std::isfinite(si_power_db),
          "power levels must be finite");
}

int RisConfig::effective_group_size(int n_elements) const {
  switch (architecture) {
    case Architecture::kSingle: return 1;
    case Architecture::kFull: return n_elements;
    case Architecture::kGroup: return group_size;
  }
  return group_size;
}

void RisConfig::validate(int n_elements) const {
  const int mg = effective_group_size(n_elements);
  require(mg >= 1, "group_size must be >= 1");
  require(n_elements % mg == 0, "group_size must divide the number of RIS elements");
}

void PddOptions::validate() const {
  require(c_penalty > 0.0 && c_penalty < 1.0, "pdd.c_penalty must lie in (0, 1)");
  require(rho_init > 0.0, "pdd.rho_init must be positive");
  require(inner_tol > 0.0 && outer_eps > 0.0 && dual_switch_init > 0.0,
          "pdd tolerances must be positive");
  require(dual_switch_decay > 0.0 && dual_switch_decay < 1.0,
          "pdd.dual_switch_decay must lie in (0, 1)");
  require(inner_max >= 1 && outer_max >= 1, "pdd iteration caps must be >= 1");
}

void SolverOptions::validate() const {
  require(max_bcd_iters >= 1, "max_bcd_iters must be >= 1");
  require(bcd_rel_tol > 0.0 && bisection_tol > 0.0, "solver tolerances must be positive");
  require(bisection_max >= 1, "bisection_max must be >= 1");
  require(n_starts >= 1 && n_starts <= 0x4000, "n_starts must lie in [1, 16384]");
  pdd.validate();
}

std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::kSingle: return "single";
    case Architecture::kGroup: return "group";
    case Architecture::kFull: return "full";
  }
  return "?";
}

Architecture parse_architecture(const std::string& s) {
  if (s == "single" || s == "diagonal") return Architecture::kSingle;
  if (s == "group") return Architecture::kGroup;
  if (s == "full") return Architecture::kFull;
  throw InvalidArgument("unknown RIS architecture '" + s + "'");
}

RunConfig parse_config(const std::string& yaml_text) { return parse_config(yaml_text, RunConfig{}); }

RunConfig parse_config(const std::string& yaml_text, RunConfig base) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw InvalidArgument(std::string("config parse error: ") + e.what());
  }
  RunConfig c = std::move(base);
  if (!root || root.IsNull()) {
    c.scenario.validate();
    c.ris.validate(c.scenario.n_ris_elements);
    c.solver.validate();
    return c;
  }
  require(root.IsMap(), "config root must be a mapping");

  auto& s = c.scenario;
  std::map<std::string, Setter> scenario{
      {"n_antennas", set(s.n_antennas)},
      {"n_dl_users", set(s.n_dl_users)},
      {"n_ul_users", set(s.n_ul_users)},
      {"n_ris_elements", set(s.n_ris_elements)},
      {"angle_bs_deg", set(s.angle_bs_deg)},
      {"angles_dl_deg", set_angles(s.angles_dl_deg)},
      {"angles_ul_deg", set_angles(s.angles_ul_deg)},
      {"bs_departure_deg", [&s](const YAML::Node& n) { s.bs_departure_deg = n.as<double>(); }},
      {"d_bs_ris_m", set(s.d_bs_ris_m)},
      {"d_ris_user_m", set(s.d_ris_user_m)},
      {"zeta0_db", set(s.zeta0_db)},
      {"exp_reflected", set(s.exp_reflected)},
      {"exp_direct", set(s.exp_direct)},
      {"rician_k_reflected", set(s.rician_k_reflected)},
      {"rician_k_direct", set(s.rician_k_direct)},
      {"p_dl_dbm", set(s.p_dl_dbm)},
      {"p_ul_dbm", set(s.p_ul_dbm)},
      {"noise_dbm", set(s.noise_dbm)},
      {"si_power_db", set(s.si_power_db)},
      {"alpha_dl", set(s.alpha_dl)},
      {"direct_links_blocked", set(s.direct_links_blocked)},
      {"rng_seed", set(s.rng_seed)},
  };
  auto& r = c.ris;
  std::map<std::string, Setter> ris{
      {"architecture",
       [&r](const YAML::Node& n) { r.architecture = parse_architecture(n.as<std::string>()); }},
      {"group_size", set(r.group_size)},
      {"reciprocal", set(r.reciprocal)},
      {"structural_scattering", set(r.structural_scattering)},
  };
  auto& o = c.solver;
  std::map<std::string, Setter> solver{
      {"max_bcd_iters", set(o.max_bcd_iters)},
      {"bcd_rel_tol", set(o.bcd_rel_tol)},
      {"bisection_tol", set(o.bisection_tol)},
      {"bisection_max", set(o.bisection_max)},
      {"n_starts", set(o.n_starts)},
      {"record_trace", set(o.record_trace)},
  };
  auto& p = c.solver.pdd;
  std::map<std::string, Setter> pdd{
      {"c_penalty", set(p.c_penalty)},
      {"rho_init", set(p.rho_init)},
      {"inner_tol", set(p.inner_tol)},
      {"inner_max", set(p.inner_max)},
      {"outer_eps", set(p.outer_eps)},
      {"dual_switch_init", set(p.dual_switch_init)},
      {"dual_switch_decay", set(p.dual_switch_decay)},
      {"outer_max", set(p.outer_max)},
      {"record_trace", set(p.record_trace)},
      {"explicit_solve", set(p.explicit_solve)},
  };

  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (key != "scenario" && key != "ris" && key != "solver" && key != "pdd" &&
        key != "experiment")
      throw InvalidArgument("unknown config section '" + key + "'");
  }
  apply(root["scenario"], "scenario", scenario);
  apply(root["ris"], "ris", ris);
  apply(root["solver"], "solver", solver);
  apply(root["pdd"], "pdd", pdd);

  c.scenario.validate();
  c.ris.validate(c.scenario.n_ris_elements);
  c.solver.validate();
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

nlohmann::json to_json(const ScenarioConfig& s) {
  nlohmann::json j{
      {"n_antennas", s.n_antennas},
      {"n_dl_users", s.n_dl_users},
      {"n_ul_users", s.n_ul_users},
      {"n_ris_elements", s.n_ris_elements},
      {"angle_bs_deg", s.angle_bs_deg},
      {"angles_dl_deg", s.angles_dl_deg},
      {"angles_ul_deg", s.angles_ul_deg},
      {"d_bs_ris_m", s.d_bs_ris_m},
      {"d_ris_user_m", s.d_ris_user_m},
      {"zeta0_db", s.zeta0_db},
      {"exp_reflected", s.exp_reflected},
      {"exp_direct", s.exp_direct},
      {"rician_k_reflected", s.rician_k_reflected},
      {"rician_k_direct", s.rician_k_direct},
      {"p_dl_dbm", s.p_dl_dbm},
      {"p_ul_dbm", s.p_ul_dbm},
      {"noise_dbm", s.noise_dbm},
      {"si_power_db", s.si_power_db},
      {"alpha_dl", s.alpha_dl},
      {"direct_links_blocked", s.direct_links_blocked},
      {"rng_seed", s.rng_seed},
  };
  j["bs_departure_deg"] = s.departure_deg();
  return j;
}

nlohmann::json to_json(const RisConfig& r) {
  return {{"architecture", to_string(r.architecture)},
          {"group_size", r.group_size},
          {"reciprocal", r.reciprocal},
          {"structural_scattering", r.structural_scattering}};
}

nlohmann::json to_json(const SolverOptions& o) {
  return {{"max_bcd_iters", o.max_bcd_iters},
          {"bcd_rel_tol", o.bcd_rel_tol},
          {"bisection_tol", o.bisection_tol},
          {"bisection_max", o.bisection_max},
          {"n_starts", o.n_starts},
          {"record_trace", o.record_trace},
          {"pdd",
           {{"c_penalty", o.pdd.c_penalty},
            {"rho_init", o.pdd.rho_init},
            {"inner_tol", o.pdd.inner_tol},
            {"inner_max", o.pdd.inner_max},
            {"outer_eps", o.pdd.outer_eps},
            {"dual_switch_init", o.pdd.dual_switch_init},
            {"dual_switch_decay", o.pdd.dual_switch_decay},
            {"outer_max", o.pdd.outer_max},
            {"explicit_solve", o.pdd.explicit_solve}}}};
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"scenario", to_json(c.scenario)}, {"ris", to_json(c.ris)}, {"solver", to_json(c.solver)}};
}

}  // namespace bdris
