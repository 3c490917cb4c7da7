#include "bdris/channel.hpp"

#include <algorithm>
#include <cmath>

namespace bdris {
namespace {

void check_phi(const ChannelSet& ch, const CMat& phi) {
  const int m = ch.n_elements();
  if (phi.rows() != m || phi.cols() != m)
    throw InvalidArgument("scattering matrix must be " + std::to_string(m) + "x" +
                          std::to_string(m));
}

void check_index(int idx, int count, const char* what) {
  if (idx < 0 || idx >= count) throw InvalidArgument(std::string(what) + " index out of range");
}

// Unit-modulus array response; the per-entry LoS power then matches the unit-variance NLoS part.
CVec array_response(double theta_deg, int n) {
  return steering_vector(theta_deg, n) * std::sqrt(static_cast<double>(n));
}

}  // namespace

ChannelSet ChannelSet::zeros(int n_antennas, int n_elements, int n_dl, int n_ul) {
  ChannelSet ch;
  ch.g_bs_ris = CMat::Zero(n_elements, n_antennas);
  ch.h_ref_dl.assign(n_dl, CVec::Zero(n_elements));
  ch.h_ref_ul.assign(n_ul, CVec::Zero(n_elements));
  ch.h_dir_dl.assign(n_dl, CVec::Zero(n_antennas));
  ch.h_dir_ul_bs.assign(n_ul, CVec::Zero(n_antennas));
  ch.h_dir_ul_dl.assign(n_ul, std::vector<cd>(n_dl, cd{0.0, 0.0}));
  ch.h_si = CMat::Zero(n_antennas, n_antennas);
  return ch;
}

CVec steering_vector(double theta_deg, int n) {
  if (n < 1) throw InvalidArgument("steering_vector needs n >= 1");
  if (!(theta_deg >= 0.0 && theta_deg <= 180.0))
    throw InvalidArgument("steering angle must lie in [0, 180] degrees");
  const double phase = kPi * std::cos(theta_deg * kPi / 180.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVec a(n);
  for (int m = 0; m < n; ++m) a(m) = std::polar(scale, phase * m);
  return a;
}

double pathloss_linear(double d_m, double exponent, double zeta0_db) {
  if (!(d_m > 0.0)) throw InvalidArgument("pathloss distance must be positive");
  return db_to_linear(zeta0_db) * std::pow(d_m, -exponent);
}

CMat rician_sample(const CMat& los, double kappa, double pathloss_gain, CounterRng& rng) {
  if (!(kappa >= 0.0)) throw InvalidArgument("Rician factor must be >= 0");
  if (!(pathloss_gain >= 0.0)) throw InvalidArgument("pathloss gain must be >= 0");
  if (!los.allFinite()) throw InvalidArgument("LoS component must be finite");
  const double w_los = std::sqrt(kappa / (1.0 + kappa));
  const double w_nlos = std::sqrt(1.0 / (1.0 + kappa));
  const CMat nlos = complex_normal_matrix(rng, los.rows(), los.cols());
  return std::sqrt(pathloss_gain) * (w_los * los + w_nlos * nlos);
}

double layout_distance(double r1, double a1_deg, double r2, double a2_deg) {
  const double c = std::cos((a1_deg - a2_deg) * kPi / 180.0);
  const double d2 = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * c;
  return std::max(1.0, std::sqrt(std::max(0.0, d2)));
}

ChannelSet generate_channel_set(const ScenarioConfig& cfg, const RisConfig& ris) {
  cfg.validate();
  ris.validate(cfg.n_ris_elements);
  const int n = cfg.n_antennas;
  const int m = cfg.n_ris_elements;
  const int k_dl = cfg.n_dl_users;
  const int i_ul = cfg.n_ul_users;
  const std::uint64_t seed = cfg.rng_seed;

  ChannelSet ch = ChannelSet::zeros(n, m, k_dl, i_ul);
  ch.noise_var_linear = cfg.noise_mw();
  ch.p_ul_linear = cfg.p_ul_mw();
  ch.p_dl_linear = cfg.p_dl_mw();

  const double pl_bi = pathloss_linear(cfg.d_bs_ris_m, cfg.exp_reflected, cfg.zeta0_db);
  const double pl_iu = pathloss_linear(cfg.d_ris_user_m, cfg.exp_reflected, cfg.zeta0_db);

  {
    CounterRng rng(seed, Stream::kBsRis);
    const CMat los = array_response(cfg.angle_bs_deg, m) *
                     array_response(cfg.departure_deg(), n).transpose();
    ch.g_bs_ris = rician_sample(los, cfg.rician_k_reflected, pl_bi, rng);
  }
  for (int k = 0; k < k_dl; ++k) {
    CounterRng rng(seed, Stream::kRisDl, k);
    ch.h_ref_dl[k] = rician_sample(array_response(cfg.dl_angle(k), m), cfg.rician_k_reflected,
                                   pl_iu, rng);
  }
  for (int i = 0; i < i_ul; ++i) {
    CounterRng rng(seed, Stream::kRisUl, i);
    ch.h_ref_ul[i] = rician_sample(array_response(cfg.ul_angle(i), m), cfg.rician_k_reflected,
                                   pl_iu, rng);
  }

  if (!cfg.direct_links_blocked) {
    for (int k = 0; k < k_dl; ++k) {
      CounterRng rng(seed, Stream::kDirectDl, k);
      const double d = layout_distance(cfg.d_bs_ris_m, cfg.angle_bs_deg, cfg.d_ris_user_m,
                                       cfg.dl_angle(k));
      ch.h_dir_dl[k] = rician_sample(array_response(cfg.dl_angle(k), n), cfg.rician_k_direct,
                                     pathloss_linear(d, cfg.exp_direct, cfg.zeta0_db), rng);
    }
    for (int i = 0; i < i_ul; ++i) {
      CounterRng rng(seed, Stream::kDirectUlBs, i);
      const double d = layout_distance(cfg.d_bs_ris_m, cfg.angle_bs_deg, cfg.d_ris_user_m,
                                       cfg.ul_angle(i));
      ch.h_dir_ul_bs[i] = rician_sample(array_response(cfg.ul_angle(i), n), cfg.rician_k_direct,
                                        pathloss_linear(d, cfg.exp_direct, cfg.zeta0_db), rng);
    }
    for (int i = 0; i < i_ul; ++i) {
      CounterRng rng(seed, Stream::kDirectUlDl, i);
      for (int k = 0; k < k_dl; ++k) {
        const double d = layout_distance(cfg.d_ris_user_m, cfg.ul_angle(i), cfg.d_ris_user_m,
                                         cfg.dl_angle(k));
        const CMat los = CMat::Ones(1, 1);
        ch.h_dir_ul_dl[i][k] =
            rician_sample(los, cfg.rician_k_direct,
                          pathloss_linear(d, cfg.exp_direct, cfg.zeta0_db), rng)(0, 0);
      }
    }
  }

  {
    CounterRng rng(seed, Stream::kSelfInterference);
    ch.h_si = std::sqrt(db_to_linear(cfg.si_power_db)) * complex_normal_matrix(rng, n, n);
  }
  return ch;
}

CMat scattering_response(const CMat& phi, bool structural) {
  if (!structural) return phi;
  CMat out = phi;
  out.diagonal().array() -= 1.0;
  return out;
}

CVec effective_dl_channel(const ChannelSet& ch, const CMat& phi, int k, bool structural) {
  check_phi(ch, phi);
  check_index(k, ch.n_dl(), "DL user");
  const CMat theta = scattering_response(phi, structural);
  // (h_ref^T Theta G)^T = G^T Theta^T h_ref
  return ch.h_dir_dl[k] + ch.g_bs_ris.transpose() * (theta.transpose() * ch.h_ref_dl[k]);
}

CVec effective_ul_channel(const ChannelSet& ch, const CMat& phi, int i, bool structural) {
  check_phi(ch, phi);
  check_index(i, ch.n_ul(), "UL user");
  const CMat theta = scattering_response(phi, structural);
  return ch.h_dir_ul_bs[i] + ch.g_bs_ris.transpose() * (theta * ch.h_ref_ul[i]);
}

cd ul_to_dl_channel(const ChannelSet& ch, const CMat& phi, int i, int k, bool structural) {
  check_phi(ch, phi);
  check_index(i, ch.n_ul(), "UL user");
  check_index(k, ch.n_dl(), "DL user");
  const CMat theta = scattering_response(phi, structural);
  return ch.h_dir_ul_dl[i][k] + (ch.h_ref_dl[k].transpose() * (theta * ch.h_ref_ul[i])).value();
}

CMat loop_channel(const ChannelSet& ch, const CMat& phi, bool structural) {
  check_phi(ch, phi);
  const CMat theta = scattering_response(phi, structural);
  return ch.g_bs_ris.transpose() * theta * ch.g_bs_ris;
}

}  // namespace bdris
