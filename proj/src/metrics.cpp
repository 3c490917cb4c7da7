#include "bdris/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bdris/simd/kernels.hpp"

namespace bdris {
namespace {

void check_state(const TransceiverState& s, const ChannelSet& ch) {
  const int n = ch.n_antennas();
  if (s.precoder.rows() != n || s.precoder.cols() != ch.n_dl())
    throw InvalidArgument("precoder must be N x K");
  if (s.combiner.rows() != n || s.combiner.cols() != ch.n_ul())
    throw InvalidArgument("combiner must be N x I");
}

std::vector<double> cosines(const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("beampattern grid is empty");
  std::vector<double> c(grid.size());
  for (std::size_t t = 0; t < grid.size(); ++t) {
    if (!(grid[t] >= 0.0 && grid[t] <= 180.0))
      throw InvalidArgument("beampattern angles must lie in [0, 180]");
    c[t] = std::cos(grid[t] * kPi / 180.0);
  }
  return c;
}

// |w^T a(theta)|^2 with a the unit-norm M-element steering vector.
std::vector<double> steered_power(const CVec& w, const std::vector<double>& grid) {
  const auto c = cosines(grid);
  std::vector<double> out(grid.size());
  simd::ula_power(std::span<const cd>(w.data(), w.size()), c, out);
  const double scale = 1.0 / static_cast<double>(w.size());
  for (double& v : out) v *= scale;
  return out;
}

CVec unit_or_zero(const CVec& v) {
  const double n = v.norm();
  return n > 0.0 ? CVec(v / n) : CVec::Zero(v.size());
}

}  // namespace

EffectiveChannels effective_channels(const ChannelSet& ch, const CMat& phi, bool structural) {
  const int m = ch.n_elements();
  if (phi.rows() != m || phi.cols() != m) throw InvalidArgument("scattering matrix must be M x M");
  const CMat theta = scattering_response(phi, structural);
  const CMat gt = ch.g_bs_ris.transpose();
  EffectiveChannels e;
  e.dl.resize(ch.n_dl());
  e.ul.resize(ch.n_ul());
  for (int k = 0; k < ch.n_dl(); ++k)
    e.dl[k] = ch.h_dir_dl[k] + gt * (theta.transpose() * ch.h_ref_dl[k]);
  for (int i = 0; i < ch.n_ul(); ++i) e.ul[i] = ch.h_dir_ul_bs[i] + gt * (theta * ch.h_ref_ul[i]);
  e.ul_to_dl.resize(ch.n_ul(), ch.n_dl());
  for (int i = 0; i < ch.n_ul(); ++i) {
    const CVec th = theta * ch.h_ref_ul[i];
    for (int k = 0; k < ch.n_dl(); ++k)
      e.ul_to_dl(i, k) = ch.h_dir_ul_dl[i][k] + simd::dotu(ch.h_ref_dl[k], th);
  }
  e.si_loop = ch.h_si + gt * theta * ch.g_bs_ris;
  return e;
}

std::vector<UserTerms> dl_terms(const TransceiverState& s, const ChannelSet& ch,
                                const EffectiveChannels& eff) {
  check_state(s, ch);
  const int k_dl = ch.n_dl();
  std::vector<UserTerms> out(k_dl);
  for (int k = 0; k < k_dl; ++k) {
    UserTerms& t = out[k];
    for (int j = 0; j < k_dl; ++j) {
      const cd v = simd::dotu(eff.dl[k], CVec(s.precoder.col(j)));
      if (j == k) {
        t.amplitude = v;
        t.signal = std::norm(v);
      } else {
        t.interference += std::norm(v);
      }
    }
    double ul = 0.0;
    for (int i = 0; i < ch.n_ul(); ++i) ul += std::norm(eff.ul_to_dl(i, k));
    t.interference += ch.p_ul_linear * ul;
    t.noise = ch.noise_var_linear;
  }
  return out;
}

std::vector<UserTerms> ul_terms(const TransceiverState& s, const ChannelSet& ch,
                                const EffectiveChannels& eff) {
  check_state(s, ch);
  const int i_ul = ch.n_ul();
  std::vector<UserTerms> out(i_ul);
  // rows of W^H (H_SI + loop) P, one per UL user
  const CMat si = s.combiner.adjoint() * eff.si_loop * s.precoder;
  const double sqrt_pu = std::sqrt(ch.p_ul_linear);
  for (int i = 0; i < i_ul; ++i) {
    UserTerms& t = out[i];
    const CVec w = s.combiner.col(i);
    for (int p = 0; p < i_ul; ++p) {
      const cd v = simd::dotc(w, eff.ul[p]);
      if (p == i) {
        t.amplitude = sqrt_pu * v;
        t.signal = ch.p_ul_linear * std::norm(v);
      } else {
        t.interference += ch.p_ul_linear * std::norm(v);
      }
    }
    t.interference += si.row(i).squaredNorm();
    t.noise = w.squaredNorm() * ch.noise_var_linear;
  }
  return out;
}

double dl_interference(int k, const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris) {
  if (k < 0 || k >= ch.n_dl()) throw InvalidArgument("DL user index out of range");
  return dl_terms(s, ch, effective_channels(ch, s.scattering, ris.structural_scattering))[k]
      .interference;
}

double ul_interference(int i, const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris) {
  if (i < 0 || i >= ch.n_ul()) throw InvalidArgument("UL user index out of range");
  return ul_terms(s, ch, effective_channels(ch, s.scattering, ris.structural_scattering))[i]
      .interference;
}

double dl_sinr(int k, const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris) {
  if (k < 0 || k >= ch.n_dl()) throw InvalidArgument("DL user index out of range");
  return dl_terms(s, ch, effective_channels(ch, s.scattering, ris.structural_scattering))[k].sinr();
}

double ul_sinr(int i, const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris) {
  if (i < 0 || i >= ch.n_ul()) throw InvalidArgument("UL user index out of range");
  return ul_terms(s, ch, effective_channels(ch, s.scattering, ris.structural_scattering))[i].sinr();
}

Rates evaluate_rates(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                     double alpha_dl) {
  const auto eff = effective_channels(ch, s.scattering, ris.structural_scattering);
  Rates r;
  for (const auto& t : dl_terms(s, ch, eff)) r.dl += std::log2(1.0 + t.sinr());
  for (const auto& t : ul_terms(s, ch, eff)) r.ul += std::log2(1.0 + t.sinr());
  r.objective = alpha_dl * r.dl + (1.0 - alpha_dl) * r.ul;
  return r;
}

double weighted_sum_rate(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                         double alpha_dl) {
  return evaluate_rates(s, ch, ris, alpha_dl).objective;
}

std::vector<double> default_beam_grid() {
  std::vector<double> g(361);
  for (int t = 0; t < 361; ++t) g[t] = 0.5 * t;
  return g;
}

std::vector<double> beampattern(const TransceiverState& s, const ChannelSet& ch, BeamKind kind,
                                const std::vector<double>& theta_grid_deg, bool structural,
                                int index) {
  check_state(s, ch);
  const CMat theta = scattering_response(s.scattering, structural);
  const CMat& g = ch.g_bs_ris;
  const bool dl = kind == BeamKind::kDlImpinging || kind == BeamKind::kDlReflected;
  if (index < 0 || index >= (dl ? ch.n_dl() : ch.n_ul()))
    throw InvalidArgument("beampattern user index out of range");
  CVec weights;
  switch (kind) {
    case BeamKind::kDlImpinging:  // |h_ref,d^T Theta a|^2
      weights = theta.transpose() * ch.h_ref_dl[index];
      break;
    case BeamKind::kDlReflected:  // |a^T Theta G p / ||p|||^2
      weights = theta * (g * unit_or_zero(s.precoder.col(index)));
      break;
    case BeamKind::kUlImpinging:  // |(G conj(w) / ||w||)^T Theta a|^2
      weights = theta.transpose() * (g * unit_or_zero(s.combiner.col(index).conjugate()));
      break;
    case BeamKind::kUlReflected:  // |a^T Theta h_ref,u|^2
      weights = theta * ch.h_ref_ul[index];
      break;
  }
  return steered_power(weights, theta_grid_deg);
}

std::vector<double> specular_response(const CVec& g, const std::vector<double>& theta_grid_deg) {
  if (g.size() == 0) throw InvalidArgument("specular_response needs a non-empty vector");
  auto p = steered_power(g, theta_grid_deg);
  for (double& v : p) v = std::sqrt(v);
  return p;
}

BeampatternSet normalize_beampatterns(BeampatternSet patterns) {
  double peak = 0.0;
  for (const auto& p : patterns)
    for (double v : p) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw InvalidArgument("beampattern values must be finite and non-negative");
      peak = std::max(peak, v);
    }
  if (peak > 0.0)
    for (auto& p : patterns)
      for (double& v : p) v /= peak;
  return patterns;
}

void write_beampattern_csv(std::ostream& out, const std::vector<double>& theta_grid_deg,
                           const BeampatternSet& patterns) {
  for (const auto& p : patterns)
    if (p.size() != theta_grid_deg.size())
      throw InvalidArgument("beampattern length does not match the grid");
  out << "theta_deg,dl_impinging,dl_reflected,ul_impinging,ul_reflected\n";
  out.precision(17);
  for (std::size_t t = 0; t < theta_grid_deg.size(); ++t) {
    out << theta_grid_deg[t];
    for (const auto& p : patterns) out << ',' << p[t];
    out << '\n';
  }
}

}  // namespace bdris
