#include "bdris/fp_transforms.hpp"

#include <cmath>

namespace bdris {
namespace {

void check_sizes(const std::vector<UserTerms>& dl, const std::vector<UserTerms>& ul,
                 const AuxVars& aux) {
  if (aux.iota_dl.size() != static_cast<Eigen::Index>(dl.size()) ||
      aux.tau_dl.size() != static_cast<Eigen::Index>(dl.size()) ||
      aux.iota_ul.size() != static_cast<Eigen::Index>(ul.size()) ||
      aux.tau_ul.size() != static_cast<Eigen::Index>(ul.size()))
    throw InvalidArgument("auxiliary variables do not match the user counts");
}

double dual_term(double iota) { return std::log1p(iota) - iota; }

struct Terms {
  std::vector<UserTerms> dl, ul;
};

Terms terms(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris) {
  const auto eff = effective_channels(ch, s.scattering, ris.structural_scattering);
  return {dl_terms(s, ch, eff), ul_terms(s, ch, eff)};
}

}  // namespace

AuxVars AuxVars::zeros(int n_dl, int n_ul) {
  return {RVec::Zero(n_dl), RVec::Zero(n_ul), CVec::Zero(n_dl), CVec::Zero(n_ul)};
}

AuxVars iota_from_terms(const std::vector<UserTerms>& dl, const std::vector<UserTerms>& ul) {
  AuxVars a = AuxVars::zeros(static_cast<int>(dl.size()), static_cast<int>(ul.size()));
  for (std::size_t k = 0; k < dl.size(); ++k) a.iota_dl(k) = dl[k].sinr();
  for (std::size_t i = 0; i < ul.size(); ++i) a.iota_ul(i) = ul[i].sinr();
  return a;
}

void tau_from_terms(const std::vector<UserTerms>& dl, const std::vector<UserTerms>& ul,
                    AuxVars& aux) {
  check_sizes(dl, ul, aux);
  for (std::size_t k = 0; k < dl.size(); ++k)
    aux.tau_dl(k) = std::sqrt(1.0 + aux.iota_dl(k)) * dl[k].amplitude / dl[k].total();
  for (std::size_t i = 0; i < ul.size(); ++i)
    aux.tau_ul(i) = std::sqrt(1.0 + aux.iota_ul(i)) * ul[i].amplitude / ul[i].total();
}

double f_iota_from_terms(const std::vector<UserTerms>& dl, const std::vector<UserTerms>& ul,
                         const AuxVars& aux, double alpha_dl) {
  check_sizes(dl, ul, aux);
  double fd = 0.0, fu = 0.0;
  for (std::size_t k = 0; k < dl.size(); ++k) {
    const double io = aux.iota_dl(k);
    fd += dual_term(io) + (1.0 + io) * dl[k].signal / dl[k].total();
  }
  for (std::size_t i = 0; i < ul.size(); ++i) {
    const double io = aux.iota_ul(i);
    fu += dual_term(io) + (1.0 + io) * ul[i].signal / ul[i].total();
  }
  return (alpha_dl * fd + (1.0 - alpha_dl) * fu) / kLn2;
}

double f_tau_from_terms(const std::vector<UserTerms>& dl, const std::vector<UserTerms>& ul,
                        const AuxVars& aux, double alpha_dl) {
  check_sizes(dl, ul, aux);
  auto user = [](double io, cd tau, const UserTerms& t) {
    return dual_term(io) + 2.0 * std::sqrt(1.0 + io) * std::real(std::conj(tau) * t.amplitude) -
           std::norm(tau) * t.total();
  };
  double fd = 0.0, fu = 0.0;
  for (std::size_t k = 0; k < dl.size(); ++k) fd += user(aux.iota_dl(k), aux.tau_dl(k), dl[k]);
  for (std::size_t i = 0; i < ul.size(); ++i) fu += user(aux.iota_ul(i), aux.tau_ul(i), ul[i]);
  return (alpha_dl * fd + (1.0 - alpha_dl) * fu) / kLn2;
}

AuxVars update_iota(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris) {
  const auto t = terms(s, ch, ris);
  return iota_from_terms(t.dl, t.ul);
}

AuxVars update_tau(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                   const AuxVars& aux) {
  const auto t = terms(s, ch, ris);
  AuxVars out = aux;
  tau_from_terms(t.dl, t.ul, out);
  return out;
}

double eval_f_iota(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                   const AuxVars& aux, double alpha_dl) {
  const auto t = terms(s, ch, ris);
  return f_iota_from_terms(t.dl, t.ul, aux, alpha_dl);
}

double eval_f_tau(const TransceiverState& s, const ChannelSet& ch, const RisConfig& ris,
                  const AuxVars& aux, double alpha_dl) {
  const auto t = terms(s, ch, ris);
  return f_tau_from_terms(t.dl, t.ul, aux, alpha_dl);
}

}  // namespace bdris
