#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "zqg/geometry.hpp"
#include "zqg/parallel.hpp"
#include "zqg/sectors.hpp"

namespace zqg {

// ---------------------------------------------------------------------------
// Occupation and integration domain
// ---------------------------------------------------------------------------

/** Fermi factor f(eps) = 1/(exp((eps-mu)/T)+1); T = 0 is the sharp step. */
struct OccupationSpec {
  double mu = 0.0;
  double T = 0.0;

  double occupation(double eps) const {
    if (T < 0) throw ConfigError("occupation temperature must be >= 0");
    if (T == 0.0) {
      if (eps < mu) return 1.0;
      if (eps > mu) return 0.0;
      return 0.5;
    }
    return 1.0 / (std::exp((eps - mu) / T) + 1.0);
  }
};

/**
 * Radial cutoff and polar quadrature for the continuum k-integral, measure
 * d^2k/(2pi)^2. cutoff = 0 resolves to 20 * max(|m|, 1) (mass scale 1 for
 * models without an explicit mass). Every integration is rerun at twice the
 * cutoff; a relative shift beyond convergence_rel raises ConvergenceError.
 */
struct IntegrationDomain {
  double cutoff = 0.0; // 0: auto
  int nr = 400;
  int ntheta = 256;
  bool log_radial = true;
  double convergence_rel = 0.05;
};

inline double resolve_cutoff(const Model& model, const IntegrationDomain& domain) {
  if (domain.cutoff != 0.0) {
    if (!(domain.cutoff > 0)) throw ConfigError("integration cutoff must be > 0");
    return domain.cutoff;
  }
  double mass_scale = 1.0;
  if (const auto* md = std::get_if<MassiveDirac>(&model))
    mass_scale = std::max(1.0, std::abs(md->m));
  return 20.0 * mass_scale;
}

// ---------------------------------------------------------------------------
// Sector coefficients: the frequency-independent content of both tensors
// ---------------------------------------------------------------------------

/** Sectors to zero out in the integrand (ablation study); default keeps all. */
struct SectorMask {
  bool omega_a = false;
  bool g_n = false;
  bool omega_n = false;
  bool g_a = false;

  static SectorMask drop(Sector s) {
    SectorMask m;
    switch (s) {
      case Sector::OmegaA: m.omega_a = true; break;
      case Sector::GN: m.g_n = true; break;
      case Sector::OmegaN: m.omega_n = true; break;
      case Sector::GA: m.g_a = true; break;
    }
    return m;
  }
};

/**
 * The eight weighted sector integrals. Both response tensors are exact
 * polynomials in omega whose coefficients live here; computing them once per
 * (model, occupation, domain) makes the omega sweep pure arithmetic.
 *
 * Current-response weights, ordered pairs (n, m = -n), eps = eps_n - eps_m:
 *   sigma_omega_a = sum f_n OmegaA / eps      sigma_g_n = sum f_n gN / eps
 *   sigma_omega_n = sum f_n OmegaN_n / eps^2  sigma_g_a = sum f_n gA_n / eps^2
 * Magnetization-response weights carry the swapped pair index (mn): OmegaN
 * and gA flip sign under the swap, OmegaA and gN do not:
 *   alpha_omega_n = sum f_n (-OmegaN_n) / (2 eps^2)
 *   alpha_g_a     = sum f_n (-gA_n)     / (2 eps^2)
 *   alpha_omega_a = sum f_n OmegaA      / (2 eps^3)
 *   alpha_g_n     = sum f_n gN          / (2 eps^3)
 */
struct SectorCoefficients {
  Vec3 sigma_omega_a = Vec3::Zero();
  Mat3 sigma_g_n = Mat3::Zero();
  Vec3 sigma_omega_n = Vec3::Zero();
  Mat3 sigma_g_a = Mat3::Zero();
  Vec3 alpha_omega_n = Vec3::Zero();
  Mat3 alpha_g_a = Mat3::Zero();
  Vec3 alpha_omega_a = Vec3::Zero();
  Mat3 alpha_g_n = Mat3::Zero();
  double cutoff = 0.0;
  double convergence_delta = 0.0; // max coefficient shift under cutoff doubling

  double max_norm() const {
    return std::max({sigma_omega_a.cwiseAbs().maxCoeff(), sigma_g_n.cwiseAbs().maxCoeff(),
                     sigma_omega_n.cwiseAbs().maxCoeff(), sigma_g_a.cwiseAbs().maxCoeff(),
                     alpha_omega_n.cwiseAbs().maxCoeff(), alpha_g_a.cwiseAbs().maxCoeff(),
                     alpha_omega_a.cwiseAbs().maxCoeff(), alpha_g_n.cwiseAbs().maxCoeff()});
  }
};

namespace detail {

inline void accumulate_pair(SectorCoefficients& acc, const SectorDecomposition& s, int n_sign,
                            double f, double eps, double weight) {
  // band-resolved sector values: even sectors are stored for band +, odd ones
  // carry the band sign explicitly
  const double ns = static_cast<double>(n_sign);
  const Vec3 omega_a = s.omega_a;
  const Mat3 g_n = s.g_n;
  const Vec3 omega_n = ns * s.omega_n;
  const Mat3 g_a = ns * s.g_a;

  const double w1 = weight * f / eps;
  const double w2 = weight * f / (eps * eps);
  const double w3 = w2 / (2.0 * eps);

  acc.sigma_omega_a += w1 * omega_a;
  acc.sigma_g_n += w1 * g_n;
  acc.sigma_omega_n += w2 * omega_n;
  acc.sigma_g_a += w2 * g_a;
  acc.alpha_omega_n += (0.5 * w2) * (-omega_n);
  acc.alpha_g_a += (0.5 * w2) * (-g_a);
  acc.alpha_omega_a += w3 * omega_a;
  acc.alpha_g_n += w3 * g_n;
}

inline void add_coefficients(SectorCoefficients& into, const SectorCoefficients& from) {
  into.sigma_omega_a += from.sigma_omega_a;
  into.sigma_g_n += from.sigma_g_n;
  into.sigma_omega_n += from.sigma_omega_n;
  into.sigma_g_a += from.sigma_g_a;
  into.alpha_omega_n += from.alpha_omega_n;
  into.alpha_g_a += from.alpha_g_a;
  into.alpha_omega_a += from.alpha_omega_a;
  into.alpha_g_n += from.alpha_g_n;
}

inline double coefficient_shift(const SectorCoefficients& a, const SectorCoefficients& b) {
  return std::max(
      {(a.sigma_omega_a - b.sigma_omega_a).cwiseAbs().maxCoeff(),
       (a.sigma_g_n - b.sigma_g_n).cwiseAbs().maxCoeff(),
       (a.sigma_omega_n - b.sigma_omega_n).cwiseAbs().maxCoeff(),
       (a.sigma_g_a - b.sigma_g_a).cwiseAbs().maxCoeff(),
       (a.alpha_omega_n - b.alpha_omega_n).cwiseAbs().maxCoeff(),
       (a.alpha_g_a - b.alpha_g_a).cwiseAbs().maxCoeff(),
       (a.alpha_omega_a - b.alpha_omega_a).cwiseAbs().maxCoeff(),
       (a.alpha_g_n - b.alpha_g_n).cwiseAbs().maxCoeff()});
}

/**
 * One pass of the polar quadrature. Radial trapezoid in t = ln r (or in r
 * when not log-spaced) from a fixed inner guard radius out to the cutoff,
 * uniform periodic angular rule, measure d^2k / (2pi)^2. Parallel over
 * angular rays with a fixed-order gather, so the result is bitwise
 * worker-independent.
 *
 * With `doubled` set, the same radial ladder (same origin and step) is
 * extended until it reaches at least twice the cutoff. Reusing the ladder
 * means the doubled run shares every base node, so comparing the two
 * measures the added tail alone rather than a shifted discretization error.
 */
inline SectorCoefficients integrate_coefficients_at(const Model& model,
                                                    const OccupationSpec& occupation,
                                                    const IntegrationDomain& domain, double cutoff,
                                                    bool doubled, unsigned workers) {
  const int nr = domain.nr;
  const int ntheta = domain.ntheta;
  if (nr < 8 || ntheta < 8) throw ConfigError("integration domain needs nr, ntheta >= 8");
  // fixed inner guard radius: the integrand is regular at the origin for any
  // gapped model, and the annulus below it is vanishingly small
  const double r_lo = 1e-8;
  if (cutoff <= 2.0 * r_lo) throw ConfigError("integration cutoff too small");
  const double t_lo = domain.log_radial ? std::log(r_lo) : r_lo;
  const double t_hi = domain.log_radial ? std::log(cutoff) : cutoff;
  const double dt = (t_hi - t_lo) / (nr - 1);
  const double span = domain.log_radial ? std::log(2.0) : cutoff;
  const int steps = doubled ? nr + static_cast<int>(std::ceil(span / dt)) : nr;
  const double dtheta = 2.0 * pi / ntheta;

  std::vector<SectorCoefficients> ray(ntheta);
  parallel_for(static_cast<std::size_t>(ntheta), resolve_workers(workers), [&](std::size_t j) {
    const double theta = dtheta * static_cast<double>(j);
    const double ct = std::cos(theta), st = std::sin(theta);
    SectorCoefficients acc;
    for (int i = 0; i < steps; ++i) {
      const double t = t_lo + i * dt;
      const double r = domain.log_radial ? std::exp(t) : t;
      const KPoint k{r * ct, r * st};
      const DValue dv = evaluate_d(model, k);
      const double gap = 2.0 * dv.norm();
      if (gap < 2.0 * node_guard)
        throw NodeProximityError("band gap " + std::to_string(gap) + " below guard at " +
                                 format_k(k) + " inside the integration domain");
      const auto sectors = closed_form_sectors(model, k, Band::Plus);
      const double jac = domain.log_radial ? r * r : r; // r dr = r^2 dt on the log ladder
      const double trap = (i == 0 || i == steps - 1) ? 0.5 : 1.0;
      const double weight = trap * jac * dt * dtheta / (4.0 * pi * pi);
      for (int n_sign : {+1, -1}) {
        const double eps_n = n_sign * dv.norm();
        const double f = occupation.occupation(eps_n);
        if (f == 0.0) continue;
        const double eps_nm = 2.0 * eps_n; // eps_n - eps_m with m = -n
        accumulate_pair(acc, sectors, n_sign, f, eps_nm, weight);
      }
    }
    ray[j] = acc;
  });

  SectorCoefficients total;
  total.cutoff = cutoff;
  for (const auto& r : ray) add_coefficients(total, r); // fixed order
  return total;
}

} // namespace detail

/**
 * The eight coefficients at the domain cutoff, with the doubling self-check:
 * convergence_delta is the largest coefficient shift under cutoff -> 2 cutoff
 * relative to the largest coefficient magnitude. Beyond
 * domain.convergence_rel the result is rejected.
 */
inline SectorCoefficients weighted_sector_integrals(const Model& model,
                                                    const OccupationSpec& occupation,
                                                    const IntegrationDomain& domain,
                                                    unsigned workers = 0) {
  const double cutoff = resolve_cutoff(model, domain);
  SectorCoefficients at =
      detail::integrate_coefficients_at(model, occupation, domain, cutoff, false, workers);
  const SectorCoefficients doubled =
      detail::integrate_coefficients_at(model, occupation, domain, cutoff, true, workers);
  const double scale = std::max(at.max_norm(), doubled.max_norm());
  const double shift = detail::coefficient_shift(at, doubled);
  at.convergence_delta = scale > 0.0 ? shift / scale : 0.0;
  if (at.convergence_delta > domain.convergence_rel)
    throw ConvergenceError(
        "quadrature not converged: coefficient shift " + std::to_string(at.convergence_delta) +
            " under cutoff doubling (" + std::to_string(cutoff) + " -> " +
            std::to_string(2.0 * cutoff) + ") exceeds tolerance " +
            std::to_string(domain.convergence_rel),
        at.max_norm(), doubled.max_norm());
  return at;
}

// ---------------------------------------------------------------------------
// Tensor assembly (exact polynomial in omega)
// ---------------------------------------------------------------------------

namespace detail {

inline CVec3 cross_with_column(const Vec3& c, int b) {
  // e_b x c for the three unit vectors
  Vec3 e = Vec3::Zero();
  e(b) = 1.0;
  return e.cross(c).cast<cplx>();
}

} // namespace detail

/**
 * Column b is the current response to B = e_b:
 *   J = i w (B x C_omega_a) - 2 i w (C_g_n B) - w^2 (B x C_omega_n)
 *       + 2 w^2 (C_g_a B).
 */
inline CMat3 sigma_tensor(const SectorCoefficients& c, double omega,
                          const SectorMask& ablate = {}) {
  const Vec3 c1 = ablate.omega_a ? Vec3::Zero().eval() : c.sigma_omega_a;
  const Mat3 c2 = ablate.g_n ? Mat3::Zero().eval() : c.sigma_g_n;
  const Vec3 c3 = ablate.omega_n ? Vec3::Zero().eval() : c.sigma_omega_n;
  const Mat3 c4 = ablate.g_a ? Mat3::Zero().eval() : c.sigma_g_a;
  const cplx iw(0.0, omega);
  const double w2 = omega * omega;
  CMat3 out;
  for (int b = 0; b < 3; ++b) {
    const Vec3 eb = Vec3::Unit(b);
    out.col(b) = iw * detail::cross_with_column(c1, b) - 2.0 * iw * (c2 * eb).cast<cplx>() -
                 w2 * detail::cross_with_column(c3, b) + 2.0 * w2 * (c4 * eb).cast<cplx>();
  }
  return out;
}

/**
 * Column b is the magnetization response to E = e_b:
 *   S = i w (E x A_omega_n) + 2 i w (A_g_a E) + w^2 (E x A_omega_a)
 *       + 2 w^2 (A_g_n E).
 */
inline CMat3 alpha_tensor(const SectorCoefficients& c, double omega,
                          const SectorMask& ablate = {}) {
  const Vec3 a1 = ablate.omega_n ? Vec3::Zero().eval() : c.alpha_omega_n;
  const Mat3 a2 = ablate.g_a ? Mat3::Zero().eval() : c.alpha_g_a;
  const Vec3 a3 = ablate.omega_a ? Vec3::Zero().eval() : c.alpha_omega_a;
  const Mat3 a4 = ablate.g_n ? Mat3::Zero().eval() : c.alpha_g_n;
  const cplx iw(0.0, omega);
  const double w2 = omega * omega;
  CMat3 out;
  for (int b = 0; b < 3; ++b) {
    const Vec3 eb = Vec3::Unit(b);
    out.col(b) = iw * detail::cross_with_column(a1, b) + 2.0 * iw * (a2 * eb).cast<cplx>() +
                 w2 * detail::cross_with_column(a3, b) + 2.0 * w2 * (a4 * eb).cast<cplx>();
  }
  return out;
}

inline CMat3 sigma_tensor(const Model& model, const OccupationSpec& occupation,
                          const IntegrationDomain& domain, double omega, unsigned workers = 0) {
  if (omega < 0) throw ConfigError("omega must be >= 0");
  return sigma_tensor(weighted_sector_integrals(model, occupation, domain, workers), omega);
}

inline CMat3 alpha_tensor(const Model& model, const OccupationSpec& occupation,
                          const IntegrationDomain& domain, double omega, unsigned workers = 0) {
  if (omega < 0) throw ConfigError("omega must be >= 0");
  return alpha_tensor(weighted_sector_integrals(model, occupation, domain, workers), omega);
}

/** (minus, plus) = (T_xy -/+ T_yx) / 2. */
inline std::pair<cplx, cplx> decompose_pm(const CMat3& tensor) {
  return {0.5 * (tensor(0, 1) - tensor(1, 0)), 0.5 * (tensor(0, 1) + tensor(1, 0))};
}

/**
 * The four +/- channels per tensor, each fed by exactly one coefficient:
 *   sigma_minus = i w C_omega_a,z - w^2 C_omega_n,z
 *   sigma_plus  = -2 i w C_g_n,xy + 2 w^2 C_g_a,xy
 *   alpha_minus = i w A_omega_n,z + w^2 A_omega_a,z
 *   alpha_plus  =  2 i w A_g_a,xy + 2 w^2 A_g_n,xy
 * (symmetric-matrix contributions cancel from the minus channels, the
 * vector-cross contributions from the plus channels). Evaluating the channels
 * from the coefficients rather than from the assembled matrices keeps each
 * one's arithmetic untouched when another sector is ablated, so the
 * one-sector-one-channel correspondence holds bitwise, not just to rounding.
 */
struct ChannelValues {
  cplx sigma_minus, sigma_plus, alpha_minus, alpha_plus;
};

inline ChannelValues channels_at(const SectorCoefficients& c, double omega,
                                 const SectorMask& ablate = {}) {
  const double w2 = omega * omega;
  ChannelValues v;
  v.sigma_minus = cplx(ablate.omega_n ? 0.0 : -(w2 * c.sigma_omega_n.z()),
                       ablate.omega_a ? 0.0 : omega * c.sigma_omega_a.z());
  v.sigma_plus = cplx(ablate.g_a ? 0.0 : 2.0 * w2 * c.sigma_g_a(0, 1),
                      ablate.g_n ? 0.0 : -2.0 * omega * c.sigma_g_n(0, 1));
  v.alpha_minus = cplx(ablate.omega_a ? 0.0 : w2 * c.alpha_omega_a.z(),
                       ablate.omega_n ? 0.0 : omega * c.alpha_omega_n.z());
  v.alpha_plus = cplx(ablate.g_n ? 0.0 : 2.0 * w2 * c.alpha_g_n(0, 1),
                      ablate.g_a ? 0.0 : 2.0 * omega * c.alpha_g_a(0, 1));
  return v;
}

// ---------------------------------------------------------------------------
// Spectra over a frequency sweep
// ---------------------------------------------------------------------------

struct ResponseSpectrum {
  std::vector<double> omegas;
  std::vector<CMat3> sigma;
  std::vector<CMat3> alpha;
  std::vector<cplx> sigma_minus, sigma_plus, alpha_minus, alpha_plus;
  double g_mu_b = 1.0; // prefactor echo: magnetic coupling set to one
  double charge = 1.0; // prefactor echo
  double cutoff = 0.0;
  double convergence_delta = 0.0;
  std::string model;
  OccupationSpec occupation;
  IntegrationDomain domain;
};

inline ResponseSpectrum run_response(const Model& model, const OccupationSpec& occupation,
                                     const IntegrationDomain& domain,
                                     const std::vector<double>& omegas, unsigned workers = 0,
                                     const SectorMask& ablate = {}) {
  for (double w : omegas)
    if (w < 0) throw ConfigError("omega must be >= 0");
  const SectorCoefficients coeffs = weighted_sector_integrals(model, occupation, domain, workers);

  ResponseSpectrum out;
  out.omegas = omegas;
  out.sigma.resize(omegas.size());
  out.alpha.resize(omegas.size());
  out.sigma_minus.resize(omegas.size());
  out.sigma_plus.resize(omegas.size());
  out.alpha_minus.resize(omegas.size());
  out.alpha_plus.resize(omegas.size());
  out.cutoff = coeffs.cutoff;
  out.convergence_delta = coeffs.convergence_delta;
  out.model = describe_model(model);
  out.occupation = occupation;
  out.domain = domain;

  parallel_for(omegas.size(), resolve_workers(workers), [&](std::size_t i) {
    out.sigma[i] = sigma_tensor(coeffs, omegas[i], ablate);
    out.alpha[i] = alpha_tensor(coeffs, omegas[i], ablate);
    const ChannelValues v = channels_at(coeffs, omegas[i], ablate);
    out.sigma_minus[i] = v.sigma_minus;
    out.sigma_plus[i] = v.sigma_plus;
    out.alpha_minus[i] = v.alpha_minus;
    out.alpha_plus[i] = v.alpha_plus;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Low-frequency scaling fits
// ---------------------------------------------------------------------------

enum class Channel {
  ImSigmaMinus,
  ImSigmaPlus,
  ReSigmaMinus,
  ReSigmaPlus,
  ImAlphaMinus,
  ImAlphaPlus,
  ReAlphaMinus,
  ReAlphaPlus
};

inline const char* channel_name(Channel c) {
  switch (c) {
    case Channel::ImSigmaMinus: return "Im_sigma_minus";
    case Channel::ImSigmaPlus: return "Im_sigma_plus";
    case Channel::ReSigmaMinus: return "Re_sigma_minus";
    case Channel::ReSigmaPlus: return "Re_sigma_plus";
    case Channel::ImAlphaMinus: return "Im_alpha_minus";
    case Channel::ImAlphaPlus: return "Im_alpha_plus";
    case Channel::ReAlphaMinus: return "Re_alpha_minus";
    case Channel::ReAlphaPlus: return "Re_alpha_plus";
  }
  return "unknown";
}

inline constexpr std::array<Channel, 8> all_channels = {
    Channel::ImSigmaMinus, Channel::ImSigmaPlus, Channel::ReSigmaMinus, Channel::ReSigmaPlus,
    Channel::ImAlphaMinus, Channel::ImAlphaPlus, Channel::ReAlphaMinus, Channel::ReAlphaPlus};

inline double channel_value(const ResponseSpectrum& s, Channel c, std::size_t i) {
  switch (c) {
    case Channel::ImSigmaMinus: return s.sigma_minus[i].imag();
    case Channel::ImSigmaPlus: return s.sigma_plus[i].imag();
    case Channel::ReSigmaMinus: return s.sigma_minus[i].real();
    case Channel::ReSigmaPlus: return s.sigma_plus[i].real();
    case Channel::ImAlphaMinus: return s.alpha_minus[i].imag();
    case Channel::ImAlphaPlus: return s.alpha_plus[i].imag();
    case Channel::ReAlphaMinus: return s.alpha_minus[i].real();
    case Channel::ReAlphaPlus: return s.alpha_plus[i].real();
  }
  return 0.0;
}

struct ScalingFit {
  Channel channel = Channel::ImSigmaMinus;
  double exponent = 0.0;
  double prefactor = 0.0; // signed: |value| = |prefactor| omega^exponent
  double r_squared = 0.0;
  double omega_lo = 0.0;
  double omega_hi = 0.0;
  bool suppressed = false; // magnitude under the floor across the window
};

inline constexpr double channel_floor = 1e-14;

/**
 * Least-squares slope of log|value| against log omega. Points below the
 * magnitude floor are excluded; a channel entirely under the floor is
 * reported suppressed instead of fitted (symmetry can legitimately kill it).
 */
inline ScalingFit scaling_fit(const ResponseSpectrum& spectrum, Channel channel) {
  if (spectrum.omegas.size() < 6)
    throw ConfigError("scaling fit needs at least 6 frequencies");
  const auto [lo_it, hi_it] =
      std::minmax_element(spectrum.omegas.begin(), spectrum.omegas.end());
  if (!(*lo_it > 0) || *hi_it / *lo_it < 10.0)
    throw ConfigError("scaling fit needs positive frequencies spanning at least one decade");

  ScalingFit fit;
  fit.channel = channel;
  fit.omega_lo = *lo_it;
  fit.omega_hi = *hi_it;

  std::vector<double> lx, ly;
  double sign = 0.0;
  for (std::size_t i = 0; i < spectrum.omegas.size(); ++i) {
    const double v = channel_value(spectrum, channel, i);
    if (std::abs(v) <= channel_floor) continue;
    lx.push_back(std::log(spectrum.omegas[i]));
    ly.push_back(std::log(std::abs(v)));
    sign = v > 0 ? 1.0 : -1.0;
  }
  if (lx.size() < 2) {
    fit.suppressed = true;
    return fit;
  }

  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
    syy += ly[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  fit.exponent = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.prefactor = sign * std::exp(intercept);
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double resid = ly[i] - (fit.exponent * lx[i] + intercept);
    ss_res += resid * resid;
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json to_json(const cplx& z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline nlohmann::json to_json(const CMat3& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int a = 0; a < 3; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (int b = 0; b < 3; ++b) row.push_back(to_json(m(a, b)));
    rows.push_back(row);
  }
  return rows;
}

} // namespace detail

inline nlohmann::json fit_to_json(const ScalingFit& fit) {
  return {{"channel", channel_name(fit.channel)},
          {"exponent", fit.exponent},
          {"prefactor", fit.prefactor},
          {"r_squared", fit.r_squared},
          {"omega_window", {fit.omega_lo, fit.omega_hi}},
          {"suppressed", fit.suppressed}};
}

inline nlohmann::json spectrum_to_json(const ResponseSpectrum& s,
                                       const std::vector<ScalingFit>& fits = {}) {
  nlohmann::json j;
  j["model"] = s.model;
  j["occupation"] = {{"mu", s.occupation.mu}, {"T", s.occupation.T}};
  j["domain"] = {{"cutoff", s.cutoff},
                 {"cutoff_doubled", 2.0 * s.cutoff},
                 {"nr", s.domain.nr},
                 {"ntheta", s.domain.ntheta},
                 {"log_radial", s.domain.log_radial},
                 {"convergence_rel", s.domain.convergence_rel}};
  j["prefactors"] = {{"g_mu_b", s.g_mu_b}, {"charge", s.charge}};
  j["convergence_delta"] = s.convergence_delta;
  j["omegas"] = s.omegas;
  auto dump = [](const std::vector<CMat3>& ms) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& m : ms) arr.push_back(detail::to_json(m));
    return arr;
  };
  auto dump_c = [](const std::vector<cplx>& zs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& z : zs) arr.push_back(detail::to_json(z));
    return arr;
  };
  j["sigma"] = dump(s.sigma);
  j["alpha"] = dump(s.alpha);
  j["sigma_minus"] = dump_c(s.sigma_minus);
  j["sigma_plus"] = dump_c(s.sigma_plus);
  j["alpha_minus"] = dump_c(s.alpha_minus);
  j["alpha_plus"] = dump_c(s.alpha_plus);
  nlohmann::json jfits = nlohmann::json::array();
  for (const auto& f : fits) jfits.push_back(fit_to_json(f));
  j["fits"] = jfits;
  return j;
}

/** One row per frequency: xy-block entries and the +/- channels. */
inline void write_spectrum_csv(std::ostream& os, const ResponseSpectrum& s,
                               const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) os << "# " << c << "\n";
  os << "omega";
  for (const char* t : {"sigma", "alpha"})
    for (const char* e : {"xx", "xy", "yx", "yy"})
      for (const char* p : {"re", "im"}) os << "," << t << "_" << e << "_" << p;
  for (const char* t : {"sigma", "alpha"})
    for (const char* e : {"minus", "plus"})
      for (const char* p : {"re", "im"}) os << "," << t << "_" << e << "_" << p;
  os << "\n" << std::setprecision(17);
  for (std::size_t i = 0; i < s.omegas.size(); ++i) {
    os << s.omegas[i];
    for (const auto* m : {&s.sigma[i], &s.alpha[i]})
      for (std::pair<int, int> e : {std::pair{0, 0}, {0, 1}, {1, 0}, {1, 1}})
        os << "," << (*m)(e.first, e.second).real() << "," << (*m)(e.first, e.second).imag();
    for (const auto* zs : {&s.sigma_minus, &s.sigma_plus, &s.alpha_minus, &s.alpha_plus})
      os << "," << (*zs)[i].real() << "," << (*zs)[i].imag();
    os << "\n";
  }
}

} // namespace zqg
