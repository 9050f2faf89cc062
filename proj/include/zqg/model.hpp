#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>

#include "zqg/errors.hpp"

namespace zqg {

inline constexpr double pi = std::numbers::pi;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;
using Spinor = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;
using Jac32 = Eigen::Matrix<double, 3, 2>; // column a = d(d)/dk_a, a in {x, y}
using cplx = std::complex<double>;

inline constexpr double node_guard = 1e-9;

struct KPoint {
  double kx = 0.0;
  double ky = 0.0;
  double norm() const { return std::hypot(kx, ky); }
};

inline std::string format_k(const KPoint& k) {
  std::ostringstream os;
  os << "k=(" << k.kx << ", " << k.ky << ")";
  return os.str();
}

enum class Band : int { Plus = +1, Minus = -1 };

inline int band_sign(Band n) { return static_cast<int>(n); }
inline Band other_band(Band n) { return n == Band::Plus ? Band::Minus : Band::Plus; }

/** d(k) and its Jacobian at one k-point. */
struct DValue {
  Vec3 d = Vec3::Zero();
  Jac32 jac = Jac32::Zero();

  double norm() const { return d.norm(); }
  Vec3 unit() const { return d / d.norm(); }
  /** v_a = d(d)/dk_a for a in {0: x, 1: y}. */
  Vec3 velocity(int a) const { return jac.col(a); }
  /** Component of v_a orthogonal to d-hat. */
  Vec3 velocity_perp(int a) const {
    const Vec3 dh = unit();
    const Vec3 v = jac.col(a);
    return v - dh * dh.dot(v);
  }
};

// ---------------------------------------------------------------------------
// Model catalog
// ---------------------------------------------------------------------------

/** d = (kx, ky, m). */
struct MassiveDirac {
  double m = 0.0;
};

/** d = (Re (kx + i ky)^nw, Im (kx + i ky)^nw, 0). */
struct PlanarWinding {
  int nw = 1;
};

/** User-supplied d(k); analytic Jacobian optional (central differences otherwise). */
struct CustomModel {
  std::string name = "custom";
  std::function<Vec3(const KPoint&)> d;
  std::function<Jac32(const KPoint&)> jacobian; // may be empty
};

using Model = std::variant<MassiveDirac, PlanarWinding, CustomModel>;

inline std::string model_name(const Model& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MassiveDirac>) return "massive_dirac";
        if constexpr (std::is_same_v<T, PlanarWinding>) return "planar_winding";
        if constexpr (std::is_same_v<T, CustomModel>) return m.name;
      },
      model);
}

/**
 * Gapped cone with the rotational symmetry deliberately broken:
 * d = (kx + 0.3 ky, ky - 0.1 kx, m + 0.4 kx). The shear and the tilted mass
 * leave every geometric sector with a nonvanishing weighted integral, so all
 * response channels are populated (the isotropic cone kills most of them).
 */
inline Model make_sheared_dirac(double m) {
  Jac32 jac;
  jac << 1.0, 0.3, -0.1, 1.0, 0.4, 0.0;
  return CustomModel{
      "sheared_dirac",
      [m](const KPoint& k) {
        return Vec3(k.kx + 0.3 * k.ky, k.ky - 0.1 * k.kx, m + 0.4 * k.kx);
      },
      [jac](const KPoint&) { return jac; }};
}

/** Name plus parameters, for echoing into result records. */
inline std::string describe_model(const Model& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MassiveDirac>) {
          std::ostringstream os;
          os << "massive_dirac(m=" << m.m << ")";
          return os.str();
        }
        if constexpr (std::is_same_v<T, PlanarWinding>)
          return "planar_winding(nw=" + std::to_string(m.nw) + ")";
        if constexpr (std::is_same_v<T, CustomModel>) return "custom(" + m.name + ")";
      },
      model);
}

namespace detail {

// z^n by repeated multiplication: keeps axis points exact (std::pow goes
// through exp/log and leaves residue at e.g. (i)^2).
inline cplx ipow(cplx z, int n) {
  cplx out(1.0, 0.0);
  for (int i = 0; i < n; ++i) out *= z;
  return out;
}

inline void check_finite(const Vec3& d, const KPoint& k, const std::string& name) {
  if (!d.allFinite())
    throw ModelEvaluationError("model '" + name + "' returned non-finite d at " + format_k(k));
}

} // namespace detail

/** Evaluate d(k) and the Jacobian d(d_b)/dk_a. */
inline DValue evaluate_d(const Model& model, const KPoint& k) {
  DValue out;
  if (const auto* md = std::get_if<MassiveDirac>(&model)) {
    out.d = Vec3(k.kx, k.ky, md->m);
    out.jac.col(0) = Vec3(1, 0, 0);
    out.jac.col(1) = Vec3(0, 1, 0);
    return out;
  }
  if (const auto* pw = std::get_if<PlanarWinding>(&model)) {
    if (pw->nw < 1) throw ModelEvaluationError("planar_winding requires nw >= 1");
    const cplx z(k.kx, k.ky);
    const cplx zn = detail::ipow(z, pw->nw);
    const cplx dz = static_cast<double>(pw->nw) * detail::ipow(z, pw->nw - 1);
    out.d = Vec3(zn.real(), zn.imag(), 0.0);
    out.jac.col(0) = Vec3(dz.real(), dz.imag(), 0.0);
    out.jac.col(1) = Vec3(-dz.imag(), dz.real(), 0.0); // d/dky multiplies by i
    return out;
  }
  const auto& cm = std::get<CustomModel>(model);
  if (!cm.d) throw ModelEvaluationError("custom model '" + cm.name + "' has no d map");
  try {
    out.d = cm.d(k);
  } catch (const std::exception& e) {
    throw ModelEvaluationError("custom model '" + cm.name + "' failed at " + format_k(k) + ": " + e.what());
  }
  detail::check_finite(out.d, k, cm.name);
  if (cm.jacobian) {
    try {
      out.jac = cm.jacobian(k);
    } catch (const std::exception& e) {
      throw ModelEvaluationError("custom model '" + cm.name + "' jacobian failed at " + format_k(k) + ": " +
                                 e.what());
    }
    if (!out.jac.allFinite())
      throw ModelEvaluationError("custom model '" + cm.name + "' returned non-finite jacobian at " + format_k(k));
  } else {
    // Central-difference fallback.
    const double h = 1e-6 * std::max(1.0, k.norm());
    const KPoint xp{k.kx + h, k.ky}, xm{k.kx - h, k.ky};
    const KPoint yp{k.kx, k.ky + h}, ym{k.kx, k.ky - h};
    const Vec3 dxp = cm.d(xp), dxm = cm.d(xm), dyp = cm.d(yp), dym = cm.d(ym);
    detail::check_finite(dxp, xp, cm.name);
    detail::check_finite(dxm, xm, cm.name);
    detail::check_finite(dyp, yp, cm.name);
    detail::check_finite(dym, ym, cm.name);
    out.jac.col(0) = (dxp - dxm) / (2.0 * h);
    out.jac.col(1) = (dyp - dym) / (2.0 * h);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

inline Mat2c hamiltonian(const Vec3& d) {
  Mat2c h;
  h << cplx(d.z(), 0.0), cplx(d.x(), -d.y()), cplx(d.x(), d.y()), cplx(-d.z(), 0.0);
  return h;
}

struct EigenSystem {
  KPoint k;
  double eps_plus = 0.0;  // +|d|
  double eps_minus = 0.0; // -|d|
  Spinor u_plus = Spinor::Zero();
  Spinor u_minus = Spinor::Zero();

  double eps(Band n) const { return n == Band::Plus ? eps_plus : eps_minus; }
  const Spinor& u(Band n) const { return n == Band::Plus ? u_plus : u_minus; }
};

/** Phase convention: largest-modulus spinor component made real and positive. */
inline Spinor gauge_fix(const Spinor& u) {
  const int idx = std::abs(u(0)) >= std::abs(u(1)) ? 0 : 1;
  const double mag = std::abs(u(idx));
  if (mag == 0.0) return u;
  return u * (std::conj(u(idx)) / mag);
}

/**
 * @brief Closed-form spectrum of H = d . sigma with the deterministic gauge.
 *
 * Throws NodeProximityError when |d| < node_guard.
 */
inline EigenSystem eigensystem(const Model& model, const KPoint& k) {
  const DValue dv = evaluate_d(model, k);
  const double dn = dv.norm();
  if (dn < node_guard)
    throw NodeProximityError("|d| = " + std::to_string(dn) + " below node guard at " + format_k(k));
  const Vec3 dh = dv.d / dn;
  const double c = std::sqrt(std::max(0.0, (1.0 + dh.z()) / 2.0));
  const double s = std::sqrt(std::max(0.0, (1.0 - dh.z()) / 2.0));
  const double phi = std::atan2(dh.y(), dh.x());
  const cplx eip(std::cos(phi), std::sin(phi));
  EigenSystem es;
  es.k = k;
  es.eps_plus = dn;
  es.eps_minus = -dn;
  es.u_plus = gauge_fix(Spinor(cplx(c, 0.0), s * eip));
  es.u_minus = gauge_fix(Spinor(-s * std::conj(eip), cplx(c, 0.0)));
  return es;
}

/** (<a|sx|b>, <a|sy|b>, <a|sz|b>) for spinors a, b. */
inline CVec3 pauli_sandwich(const Spinor& a, const Spinor& b) {
  const cplx a0 = std::conj(a(0)), a1 = std::conj(a(1));
  CVec3 out;
  out(0) = a0 * b(1) + a1 * b(0);
  out(1) = cplx(0.0, 1.0) * (a1 * b(0) - a0 * b(1));
  out(2) = a0 * b(0) - a1 * b(1);
  return out;
}

/** <u_n|sigma|u_n>; equals n d-hat up to rounding. */
inline Vec3 spin_expectation(const EigenSystem& es, Band n) {
  const CVec3 sw = pauli_sandwich(es.u(n), es.u(n));
  return Vec3(sw(0).real(), sw(1).real(), sw(2).real());
}

// ---------------------------------------------------------------------------
// Interband elements for the ordered pair (n, m = -n)
// ---------------------------------------------------------------------------

struct BandPairElements {
  KPoint k;
  Band n = Band::Plus;
  CVec3 r = CVec3::Zero();     // r^a_{nm}; r^z = 0 on the 2D domain
  CVec3 sigma = CVec3::Zero(); // sigma^b_{mn}
  double eps_nm = 0.0;         // eps_n - eps_m
};

/**
 * @brief Elements from explicit spinors (gauge studies use this entry point).
 *
 * r^a_{nm} = i <u_n| d_a H |u_m> / (eps_m - eps_n), a in {x, y}; r^z = 0.
 */
inline BandPairElements pair_elements_from(const DValue& dv, const EigenSystem& es, Band n) {
  const Band m = other_band(n);
  BandPairElements el;
  el.k = es.k;
  el.n = n;
  el.eps_nm = es.eps(n) - es.eps(m);
  const CVec3 sw_nm = pauli_sandwich(es.u(n), es.u(m));
  const cplx denom(es.eps(m) - es.eps(n), 0.0);
  for (int a = 0; a < 2; ++a) {
    const Vec3 v = dv.jac.col(a);
    const cplx vel = v.x() * sw_nm(0) + v.y() * sw_nm(1) + v.z() * sw_nm(2);
    el.r(a) = cplx(0.0, 1.0) * vel / denom;
  }
  el.r(2) = cplx(0.0, 0.0);
  el.sigma = pauli_sandwich(es.u(m), es.u(n));
  return el;
}

inline BandPairElements band_pair_elements(const Model& model, const KPoint& k, Band n) {
  const DValue dv = evaluate_d(model, k);
  const EigenSystem es = eigensystem(model, k);
  return pair_elements_from(dv, es, n);
}

} // namespace zqg
