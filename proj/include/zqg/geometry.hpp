#pragma once

#include "zqg/model.hpp"

namespace zqg {

/** T^{ab} = r^a_{nm} r^b_{mn}: Hermitian; metric g = Re T, curvature = -2 Im T. */
struct ConventionalQGT {
  KPoint k;
  Band n = Band::Plus;
  CMat3 T = CMat3::Zero();
  Mat3 g = Mat3::Zero();
  Mat3 omega_tensor = Mat3::Zero();
  Vec3 omega_vec = Vec3::Zero(); // omega_c = 1/2 eps_{cab} Omega^{ab}
};

inline ConventionalQGT conventional_qgt(const BandPairElements& el) {
  ConventionalQGT out;
  out.k = el.k;
  out.n = el.n;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) out.T(a, b) = el.r(a) * std::conj(el.r(b));
  out.g = out.T.real();
  out.omega_tensor = -2.0 * out.T.imag();
  out.omega_vec = Vec3(out.omega_tensor(1, 2), out.omega_tensor(2, 0), out.omega_tensor(0, 1));
  return out;
}

/** T^{Z,ab} = r^a_{nm} sigma^b_{mn}: generically non-Hermitian. */
struct ZeemanQGT {
  KPoint k;
  Band n = Band::Plus;
  CMat3 T = CMat3::Zero();
};

inline ZeemanQGT zeeman_qgt(const BandPairElements& el) {
  ZeemanQGT out;
  out.k = el.k;
  out.n = el.n;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) out.T(a, b) = el.r(a) * el.sigma(b);
  return out;
}

// ---------------------------------------------------------------------------
// Fourfold sector split of a complex 3x3 tensor
// ---------------------------------------------------------------------------

/**
 * Real sectors of T: symmetric part Re/Im -> g_n/g_a, antisymmetric part
 * folded to vectors via the cross product, -Re/-Im -> omega_a/omega_n.
 */
struct SectorDecomposition {
  Mat3 g_n = Mat3::Zero();
  Mat3 g_a = Mat3::Zero();
  Vec3 omega_n = Vec3::Zero();
  Vec3 omega_a = Vec3::Zero();
};

inline SectorDecomposition decompose(const CMat3& T) {
  SectorDecomposition out;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const cplx s = 0.5 * (T(a, b) + T(b, a));
      out.g_n(a, b) = s.real();
      out.g_a(a, b) = s.imag();
    }
  const cplx cx = T(1, 2) - T(2, 1);
  const cplx cy = T(2, 0) - T(0, 2);
  const cplx cz = T(0, 1) - T(1, 0);
  out.omega_a = -Vec3(cx.real(), cy.real(), cz.real());
  out.omega_n = -Vec3(cx.imag(), cy.imag(), cz.imag());
  return out;
}

inline SectorDecomposition decompose(const ZeemanQGT& tz) { return decompose(tz.T); }

/** Inverse of decompose: T^{ab} = g_n + i g_a - 1/2 eps_{abc}(omega_a + i omega_n)_c. */
inline CMat3 reconstruct(const SectorDecomposition& s) {
  CMat3 T;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) T(a, b) = cplx(s.g_n(a, b), s.g_a(a, b));
  const CVec3 w = s.omega_a.cast<cplx>() + cplx(0, 1) * s.omega_n.cast<cplx>();
  T(1, 2) -= 0.5 * w(0);
  T(2, 1) += 0.5 * w(0);
  T(2, 0) -= 0.5 * w(1);
  T(0, 2) += 0.5 * w(1);
  T(0, 1) -= 0.5 * w(2);
  T(1, 0) += 0.5 * w(2);
  return T;
}

// ---------------------------------------------------------------------------
// Closed forms from d-hat and the Jacobian (no eigenvectors)
// ---------------------------------------------------------------------------

namespace detail {

struct DHatDerivs {
  Vec3 dhat;
  Vec3 dd[2]; // dd[a] = d(d-hat)/dk_a, a in {x, y}
};

inline DHatDerivs dhat_derivatives(const DValue& dv, const KPoint& k) {
  const double dn = dv.norm();
  if (dn < node_guard)
    throw NodeProximityError("|d| = " + std::to_string(dn) + " below node guard at " + format_k(k));
  DHatDerivs out;
  out.dhat = dv.d / dn;
  for (int a = 0; a < 2; ++a) {
    const Vec3 v = dv.jac.col(a);
    out.dd[a] = (v - out.dhat * out.dhat.dot(v)) / dn;
  }
  return out;
}

} // namespace detail

/**
 * @brief Sector fields of band n at k directly from d-hat derivatives.
 *
 *   omega_n = (n/2) curl d-hat                (band-odd)
 *   g_a^{ab} = -(n/4)(d_a dhat_b + d_b dhat_a) (band-odd)
 *   omega_a = -1/2 [dhat (div dhat) - (dhat . grad) dhat]   (band-even)
 *   g_n^{ab} = 1/4 [(dhat x d_a dhat)_b + (dhat x d_b dhat)_a] (band-even)
 *
 * All derivatives along z vanish on the 2D domain.
 */
inline SectorDecomposition closed_form_sectors(const Model& model, const KPoint& k, Band n) {
  const DValue dv = evaluate_d(model, k);
  const auto hd = detail::dhat_derivatives(dv, k);
  const double ns = static_cast<double>(band_sign(n));
  SectorDecomposition out;

  out.omega_n = 0.5 * ns * Vec3(hd.dd[1].z(), -hd.dd[0].z(), hd.dd[0].y() - hd.dd[1].x());

  const double div = hd.dd[0].x() + hd.dd[1].y();
  const Vec3 advect = hd.dhat.x() * hd.dd[0] + hd.dhat.y() * hd.dd[1];
  out.omega_a = -0.5 * (hd.dhat * div - advect);

  // rows a in {x, y, z}; the z-derivative row is zero
  Vec3 grad[3] = {hd.dd[0], hd.dd[1], Vec3::Zero()};
  Vec3 cross[3] = {hd.dhat.cross(hd.dd[0]), hd.dhat.cross(hd.dd[1]), Vec3::Zero()};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      out.g_a(a, b) = -0.25 * ns * (grad[a](b) + grad[b](a));
      out.g_n(a, b) = 0.25 * (cross[a](b) + cross[b](a));
    }
  return out;
}

/** Conventional Berry curvature Omega_xy = -(n/2) (d_x dhat x d_y dhat) . dhat. */
inline double berry_curvature_xy(const Model& model, const KPoint& k, Band n) {
  const DValue dv = evaluate_d(model, k);
  const auto hd = detail::dhat_derivatives(dv, k);
  return -0.5 * static_cast<double>(band_sign(n)) * hd.dd[0].cross(hd.dd[1]).dot(hd.dhat);
}

} // namespace zqg
