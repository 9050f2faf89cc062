#pragma once

#include <complex>
#include <random>
#include <vector>

#include "zqg/model.hpp"

namespace zqg::testutil {

/** Uniform k points in [-box, box]^2 with |d(k)| >= floor. */
inline std::vector<KPoint> random_kpoints(const Model& model, std::size_t count, double box, double floor,
                                          unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-box, box);
  std::vector<KPoint> out;
  out.reserve(count);
  while (out.size() < count) {
    const KPoint k{u(rng), u(rng)};
    if (evaluate_d(model, k).norm() >= floor) out.push_back(k);
  }
  return out;
}

/**
 * Finite-difference oracle for r^a_{nm} = i <u_n | d_a u_m>, m = -n.
 *
 * Neighbor spinors are parallel-transported: each is rotated so its overlap
 * with u_m(k) is real-positive, which pins the gauge smoothly across the
 * stencil. Independent of the velocity-identity production path.
 */
inline cplx r_element_fd(const Model& model, const KPoint& k, Band n, int a, double h = 1e-5) {
  const Band m = other_band(n);
  const EigenSystem es0 = eigensystem(model, k);
  const Spinor um0 = es0.u(m);
  auto transported = [&](const KPoint& kq) {
    Spinor u = eigensystem(model, kq).u(m);
    const cplx ov = um0.dot(u); // conjugates um0
    return Spinor(u * (std::conj(ov) / std::abs(ov)));
  };
  const KPoint kp{k.kx + (a == 0 ? h : 0.0), k.ky + (a == 1 ? h : 0.0)};
  const KPoint km{k.kx - (a == 0 ? h : 0.0), k.ky - (a == 1 ? h : 0.0)};
  const Spinor du = (transported(kp) - transported(km)) / (2.0 * h);
  return cplx(0.0, 1.0) * es0.u(n).dot(du);
}

/** Central-difference curl of the spin expectation <u_n|sigma|u_n>. */
inline Vec3 spin_curl_fd(const Model& model, const KPoint& k, Band n, double h = 1e-5) {
  auto spin = [&](double kx, double ky) { return spin_expectation(eigensystem(model, {kx, ky}), n); };
  const Vec3 dx = (spin(k.kx + h, k.ky) - spin(k.kx - h, k.ky)) / (2.0 * h);
  const Vec3 dy = (spin(k.kx, k.ky + h) - spin(k.kx, k.ky - h)) / (2.0 * h);
  // curl with d/dz = 0: (dy Fz, -dx Fz, dx Fy - dy Fx)
  return Vec3(dy.z(), -dx.z(), dx.y() - dy.x());
}

inline EigenSystem rotate_phases(EigenSystem es, double phi_plus, double phi_minus) {
  es.u_plus *= cplx(std::cos(phi_plus), std::sin(phi_plus));
  es.u_minus *= cplx(std::cos(phi_minus), std::sin(phi_minus));
  return es;
}

} // namespace zqg::testutil
