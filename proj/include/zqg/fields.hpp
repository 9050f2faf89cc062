#pragma once

#include <algorithm>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <variant>
#include <vector>

#include <json.hpp>

#include "zqg/geometry.hpp"
#include "zqg/parallel.hpp"

namespace zqg {

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

/**
 * Rectangular or origin-centred annular momentum grid. Node storage order is
 * outer-axis major: cartesian index = ix * ny + iy, polar index =
 * ir * ntheta + itheta. Polar radii include both endpoints (uniformly or
 * log-spaced); angles cover [0, 2pi) exclusive.
 */
struct Grid2D {
  enum class Kind { Cartesian, Polar };

  Kind kind = Kind::Cartesian;
  bool excludes_node = false;

  // cartesian
  double kx_min = 0, kx_max = 0, ky_min = 0, ky_max = 0;
  int nx = 0, ny = 0;

  // polar
  double r_min = 0, r_max = 0;
  int nr = 0, ntheta = 0;
  bool log_radial = false;

  static Grid2D cartesian(double kx_min, double kx_max, double ky_min, double ky_max, int nx,
                          int ny, bool excludes_node = false) {
    if (nx < 8 || ny < 8) throw GridError("cartesian grid needs nx, ny >= 8");
    if (!(kx_max > kx_min) || !(ky_max > ky_min))
      throw GridError("cartesian grid needs kx_max > kx_min and ky_max > ky_min");
    Grid2D g;
    g.kind = Kind::Cartesian;
    g.kx_min = kx_min;
    g.kx_max = kx_max;
    g.ky_min = ky_min;
    g.ky_max = ky_max;
    g.nx = nx;
    g.ny = ny;
    g.excludes_node = excludes_node;
    return g;
  }

  static Grid2D polar(double r_min, double r_max, int nr, int ntheta, bool log_radial = false,
                      bool excludes_node = true) {
    if (nr < 8 || ntheta < 8) throw GridError("polar grid needs nr, ntheta >= 8");
    if (!(r_max > r_min) || r_min < 0) throw GridError("polar grid needs r_max > r_min >= 0");
    if ((excludes_node || log_radial) && !(r_min > 0))
      throw GridError("polar grid needs r_min > 0 to exclude the node or be log-spaced");
    Grid2D g;
    g.kind = Kind::Polar;
    g.r_min = r_min;
    g.r_max = r_max;
    g.nr = nr;
    g.ntheta = ntheta;
    g.log_radial = log_radial;
    g.excludes_node = excludes_node;
    return g;
  }

  std::size_t size() const {
    return kind == Kind::Cartesian ? static_cast<std::size_t>(nx) * ny
                                   : static_cast<std::size_t>(nr) * ntheta;
  }

  double step_x() const { return (kx_max - kx_min) / (nx - 1); }
  double step_y() const { return (ky_max - ky_min) / (ny - 1); }

  double radius(int ir) const {
    if (log_radial)
      return std::exp(std::log(r_min) + ir * (std::log(r_max) - std::log(r_min)) / (nr - 1));
    return r_min + ir * (r_max - r_min) / (nr - 1);
  }

  KPoint node(std::size_t i) const {
    if (kind == Kind::Cartesian) {
      const int ix = static_cast<int>(i) / ny;
      const int iy = static_cast<int>(i) % ny;
      return KPoint{kx_min + ix * step_x(), ky_min + iy * step_y()};
    }
    const int ir = static_cast<int>(i) / ntheta;
    const int it = static_cast<int>(i) % ntheta;
    const double r = radius(ir);
    const double th = 2.0 * pi * it / ntheta;
    return KPoint{r * std::cos(th), r * std::sin(th)};
  }
};

// ---------------------------------------------------------------------------
// Sampled fields
// ---------------------------------------------------------------------------

enum class Quantity { OmegaA, OmegaN, GN, GA, WindingField, BerryCurvatureXY };

inline const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::OmegaA: return "omega_a";
    case Quantity::OmegaN: return "omega_n";
    case Quantity::GN: return "g_n";
    case Quantity::GA: return "g_a";
    case Quantity::WindingField: return "winding_field";
    case Quantity::BerryCurvatureXY: return "berry_curvature_xy";
  }
  return "unknown";
}

struct SampledField {
  Grid2D grid;
  std::string name;
  std::variant<std::vector<double>, std::vector<Vec3>, std::vector<Mat3>> values;

  bool is_scalar() const { return std::holds_alternative<std::vector<double>>(values); }
  bool is_vector() const { return std::holds_alternative<std::vector<Vec3>>(values); }
  bool is_tensor() const { return std::holds_alternative<std::vector<Mat3>>(values); }
  const std::vector<double>& scalars() const { return std::get<std::vector<double>>(values); }
  const std::vector<Vec3>& vectors() const { return std::get<std::vector<Vec3>>(values); }
  const std::vector<Mat3>& tensors() const { return std::get<std::vector<Mat3>>(values); }
};

/**
 * Phase-gradient field w_a = (d_x da(d_y) - d_y da(d_x))/(d_x^2 + d_y^2),
 * i.e. the gradient of theta = atan2(d_y, d_x); z-component zero. Needs the
 * in-plane part of d to clear the node guard (theta is undefined where
 * d_x = d_y = 0).
 */
inline Vec3 winding_vector(const DValue& dv, const KPoint& k) {
  const double px = dv.d.x(), py = dv.d.y();
  const double p2 = px * px + py * py;
  if (std::sqrt(p2) < node_guard)
    throw NodeProximityError("in-plane |d| below node guard at " + format_k(k) +
                             "; winding field undefined");
  const double wx = (px * dv.jac(1, 0) - py * dv.jac(0, 0)) / p2;
  const double wy = (px * dv.jac(1, 1) - py * dv.jac(0, 1)) / p2;
  return Vec3(wx, wy, 0.0);
}

inline SampledField sample_field(const Model& model, const Grid2D& grid, Quantity quantity,
                                 Band band = Band::Plus, unsigned workers = 0) {
  SampledField out;
  out.grid = grid;
  out.name = quantity_name(quantity);
  const std::size_t n = grid.size();
  const unsigned nw = resolve_workers(workers);

  auto fill_vectors = [&](auto&& per_node) {
    std::vector<Vec3> v(n);
    parallel_for(n, nw, [&](std::size_t i) { v[i] = per_node(grid.node(i)); });
    out.values = std::move(v);
  };

  switch (quantity) {
    case Quantity::OmegaA:
      fill_vectors([&](const KPoint& k) { return closed_form_sectors(model, k, band).omega_a; });
      break;
    case Quantity::OmegaN:
      fill_vectors([&](const KPoint& k) { return closed_form_sectors(model, k, band).omega_n; });
      break;
    case Quantity::WindingField:
      fill_vectors([&](const KPoint& k) { return winding_vector(evaluate_d(model, k), k); });
      break;
    case Quantity::GN:
    case Quantity::GA: {
      std::vector<Mat3> v(n);
      parallel_for(n, nw, [&](std::size_t i) {
        const auto s = closed_form_sectors(model, grid.node(i), band);
        v[i] = quantity == Quantity::GN ? s.g_n : s.g_a;
      });
      out.values = std::move(v);
      break;
    }
    case Quantity::BerryCurvatureXY: {
      std::vector<double> v(n);
      parallel_for(n, nw,
                   [&](std::size_t i) { v[i] = berry_curvature_xy(model, grid.node(i), band); });
      out.values = std::move(v);
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Discrete derivatives (cartesian grids)
// ---------------------------------------------------------------------------

namespace detail {

// second-order stencils: central inside, 3-point one-sided at the edges
inline double ddx(const std::vector<double>& f, int ix, int iy, int nx, int ny, double h) {
  auto at = [&](int jx) { return f[static_cast<std::size_t>(jx) * ny + iy]; };
  if (ix == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (ix == nx - 1) return (3.0 * at(nx - 1) - 4.0 * at(nx - 2) + at(nx - 3)) / (2.0 * h);
  return (at(ix + 1) - at(ix - 1)) / (2.0 * h);
}

inline double ddy(const std::vector<double>& f, int ix, int iy, int nx, int ny, double h) {
  auto at = [&](int jy) { return f[static_cast<std::size_t>(ix) * ny + jy]; };
  if (iy == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (iy == ny - 1) return (3.0 * at(ny - 1) - 4.0 * at(ny - 2) + at(ny - 3)) / (2.0 * h);
  return (at(iy + 1) - at(iy - 1)) / (2.0 * h);
}

inline void require_cartesian_vector(const SampledField& field, const char* op) {
  if (field.grid.kind != Grid2D::Kind::Cartesian)
    throw GridError(std::string(op) + " needs a cartesian grid");
  if (!field.is_vector()) throw GridError(std::string(op) + " needs a vector field");
  if (field.grid.nx < 3 || field.grid.ny < 3)
    throw GridError(std::string(op) + " needs at least 3 nodes per axis");
}

} // namespace detail

/** In-plane divergence d_x F_x + d_y F_y on the field's own grid. */
inline SampledField divergence(const SampledField& field) {
  detail::require_cartesian_vector(field, "divergence");
  const auto& g = field.grid;
  const auto& v = field.vectors();
  std::vector<double> fx(v.size()), fy(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    fx[i] = v[i].x();
    fy[i] = v[i].y();
  }
  std::vector<double> out(v.size());
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iy = 0; iy < g.ny; ++iy)
      out[static_cast<std::size_t>(ix) * g.ny + iy] =
          detail::ddx(fx, ix, iy, g.nx, g.ny, g.step_x()) +
          detail::ddy(fy, ix, iy, g.nx, g.ny, g.step_y());
  SampledField r;
  r.grid = g;
  r.name = field.name + "_div";
  r.values = std::move(out);
  return r;
}

/** Plane curl d_x F_y - d_y F_x on the field's own grid. */
inline SampledField curl_z(const SampledField& field) {
  detail::require_cartesian_vector(field, "curl_z");
  const auto& g = field.grid;
  const auto& v = field.vectors();
  std::vector<double> fx(v.size()), fy(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    fx[i] = v[i].x();
    fy[i] = v[i].y();
  }
  std::vector<double> out(v.size());
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iy = 0; iy < g.ny; ++iy)
      out[static_cast<std::size_t>(ix) * g.ny + iy] =
          detail::ddx(fy, ix, iy, g.nx, g.ny, g.step_x()) -
          detail::ddy(fx, ix, iy, g.nx, g.ny, g.step_y());
  SampledField r;
  r.grid = g;
  r.name = field.name + "_curl_z";
  r.values = std::move(out);
  return r;
}

// ---------------------------------------------------------------------------
// Hodge star and the planar duality check
// ---------------------------------------------------------------------------

/** 90-degree rotation *(v_x, v_y) = (-v_y, v_x). */
inline Vec2 hodge_star(const Vec2& v) { return Vec2(-v.y(), v.x()); }

struct DualCheckReport {
  double max_deviation = 0.0;
  KPoint argmax;
  std::size_t index = 0;
};

/**
 * Max-norm check of the pointwise duality omega_a = (1/2) * hodge(w) for a
 * planar model; any out-of-plane d component voids the premise.
 */
inline DualCheckReport dual_check(const Model& model, const Grid2D& grid) {
  DualCheckReport report;
  report.max_deviation = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const KPoint k = grid.node(i);
    const DValue dv = evaluate_d(model, k);
    if (std::abs(dv.d.z()) > 1e-12)
      throw PlanarityError("d_z = " + std::to_string(dv.d.z()) + " at " + format_k(k) +
                           "; duality check needs a planar model");
    const Vec3 oa = closed_form_sectors(model, k, Band::Plus).omega_a;
    const Vec3 w = winding_vector(dv, k);
    const Vec2 dual = 0.5 * hodge_star(Vec2(w.x(), w.y()));
    const double dev = (Vec2(oa.x(), oa.y()) - dual).norm();
    if (dev > report.max_deviation) {
      report.max_deviation = dev;
      report.argmax = k;
      report.index = i;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Contours
// ---------------------------------------------------------------------------

struct Circle {
  KPoint center;
  double radius = 1.0;
};

/** Closed when the last point repeats the first. */
struct Polyline {
  std::vector<KPoint> points;
};

struct Contour {
  std::variant<Circle, Polyline> shape;
  int samples = 256;
};

namespace detail {

inline double polyline_signed_area(const std::vector<KPoint>& pts) {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    a += pts[i].kx * pts[i + 1].ky - pts[i + 1].kx * pts[i].ky;
  return 0.5 * a;
}

} // namespace detail

inline void validate_contour(const Contour& contour) {
  if (contour.samples < 64) throw ContourError("contour needs samples >= 64");
  if (const auto* c = std::get_if<Circle>(&contour.shape)) {
    if (!(c->radius > 0)) throw ContourError("circle contour needs radius > 0");
    return;
  }
  const auto& pts = std::get<Polyline>(contour.shape).points;
  if (pts.size() < 4) throw ContourError("polyline contour needs at least 4 points (closed)");
  const double scale = std::max({1.0, std::abs(pts.front().kx), std::abs(pts.front().ky)});
  if (std::hypot(pts.front().kx - pts.back().kx, pts.front().ky - pts.back().ky) > 1e-12 * scale)
    throw ContourError("open contour: polyline must end at its starting point");
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (std::hypot(pts[i + 1].kx - pts[i].kx, pts[i + 1].ky - pts[i].ky) == 0.0)
      throw ContourError("polyline contour has a zero-length segment");
  if (!(detail::polyline_signed_area(pts) > 0))
    throw ContourError("contour must be positively oriented (counterclockwise)");
}

namespace detail {

struct ContourSample {
  KPoint p;
  Vec2 tangent; // unit, along the orientation
  Vec2 normal;  // unit, outward for a counterclockwise contour
  double dl = 0.0;
};

/**
 * N equally spaced quadrature nodes along the contour. Uniform weights on a
 * closed curve are the periodic composite trapezoid: spectrally accurate on
 * circles, second order on polylines (tangent kinks at corners).
 */
inline std::vector<ContourSample> sample_contour(const Contour& contour) {
  validate_contour(contour);
  const int n = contour.samples;
  std::vector<ContourSample> out(n);

  if (const auto* c = std::get_if<Circle>(&contour.shape)) {
    const double dl = 2.0 * pi * c->radius / n;
    for (int i = 0; i < n; ++i) {
      const double phi = 2.0 * pi * i / n;
      const double cs = std::cos(phi), sn = std::sin(phi);
      out[i].p = KPoint{c->center.kx + c->radius * cs, c->center.ky + c->radius * sn};
      out[i].tangent = Vec2(-sn, cs);
      out[i].normal = Vec2(cs, sn);
      out[i].dl = dl;
    }
    return out;
  }

  const auto& pts = std::get<Polyline>(contour.shape).points;
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    cum[i + 1] =
        cum[i] + std::hypot(pts[i + 1].kx - pts[i].kx, pts[i + 1].ky - pts[i].ky);
  const double total = cum.back();
  const double dl = total / n;
  std::size_t seg = 0;
  for (int i = 0; i < n; ++i) {
    const double s = total * i / n;
    while (seg + 2 < pts.size() && cum[seg + 1] <= s) ++seg;
    const double t = (s - cum[seg]) / (cum[seg + 1] - cum[seg]);
    const Vec2 a(pts[seg].kx, pts[seg].ky);
    const Vec2 b(pts[seg + 1].kx, pts[seg + 1].ky);
    const Vec2 p = a + t * (b - a);
    const Vec2 tang = (b - a).normalized();
    out[i].p = KPoint{p.x(), p.y()};
    out[i].tangent = tang;
    out[i].normal = Vec2(tang.y(), -tang.x());
    out[i].dl = dl;
  }
  return out;
}

} // namespace detail

enum class FluxQuantity { OmegaA, WindingField };

/**
 * For OmegaA the outward-normal flux, for WindingField the tangential
 * circulation, by the periodic composite trapezoid over the contour samples.
 */
inline double contour_flux(const Model& model, const Contour& contour, FluxQuantity quantity) {
  const auto samples = detail::sample_contour(contour);
  double acc = 0.0; // fixed index order keeps the reduction deterministic
  for (const auto& s : samples) {
    if (quantity == FluxQuantity::OmegaA) {
      const Vec3 oa = closed_form_sectors(model, s.p, Band::Plus).omega_a;
      acc += (oa.x() * s.normal.x() + oa.y() * s.normal.y()) * s.dl;
    } else {
      const Vec3 w = winding_vector(evaluate_d(model, s.p), s.p);
      acc += (w.x() * s.tangent.x() + w.y() * s.tangent.y()) * s.dl;
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Topological charges
// ---------------------------------------------------------------------------

struct TopologicalCharges {
  double Q = 0.0;          // omega_a_flux / (-pi)
  double C_w = 0.0;        // unwrapped winding of atan2(d_y, d_x) / 2 pi
  double berry_flux = 0.0; // disk integral of the conventional curvature
  double omega_a_flux = 0.0;
  long q_rounded = 0;
  long c_w_rounded = 0;
  double q_residual = 0.0;
  double c_w_residual = 0.0;
  std::optional<double> berry_flux_target; // delta-limit value when known
  Contour contour;
  std::string model;
};

namespace detail {

/** Winding of theta = atan2(d_y, d_x) along the contour, in turns. */
inline double unwrapped_winding(const Model& model, const Contour& contour) {
  const auto samples = sample_contour(contour);
  auto theta_at = [&](const KPoint& k) {
    const DValue dv = evaluate_d(model, k);
    if (std::hypot(dv.d.x(), dv.d.y()) < node_guard)
      throw NodeProximityError("in-plane |d| below node guard at " + format_k(k) +
                               "; theta undefined on contour");
    return std::atan2(dv.d.y(), dv.d.x());
  };
  double total = 0.0;
  double prev = theta_at(samples[0].p);
  for (std::size_t i = 1; i <= samples.size(); ++i) {
    const double cur = theta_at(samples[i % samples.size()].p);
    const double jump = std::remainder(cur - prev, 2.0 * pi);
    // nearest-branch unwrapping is silently wrong once steps approach a half
    // turn, so refuse anything above a quarter turn
    if (std::abs(jump) > 0.5 * pi)
      throw UndersampledContourError("theta jump " + std::to_string(jump) +
                                     " exceeds pi/2 between adjacent contour samples; "
                                     "increase contour samples");
    total += jump;
    prev = cur;
  }
  return total / (2.0 * pi);
}

inline bool point_in_polygon(const std::vector<KPoint>& pts, double x, double y) {
  bool inside = false;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double x1 = pts[i].kx, y1 = pts[i].ky;
    const double x2 = pts[i + 1].kx, y2 = pts[i + 1].ky;
    if ((y1 > y) != (y2 > y) && x < x1 + (y - y1) / (y2 - y1) * (x2 - x1)) inside = !inside;
  }
  return inside;
}

/** Distance from `origin` to the polygon boundary along direction (cos, sin). */
inline double ray_exit_distance(const std::vector<KPoint>& pts, const Vec2& origin, double cphi,
                                double sphi) {
  double best = -1.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a(pts[i].kx, pts[i].ky);
    const Vec2 b(pts[i + 1].kx, pts[i + 1].ky);
    const Vec2 e = b - a;
    const double det = cphi * (-e.y()) - sphi * (-e.x());
    if (std::abs(det) < 1e-300) continue;
    const Vec2 rhs = a - origin;
    const double s = (rhs.x() * (-e.y()) - rhs.y() * (-e.x())) / det;
    const double u = (cphi * rhs.y() - sphi * rhs.x()) / det;
    if (s > 1e-12 && u >= -1e-12 && u <= 1.0 + 1e-12)
      best = best < 0 ? s : std::min(best, s);
  }
  if (best < 0) throw ContourError("ray cast found no polygon boundary; contour is degenerate");
  return best;
}

struct DiskGeometry {
  Vec2 center;                           // integration origin
  std::function<double(double)> rho_max; // boundary distance per angle
};

/**
 * Polar description of the enclosed disk. Integration is centred on the node
 * (the origin) whenever the contour encloses it, so a log-radial ladder can
 * resolve integrand peaks concentrated there; otherwise on the contour's own
 * center. Polylines are assumed star-shaped about that point.
 */
inline DiskGeometry disk_geometry(const Contour& contour) {
  DiskGeometry geo;
  if (const auto* c = std::get_if<Circle>(&contour.shape)) {
    const Vec2 cc(c->center.kx, c->center.ky);
    const double R = c->radius;
    if (cc.norm() < R - 1e-12) {
      geo.center = Vec2::Zero();
      geo.rho_max = [cc, R](double phi) {
        const double proj = cc.x() * std::cos(phi) + cc.y() * std::sin(phi);
        return proj + std::sqrt(proj * proj + R * R - cc.squaredNorm());
      };
    } else {
      geo.center = cc;
      geo.rho_max = [R](double) { return R; };
    }
    return geo;
  }
  const auto& pts = std::get<Polyline>(contour.shape).points;
  Vec2 origin = Vec2::Zero();
  if (!point_in_polygon(pts, 0.0, 0.0)) {
    Vec2 centroid = Vec2::Zero();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) centroid += Vec2(pts[i].kx, pts[i].ky);
    origin = centroid / static_cast<double>(pts.size() - 1);
  }
  geo.center = origin;
  geo.rho_max = [pts, origin](double phi) {
    return ray_exit_distance(pts, origin, std::cos(phi), std::sin(phi));
  };
  return geo;
}

/**
 * Disk integral of the conventional curvature of band `band` over the region
 * enclosed by the contour: angular periodic trapezoid over nphi rays, each a
 * log-radial trapezoid in t = ln rho (area element rho^2 dt dphi). The inner
 * cutoff starts at 1e-8 of the ray length and is doubled while |d| sits under
 * the node guard; the skipped core is exactly where the curvature is either
 * zero (planar models) or bounded, so its area contribution is negligible.
 */
inline double berry_disk_integral(const Model& model, const Contour& contour, Band band,
                                  int nrho = 512, int nphi = 256, unsigned workers = 0) {
  const DiskGeometry geo = disk_geometry(contour);
  std::vector<double> line(nphi, 0.0);
  parallel_for(static_cast<std::size_t>(nphi), resolve_workers(workers), [&](std::size_t l) {
    const double phi = 2.0 * pi * static_cast<double>(l) / nphi;
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const double rho_hi = geo.rho_max(phi);
    double rho_lo = 1e-8 * rho_hi;
    for (int guard = 0; guard < 60; ++guard) {
      const KPoint k{geo.center.x() + rho_lo * cphi, geo.center.y() + rho_lo * sphi};
      if (evaluate_d(model, k).norm() >= 10.0 * node_guard) break;
      rho_lo *= 2.0;
    }
    const double t_lo = std::log(rho_lo), t_hi = std::log(rho_hi);
    const double dt = (t_hi - t_lo) / (nrho - 1);
    double acc = 0.0;
    for (int j = 0; j < nrho; ++j) {
      const double rho = std::exp(t_lo + j * dt);
      const KPoint k{geo.center.x() + rho * cphi, geo.center.y() + rho * sphi};
      const double f = berry_curvature_xy(model, k, band) * rho * rho;
      acc += (j == 0 || j == nrho - 1) ? 0.5 * f : f;
    }
    line[l] = acc * dt;
  });
  double total = 0.0; // fixed order over rays: bitwise deterministic
  for (double v : line) total += v;
  return total * (2.0 * pi / nphi);
}

} // namespace detail

/**
 * The three equivalent invariants of the node enclosed by the contour: the
 * normalized anomalous-curvature flux Q, the phase winding C_w, and the disk
 * integral of the band-`band` conventional curvature with its delta-limit
 * target when the model pins one.
 */
inline TopologicalCharges topological_charges(const Model& model, const Contour& contour,
                                              Band band = Band::Plus, unsigned workers = 0) {
  validate_contour(contour);
  TopologicalCharges out;
  out.contour = contour;
  out.model = describe_model(model);
  out.omega_a_flux = contour_flux(model, contour, FluxQuantity::OmegaA);
  out.Q = out.omega_a_flux / (-pi);
  out.C_w = detail::unwrapped_winding(model, contour);
  out.berry_flux = detail::berry_disk_integral(model, contour, band, 512, 256, workers);
  out.q_rounded = std::lround(out.Q);
  out.c_w_rounded = std::lround(out.C_w);
  out.q_residual = std::abs(out.Q - static_cast<double>(out.q_rounded));
  out.c_w_residual = std::abs(out.C_w - static_cast<double>(out.c_w_rounded));
  if (const auto* md = std::get_if<MassiveDirac>(&model))
    out.berry_flux_target =
        md->m == 0.0 ? 0.0 : -band_sign(band) * pi * (md->m > 0 ? 1.0 : -1.0);
  else if (std::holds_alternative<PlanarWinding>(model))
    out.berry_flux_target = 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/**
 * One row per grid node in index order, full double precision; leading
 * comment lines are prefixed with '#'. Columns: kx, ky, then per-component
 * field columns (_x.._z for vectors, _xx.._zz row-major for tensors).
 */
inline void write_field_csv(std::ostream& os, const SampledField& field,
                            const std::vector<std::string>& comments = {}) {
  static const char* axis[3] = {"x", "y", "z"};
  for (const auto& c : comments) os << "# " << c << "\n";
  os << "kx,ky";
  if (field.is_scalar()) os << "," << field.name;
  if (field.is_vector())
    for (auto* a : axis) os << "," << field.name << "_" << a;
  if (field.is_tensor())
    for (auto* a : axis)
      for (auto* b : axis) os << "," << field.name << "_" << a << b;
  os << "\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < field.grid.size(); ++i) {
    const KPoint k = field.grid.node(i);
    os << k.kx << "," << k.ky;
    if (field.is_scalar()) os << "," << field.scalars()[i];
    if (field.is_vector()) {
      const Vec3& v = field.vectors()[i];
      for (int a = 0; a < 3; ++a) os << "," << v(a);
    }
    if (field.is_tensor()) {
      const Mat3& t = field.tensors()[i];
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) os << "," << t(a, b);
    }
    os << "\n";
  }
}

inline nlohmann::json contour_to_json(const Contour& contour) {
  nlohmann::json j;
  j["samples"] = contour.samples;
  if (const auto* c = std::get_if<Circle>(&contour.shape)) {
    j["shape"] = "circle";
    j["center"] = {c->center.kx, c->center.ky};
    j["radius"] = c->radius;
  } else {
    const auto& pts = std::get<Polyline>(contour.shape).points;
    j["shape"] = "polyline";
    auto& arr = j["points"] = nlohmann::json::array();
    for (const auto& p : pts) arr.push_back({p.kx, p.ky});
  }
  return j;
}

inline nlohmann::json charges_to_json(const TopologicalCharges& ch) {
  nlohmann::json j;
  j["Q"] = ch.Q;
  j["C_w"] = ch.C_w;
  j["berry_flux"] = ch.berry_flux;
  j["omega_a_flux"] = ch.omega_a_flux;
  j["rounded"] = {{"Q", ch.q_rounded}, {"C_w", ch.c_w_rounded}};
  j["residuals"] = {{"Q", ch.q_residual}, {"C_w", ch.c_w_residual}};
  j["berry_flux_target"] =
      ch.berry_flux_target ? nlohmann::json(*ch.berry_flux_target) : nlohmann::json(nullptr);
  j["contour"] = contour_to_json(ch.contour);
  j["model"] = ch.model;
  return j;
}

} // namespace zqg
