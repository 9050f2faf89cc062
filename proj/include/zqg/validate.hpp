#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "zqg/config.hpp"
#include "zqg/fields.hpp"
#include "zqg/response.hpp"

namespace zqg {

/**
 * Fault injection for the validation suite. OmegaASignFlip negates the
 * anomalous-curvature values right where the checks consume them, simulating
 * a sign defect in that production path; the checks built on the anomalous
 * curvature (hodge_duality, gauss_index) must then fail, proving the suite
 * can actually catch such a defect rather than passing vacuously.
 */
enum class MutationMode { None, OmegaASignFlip };

inline std::string mutation_name(MutationMode mode) {
  return mode == MutationMode::OmegaASignFlip ? "omega-a-sign-flip" : "none";
}

inline MutationMode parse_mutation_mode(const std::string& name) {
  if (name == "none") return MutationMode::None;
  if (name == "omega-a-sign-flip") return MutationMode::OmegaASignFlip;
  throw ConfigError("unknown mutation '" + name + "'; valid: none, omega-a-sign-flip");
}

struct CheckResult {
  std::string name;
  bool passed = false;
  nlohmann::json detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed = true;
  MutationMode mutation = MutationMode::None;
};

namespace detail {

inline std::vector<KPoint> validation_kpoints(const Model& model, std::size_t count, double box,
                                              double floor, unsigned seed) {
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

inline double sector_max_abs(const SectorDecomposition& s) {
  return std::max({s.g_n.cwiseAbs().maxCoeff(), s.g_a.cwiseAbs().maxCoeff(),
                   s.omega_n.cwiseAbs().maxCoeff(), s.omega_a.cwiseAbs().maxCoeff()});
}

inline double sector_max_diff(const SectorDecomposition& a, const SectorDecomposition& b) {
  return std::max({(a.g_n - b.g_n).cwiseAbs().maxCoeff(), (a.g_a - b.g_a).cwiseAbs().maxCoeff(),
                   (a.omega_n - b.omega_n).cwiseAbs().maxCoeff(),
                   (a.omega_a - b.omega_a).cwiseAbs().maxCoeff()});
}

inline bool doubles_bitwise_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

// Gauge rotations of a band eigenvector must leave the tensor untouched.
inline CheckResult check_gauge_invariance(unsigned workers) {
  (void)workers;
  const double tol = 1e-12;
  double worst = 0.0;
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * pi);
  const std::vector<Model> models = {MassiveDirac{1.0}, make_sheared_dirac(0.6)};
  std::size_t points = 0;
  for (const Model& model : models) {
    for (const KPoint& k : validation_kpoints(model, 50, 2.0, 0.3, 77)) {
      const DValue dv = evaluate_d(model, k);
      EigenSystem es = eigensystem(model, k);
      const CMat3 base = zeeman_qgt(pair_elements_from(dv, es, Band::Plus)).T;
      const double phi_plus = ang(rng);
      const double phi_minus = ang(rng);
      es.u_plus *= cplx(std::cos(phi_plus), std::sin(phi_plus));
      es.u_minus *= cplx(std::cos(phi_minus), std::sin(phi_minus));
      const CMat3 rotated = zeeman_qgt(pair_elements_from(dv, es, Band::Plus)).T;
      const double scale = std::max(1.0, base.cwiseAbs().maxCoeff());
      worst = std::max(worst, (base - rotated).cwiseAbs().maxCoeff() / scale);
      ++points;
    }
  }
  return {"gauge_invariance", worst <= tol,
          {{"max_rel_deviation", worst}, {"tolerance", tol}, {"points", points}}};
}

// Closed-form sector expressions against the definitional eigenvector route.
inline CheckResult check_closed_form_definitional(unsigned workers) {
  (void)workers;
  const double tol = 1e-8;
  double worst = 0.0;
  const std::vector<Model> models = {MassiveDirac{1.0}, MassiveDirac{-0.7},
                                     make_sheared_dirac(0.6), PlanarWinding{2}};
  std::size_t points = 0;
  for (const Model& model : models) {
    for (const KPoint& k : validation_kpoints(model, 100, 2.0, 0.3, 99)) {
      for (Band n : {Band::Plus, Band::Minus}) {
        const SectorDecomposition definitional = decompose(zeeman_qgt(band_pair_elements(model, k, n)));
        const SectorDecomposition closed = closed_form_sectors(model, k, n);
        const double scale = std::max(1.0, sector_max_abs(definitional));
        worst = std::max(worst, sector_max_diff(definitional, closed) / scale);
        ++points;
      }
    }
  }
  return {"closed_form_definitional", worst <= tol,
          {{"max_rel_deviation", worst}, {"tolerance", tol}, {"points", points}}};
}

// In-plane anomalous curvature equals half the rotated winding field for a
// planar model, node for node. Consumes sampled omega_a, so the sign
// mutation lands here.
inline CheckResult check_hodge_duality(double mutation_sign, unsigned workers) {
  (void)workers;
  const double tol = 1e-10;
  const Model model = PlanarWinding{2};
  const Grid2D grid = Grid2D::polar(0.5, 2.0, 16, 16);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const KPoint k = grid.node(i);
    const Vec3 oa = mutation_sign * closed_form_sectors(model, k, Band::Plus).omega_a;
    const Vec3 w = winding_vector(evaluate_d(model, k), k);
    const Vec2 dual = 0.5 * hodge_star(Vec2(w.x(), w.y()));
    worst = std::max(worst, (Vec2(oa.x(), oa.y()) - dual).norm());
  }
  return {"hodge_duality", worst <= tol,
          {{"max_deviation", worst}, {"tolerance", tol}, {"model", model_name(model)}}};
}

// Band-odd sectors cancel and band-even sectors coincide across the pair.
inline CheckResult check_band_sum_rules(unsigned workers) {
  (void)workers;
  const double tol = 1e-12;
  double worst = 0.0;
  const std::vector<Model> models = {MassiveDirac{1.0}, make_sheared_dirac(0.6)};
  std::size_t points = 0;
  for (const Model& model : models) {
    for (const KPoint& k : validation_kpoints(model, 200, 3.0, 0.2, 4321)) {
      const SectorDecomposition plus = closed_form_sectors(model, k, Band::Plus);
      const SectorDecomposition minus = closed_form_sectors(model, k, Band::Minus);
      const double scale = std::max(1.0, std::max(sector_max_abs(plus), sector_max_abs(minus)));
      const double dev =
          std::max({(plus.omega_n + minus.omega_n).cwiseAbs().maxCoeff(),
                    (plus.g_a + minus.g_a).cwiseAbs().maxCoeff(),
                    (plus.omega_a - minus.omega_a).cwiseAbs().maxCoeff(),
                    (plus.g_n - minus.g_n).cwiseAbs().maxCoeff()});
      worst = std::max(worst, dev / scale);
      ++points;
    }
  }
  return {"band_sum_rules", worst <= tol,
          {{"max_rel_deviation", worst}, {"tolerance", tol}, {"points", points}}};
}

// Dropping one sector zeroes exactly its two response channels and leaves
// the other six channels bitwise identical to the full run.
inline CheckResult check_sector_ablation(unsigned workers) {
  const Model model = make_sheared_dirac(0.6);
  IntegrationDomain domain;
  domain.nr = 96;
  domain.ntheta = 64;
  const std::vector<double> omegas = {3e-4, 7e-4};
  const ResponseSpectrum base = run_response(model, {}, domain, omegas, workers);

  const std::array<std::pair<Sector, std::array<Channel, 2>>, 4> expected_dead = {{
      {Sector::OmegaA, {Channel::ImSigmaMinus, Channel::ReAlphaMinus}},
      {Sector::GN, {Channel::ImSigmaPlus, Channel::ReAlphaPlus}},
      {Sector::OmegaN, {Channel::ReSigmaMinus, Channel::ImAlphaMinus}},
      {Sector::GA, {Channel::ReSigmaPlus, Channel::ImAlphaPlus}},
  }};

  bool ok = true;
  nlohmann::json per_sector;
  for (const auto& [sector, dead] : expected_dead) {
    const ResponseSpectrum ablated =
        run_response(model, {}, domain, omegas, workers, SectorMask::drop(sector));
    bool zeroed = true;
    bool untouched = true;
    for (Channel c : all_channels) {
      const bool should_die = c == dead[0] || c == dead[1];
      for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double v = channel_value(ablated, c, i);
        if (should_die)
          zeroed = zeroed && v == 0.0;
        else
          untouched = untouched && doubles_bitwise_equal(v, channel_value(base, c, i));
      }
    }
    per_sector[sector_name(sector)] = {{"dropped_channels_zero", zeroed},
                                       {"other_channels_bitwise", untouched}};
    ok = ok && zeroed && untouched;
  }
  return {"sector_ablation", ok, per_sector};
}

// The node charge of the gapless cone must not depend on the loop radius.
inline CheckResult check_radius_independence(unsigned workers) {
  const Model model = MassiveDirac{0.0};
  const double tol = 1e-6;
  const std::vector<double> radii = {0.5, 1.0, 2.0, 4.0};
  std::vector<double> charges;
  for (double r : radii) {
    const Contour loop{Circle{KPoint{0.0, 0.0}, r}, 1024};
    charges.push_back(topological_charges(model, loop, Band::Plus, workers).Q);
  }
  const auto [lo, hi] = std::minmax_element(charges.begin(), charges.end());
  const double spread = *hi - *lo;
  return {"radius_independence", spread <= tol,
          {{"radii", radii}, {"charges", charges}, {"spread", spread}, {"tolerance", tol}}};
}

// Near-critical mass: the loop integral of the anomalous curvature still
// resolves the unit node charge. Consumes the flux-derived Q, so the sign
// mutation lands here.
inline CheckResult check_gauss_index(double mutation_sign, unsigned workers) {
  const double tol = 1e-3;
  const Model model = MassiveDirac{1e-4};
  const Contour loop{Circle{KPoint{0.0, 0.0}, 1.0}, 1024};
  const TopologicalCharges charges = topological_charges(model, loop, Band::Plus, workers);
  const double q = mutation_sign * charges.Q;
  const bool ok = std::abs(q - 1.0) <= tol && charges.c_w_rounded == 1;
  return {"gauss_index", ok,
          {{"q", q},
           {"expected", 1.0},
           {"deviation", std::abs(q - 1.0)},
           {"tolerance", tol},
           {"c_w_rounded", charges.c_w_rounded}}};
}

// The discrete divergence of the sampled anomalous curvature converges to
// its closed-form value at second order in the grid spacing.
inline CheckResult check_convergence_order(unsigned workers) {
  const Model model = MassiveDirac{1.0};
  auto center_error = [&](int nodes) {
    const Grid2D grid = Grid2D::cartesian(-0.5, 0.5, -0.5, 0.5, nodes, nodes);
    const auto div = divergence(sample_field(model, grid, Quantity::OmegaA, Band::Plus, workers));
    const int mid = (nodes - 1) / 2;
    const std::size_t at = static_cast<std::size_t>(mid) * nodes + mid; // k = (0, 0)
    return std::abs(div.scalars()[at] - (-1.0));
  };
  const double e1 = center_error(41);
  const double e2 = center_error(81);
  const double e3 = center_error(161);
  const double order_coarse = std::log2(e1 / e2);
  const double order_fine = std::log2(e2 / e3);
  const bool ok = order_fine >= 1.8 && order_fine <= 2.2;
  return {"convergence_order", ok,
          {{"errors", {e1, e2, e3}},
           {"orders", {order_coarse, order_fine}},
           {"measured_order", order_fine},
           {"window", {1.8, 2.2}}}};
}

// Both response tensors vanish identically at zero frequency.
inline CheckResult check_omega_zero(unsigned workers) {
  const Model model = make_sheared_dirac(0.6);
  IntegrationDomain domain;
  domain.nr = 96;
  domain.ntheta = 64;
  const ResponseSpectrum s = run_response(model, {}, domain, {0.0}, workers);
  double max_abs = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      max_abs = std::max({max_abs, std::abs(s.sigma[0](a, b)), std::abs(s.alpha[0](a, b))});
  for (Channel c : all_channels) max_abs = std::max(max_abs, std::abs(channel_value(s, c, 0)));
  return {"omega_zero", max_abs == 0.0, {{"max_abs", max_abs}}};
}

// Identical payload bytes regardless of the worker count.
inline CheckResult check_determinism(unsigned /*workers*/) {
  const Model model = MassiveDirac{1.0};
  IntegrationDomain domain;
  domain.nr = 64;
  domain.ntheta = 32;
  const std::vector<double> omegas = {1e-4, 5e-4};
  const std::string a = spectrum_to_json(run_response(model, {}, domain, omegas, 1)).dump();
  const std::string b = spectrum_to_json(run_response(model, {}, domain, omegas, 4)).dump();
  const bool response_identical = a == b;

  const Grid2D grid = Grid2D::cartesian(-1.5, 1.5, -1.5, 1.5, 24, 24);
  const auto f1 = sample_field(model, grid, Quantity::OmegaA, Band::Plus, 1);
  const auto f4 = sample_field(model, grid, Quantity::OmegaA, Band::Plus, 4);
  bool field_identical = f1.vectors().size() == f4.vectors().size();
  for (std::size_t i = 0; field_identical && i < f1.vectors().size(); ++i)
    field_identical = std::memcmp(f1.vectors()[i].data(), f4.vectors()[i].data(),
                                  3 * sizeof(double)) == 0;
  return {"determinism", response_identical && field_identical,
          {{"response_json_identical", response_identical},
           {"field_bitwise_identical", field_identical}}};
}

} // namespace detail

inline ValidationReport run_validation(MutationMode mode = MutationMode::None,
                                       unsigned workers = 0) {
  const double sign = mode == MutationMode::OmegaASignFlip ? -1.0 : 1.0;
  ValidationReport report;
  report.mutation = mode;
  report.checks = {
      detail::check_gauge_invariance(workers),
      detail::check_closed_form_definitional(workers),
      detail::check_hodge_duality(sign, workers),
      detail::check_band_sum_rules(workers),
      detail::check_sector_ablation(workers),
      detail::check_radius_independence(workers),
      detail::check_gauss_index(sign, workers),
      detail::check_convergence_order(workers),
      detail::check_omega_zero(workers),
      detail::check_determinism(workers),
  };
  for (const CheckResult& c : report.checks) report.all_passed = report.all_passed && c.passed;
  return report;
}

inline nlohmann::json report_to_json(const ValidationReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& c : report.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"version", zqg_version},
          {"mutation", mutation_name(report.mutation)},
          {"all_passed", report.all_passed},
          {"checks", checks}};
}

} // namespace zqg
