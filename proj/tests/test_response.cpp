#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <sstream>

#include "testutil.hpp"
#include "zqg/response.hpp"

using namespace zqg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Closed-form values of the weighted sector integrals for the massive Dirac
// model at mu = 0, T = 0 with radial cutoff L (lower band filled, measure
// d^2k/(2pi)^2), obtained by hand from the sector fields:
//   I1 = 1/|m| - (L^2+m^2)^{-1/2},  I3 = 1/|m|^3 - (L^2+m^2)^{-3/2}
//   <OmegaA>_z                = (m/4pi) I1
//   <gA>_xx (1/eps^2 weight)  = (1/32pi) (I1 + (m^2/3) I3)
//   alpha OmegaA_z coefficient = (m/96pi) I3
//   alpha gA_xx coefficient    = -(1/64pi) (I1 + (m^2/3) I3)
struct DiracOracle {
  double c1z, c4xx, a3z, a2xx;
};

DiracOracle dirac_oracle(double m, double cutoff) {
  const double am = std::abs(m);
  const double dsq = cutoff * cutoff + m * m;
  const double i1 = 1.0 / am - 1.0 / std::sqrt(dsq);
  const double i3 = 1.0 / (am * am * am) - 1.0 / (dsq * std::sqrt(dsq));
  const double bracket = i1 + m * m / 3.0 * i3;
  return {m / (4.0 * pi) * i1, bracket / (32.0 * pi), m / (96.0 * pi) * i3,
          -bracket / (64.0 * pi)};
}

// Independent evaluation of the same eight weighted integrals on the same
// quadrature grid, but going through the definitional route (eigensystem ->
// Zeeman tensor -> decomposition) instead of the closed-form sector fields.
SectorCoefficients definitional_integrals(const Model& model, const OccupationSpec& occ,
                                          const IntegrationDomain& domain, double cutoff) {
  SectorCoefficients acc;
  acc.cutoff = cutoff;
  const double t_lo = std::log(1e-8), t_hi = std::log(cutoff);
  const double dt = (t_hi - t_lo) / (domain.nr - 1);
  const double dtheta = 2.0 * pi / domain.ntheta;
  for (int j = 0; j < domain.ntheta; ++j) {
    const double theta = dtheta * j;
    for (int i = 0; i < domain.nr; ++i) {
      const double r = std::exp(t_lo + i * dt);
      const KPoint k{r * std::cos(theta), r * std::sin(theta)};
      const double trap = (i == 0 || i == domain.nr - 1) ? 0.5 : 1.0;
      const double w = trap * r * r * dt * dtheta / (4.0 * pi * pi);
      for (Band n : {Band::Plus, Band::Minus}) {
        const BandPairElements el = band_pair_elements(model, k, n);
        const double f = occ.occupation(0.5 * el.eps_nm);
        if (f == 0.0) continue;
        const SectorDecomposition s = decompose(zeeman_qgt(el));
        const double eps = el.eps_nm;
        acc.sigma_omega_a += w * f / eps * s.omega_a;
        acc.sigma_g_n += w * f / eps * s.g_n;
        acc.sigma_omega_n += w * f / (eps * eps) * s.omega_n;
        acc.sigma_g_a += w * f / (eps * eps) * s.g_a;
        acc.alpha_omega_n += 0.5 * w * f / (eps * eps) * (-s.omega_n);
        acc.alpha_g_a += 0.5 * w * f / (eps * eps) * (-s.g_a);
        acc.alpha_omega_a += 0.5 * w * f / (eps * eps * eps) * s.omega_a;
        acc.alpha_g_n += 0.5 * w * f / (eps * eps * eps) * s.g_n;
      }
    }
  }
  return acc;
}

const Model& sheared() {
  static const Model m = make_sheared_dirac(0.6);
  return m;
}

IntegrationDomain light_domain() {
  IntegrationDomain d;
  d.nr = 96;
  d.ntheta = 64;
  return d;
}

std::vector<double> fit_window() {
  return {1e-4, 1.6e-4, 2.5e-4, 4e-4, 6.3e-4, 1e-3, 1.2e-3};
}

bool bits_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

} // namespace

TEST_CASE("occupation factor implements the Fermi step and smooth limit") {
  const OccupationSpec cold{0.25, 0.0};
  CHECK(cold.occupation(0.2) == 1.0);
  CHECK(cold.occupation(0.3) == 0.0);
  CHECK(cold.occupation(0.25) == 0.5);

  const OccupationSpec warm{0.0, 0.5};
  CHECK_THAT(warm.occupation(0.0), WithinAbs(0.5, 1e-15));
  CHECK_THAT(warm.occupation(0.5 * std::log(3.0)), WithinRel(0.25, 1e-12));
  CHECK_THAT(warm.occupation(-40.0), WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS((OccupationSpec{0.0, -1.0}.occupation(0.0)), ConfigError);
}

TEST_CASE("cutoff resolution tracks the mass scale") {
  IntegrationDomain d;
  CHECK(resolve_cutoff(MassiveDirac{3.0}, d) == 60.0);
  CHECK(resolve_cutoff(MassiveDirac{-3.0}, d) == 60.0);
  CHECK(resolve_cutoff(MassiveDirac{0.5}, d) == 20.0);
  CHECK(resolve_cutoff(PlanarWinding{2}, d) == 20.0);
  CHECK(resolve_cutoff(sheared(), d) == 20.0);
  d.cutoff = 7.5;
  CHECK(resolve_cutoff(MassiveDirac{3.0}, d) == 7.5);
  d.cutoff = -1.0;
  CHECK_THROWS_AS(resolve_cutoff(MassiveDirac{1.0}, d), ConfigError);
}

TEST_CASE("plus/minus decomposition is exact arithmetic on the xy block") {
  CMat3 t = CMat3::Zero();
  const cplx c(0.7, -1.3);

  t(0, 1) = c;
  t(1, 0) = -c;
  auto [m1, p1] = decompose_pm(t);
  CHECK(m1 == c);
  CHECK(p1 == cplx(0.0, 0.0));

  t(1, 0) = c;
  auto [m2, p2] = decompose_pm(t);
  CHECK(m2 == cplx(0.0, 0.0));
  CHECK(p2 == c);

  t(0, 1) = cplx(3.0, 1.0);
  t(1, 0) = cplx(1.0, -1.0);
  auto [m3, p3] = decompose_pm(t);
  CHECK(m3 == cplx(1.0, 1.0));
  CHECK(p3 == cplx(2.0, 0.0));
}

TEST_CASE("weighted sector integrals match the hand-integrated Dirac values") {
  IntegrationDomain d; // defaults: nr=400, ntheta=256, log-radial
  for (double m : {1.0, 2.0, -0.7}) {
    INFO("mass " << m);
    const SectorCoefficients ws = weighted_sector_integrals(MassiveDirac{m}, {}, d);
    const DiracOracle ref = dirac_oracle(m, ws.cutoff);
    CHECK_THAT(ws.sigma_omega_a.z(), WithinRel(ref.c1z, 5e-4));
    CHECK_THAT(ws.sigma_g_a(0, 0), WithinRel(ref.c4xx, 5e-4));
    CHECK_THAT(ws.sigma_g_a(1, 1), WithinRel(ref.c4xx, 5e-4)); // isotropy: yy == xx
    CHECK_THAT(ws.alpha_omega_a.z(), WithinRel(ref.a3z, 5e-4));
    CHECK_THAT(ws.alpha_g_a(0, 0), WithinRel(ref.a2xx, 5e-4));
    CHECK(ws.convergence_delta < d.convergence_rel);

    // rotational symmetry and the in-plane spin-mixing structure of this
    // model leave no other channel feeds: these vanish up to quadrature noise
    CHECK(ws.sigma_omega_n.z() == 0.0); // curl of the unit field is exactly planar
    CHECK(ws.alpha_omega_n.z() == 0.0);
    CHECK(std::abs(ws.sigma_omega_a.x()) < 1e-12);
    CHECK(std::abs(ws.sigma_omega_a.y()) < 1e-12);
    CHECK(ws.sigma_g_n.block<2, 2>(0, 0).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ws.alpha_g_n.block<2, 2>(0, 0).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(ws.sigma_g_a(0, 1)) < 1e-12);
  }
}

TEST_CASE("high-resolution quadrature converges to the closed forms") {
  IntegrationDomain d;
  d.nr = 4000;
  d.ntheta = 64; // the integrands are low-order in theta; radial error dominates
  const SectorCoefficients ws = weighted_sector_integrals(MassiveDirac{1.0}, {}, d);
  const DiracOracle ref = dirac_oracle(1.0, ws.cutoff);
  CHECK_THAT(ws.sigma_omega_a.z(), WithinRel(ref.c1z, 1e-5));
  CHECK_THAT(ws.sigma_g_a(0, 0), WithinRel(ref.c4xx, 1e-5));
  CHECK_THAT(ws.alpha_omega_a.z(), WithinRel(ref.a3z, 1e-5));
  CHECK_THAT(ws.alpha_g_a(0, 0), WithinRel(ref.a2xx, 1e-5));
}

TEST_CASE("coefficient pipeline agrees with the definitional sector route") {
  IntegrationDomain d;
  d.nr = 200;
  d.ntheta = 128;
  d.cutoff = 20.0;
  for (const Model& model : {Model{MassiveDirac{1.0}}, sheared()}) {
    INFO(describe_model(model));
    const SectorCoefficients ws = weighted_sector_integrals(model, {}, d);
    const SectorCoefficients ref = definitional_integrals(model, {}, d, d.cutoff);
    const double scale = std::max(ws.max_norm(), ref.max_norm());
    REQUIRE(scale > 1e-6);
    CHECK((ws.sigma_omega_a - ref.sigma_omega_a).cwiseAbs().maxCoeff() < 1e-8 * scale);
    CHECK((ws.sigma_g_n - ref.sigma_g_n).cwiseAbs().maxCoeff() < 1e-8 * scale);
    CHECK((ws.sigma_omega_n - ref.sigma_omega_n).cwiseAbs().maxCoeff() < 1e-8 * scale);
    CHECK((ws.sigma_g_a - ref.sigma_g_a).cwiseAbs().maxCoeff() < 1e-8 * scale);
    CHECK((ws.alpha_omega_n - ref.alpha_omega_n).cwiseAbs().maxCoeff() < 1e-8 * scale);
    CHECK((ws.alpha_g_a - ref.alpha_g_a).cwiseAbs().maxCoeff() < 1e-8 * scale);
    CHECK((ws.alpha_omega_a - ref.alpha_omega_a).cwiseAbs().maxCoeff() < 1e-8 * scale);
    CHECK((ws.alpha_g_n - ref.alpha_g_n).cwiseAbs().maxCoeff() < 1e-8 * scale);
  }
}

TEST_CASE("zero frequency yields exactly vanishing tensors") {
  const SectorCoefficients ws = weighted_sector_integrals(sheared(), {}, light_domain());
  CHECK(sigma_tensor(ws, 0.0).norm() == 0.0);
  CHECK(alpha_tensor(ws, 0.0).norm() == 0.0);
  const ResponseSpectrum s = run_response(sheared(), {}, light_domain(), {0.0});
  CHECK(s.sigma[0].norm() == 0.0);
  CHECK(s.alpha[0].norm() == 0.0);
  CHECK(std::abs(s.sigma_minus[0]) == 0.0);
  CHECK(std::abs(s.alpha_plus[0]) == 0.0);
  CHECK_THROWS_AS(run_response(sheared(), {}, light_domain(), {-1e-3}), ConfigError);
}

TEST_CASE("linear-in-omega channel reproduces its weighted integral") {
  IntegrationDomain d;
  d.nr = 200;
  d.ntheta = 128;
  d.cutoff = 20.0;
  const double omega = 1e-3;

  // current response: the omega-linear antisymmetric channel is fed by the
  // 1/eps-weighted ambiguity-curvature integral alone
  const ResponseSpectrum s = run_response(MassiveDirac{1.0}, {}, d, {omega});
  const SectorCoefficients ref = definitional_integrals(MassiveDirac{1.0}, {}, d, d.cutoff);
  CHECK_THAT(s.sigma_minus[0].imag() / omega, WithinRel(ref.sigma_omega_a.z(), 1e-8));

  // magnetization response: the omega-linear antisymmetric channel is fed by
  // the swapped-pair normal-curvature integral alone (alive on the sheared
  // model; it vanishes identically for the isotropic one)
  const ResponseSpectrum t = run_response(sheared(), {}, d, {omega});
  const SectorCoefficients sref = definitional_integrals(sheared(), {}, d, d.cutoff);
  REQUIRE(std::abs(sref.alpha_omega_n.z()) > 1e-12);
  CHECK_THAT(t.alpha_minus[0].imag() / omega, WithinRel(sref.alpha_omega_n.z(), 1e-8));
}

TEST_CASE("quadratic channels have frequency-independent coefficients") {
  const std::vector<double> omegas = {1e-4, 2e-4, 4e-4};
  const ResponseSpectrum s = run_response(sheared(), {}, light_domain(), omegas);
  const double r0 = s.sigma_minus[0].real() / (omegas[0] * omegas[0]);
  REQUIRE(std::abs(r0) > 1e-12);
  for (std::size_t i = 1; i < omegas.size(); ++i)
    CHECK_THAT(s.sigma_minus[i].real() / (omegas[i] * omegas[i]), WithinRel(r0, 1e-10));

  // the isotropic model's normal-curvature feed vanishes identically, so its
  // quadratic antisymmetric channel is exactly zero at every frequency
  const ResponseSpectrum iso = run_response(MassiveDirac{1.0}, {}, light_domain(), omegas);
  for (std::size_t i = 0; i < omegas.size(); ++i) CHECK(iso.sigma_minus[i].real() == 0.0);
}

TEST_CASE("channel values agree with the assembled tensors") {
  const std::vector<double> omegas = {1e-4, 1e-3};
  const ResponseSpectrum s = run_response(sheared(), {}, light_domain(), omegas);
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const auto [sm, sp] = decompose_pm(s.sigma[i]);
    const auto [am, ap] = decompose_pm(s.alpha[i]);
    const double sscale = std::abs(s.sigma[i](0, 1)) + std::abs(s.sigma[i](1, 0));
    const double ascale = std::abs(s.alpha[i](0, 1)) + std::abs(s.alpha[i](1, 0));
    CHECK(std::abs(sm - s.sigma_minus[i]) <= 1e-12 * sscale);
    CHECK(std::abs(sp - s.sigma_plus[i]) <= 1e-12 * sscale);
    CHECK(std::abs(am - s.alpha_minus[i]) <= 1e-12 * ascale);
    CHECK(std::abs(ap - s.alpha_plus[i]) <= 1e-12 * ascale);
  }
}

TEST_CASE("power-law fits recover the exact polynomial structure") {
  const ResponseSpectrum s = run_response(sheared(), {}, light_domain(), fit_window());
  const struct {
    Channel channel;
    double expected;
  } cases[] = {{Channel::ImSigmaMinus, 1.0}, {Channel::ImSigmaPlus, 1.0},
               {Channel::ReSigmaMinus, 2.0}, {Channel::ReSigmaPlus, 2.0},
               {Channel::ImAlphaMinus, 1.0}, {Channel::ImAlphaPlus, 1.0},
               {Channel::ReAlphaMinus, 2.0}, {Channel::ReAlphaPlus, 2.0}};
  for (const auto& c : cases) {
    INFO(channel_name(c.channel));
    REQUIRE(std::abs(channel_value(s, c.channel, 0)) > 1e-12); // all feeds alive
    const ScalingFit fit = scaling_fit(s, c.channel);
    CHECK(!fit.suppressed);
    CHECK_THAT(fit.exponent, WithinAbs(c.expected, 0.05));
    CHECK(fit.r_squared >= 0.999999);
    CHECK(fit.omega_lo == 1e-4);
    CHECK(fit.omega_hi == 1.2e-3);
    CHECK(std::abs(fit.prefactor) > 0.0);
    // signed prefactor carries the channel sign
    CHECK((fit.prefactor > 0) == (channel_value(s, c.channel, 0) > 0));
  }
}

TEST_CASE("isotropic model: linear channel fits, symmetry-killed channels report suppressed") {
  const ResponseSpectrum s = run_response(MassiveDirac{1.0}, {}, light_domain(), fit_window());

  const ScalingFit lin = scaling_fit(s, Channel::ImSigmaMinus);
  CHECK(!lin.suppressed);
  CHECK_THAT(lin.exponent, WithinAbs(1.0, 0.01));
  CHECK(lin.r_squared >= 0.9999);

  const ScalingFit quad = scaling_fit(s, Channel::ReAlphaMinus);
  CHECK(!quad.suppressed);
  CHECK_THAT(quad.exponent, WithinAbs(2.0, 0.01));

  // the normal-curvature feed is identically zero here (its out-of-plane
  // component vanishes pointwise), as are the symmetric-channel feeds
  for (Channel c : {Channel::ReSigmaMinus, Channel::ImAlphaMinus, Channel::ImSigmaPlus,
                    Channel::ReSigmaPlus, Channel::ImAlphaPlus, Channel::ReAlphaPlus}) {
    INFO(channel_name(c));
    for (std::size_t i = 0; i < s.omegas.size(); ++i)
      CHECK(std::abs(channel_value(s, c, i)) < 1e-12);
    CHECK(scaling_fit(s, c).suppressed);
  }
}

TEST_CASE("scaling fit rejects inadequate frequency windows") {
  const std::vector<double> few = {1e-4, 2e-4, 4e-4, 8e-4, 1.6e-3};
  const std::vector<double> narrow = {1e-4, 1.5e-4, 2e-4, 2.5e-4, 3e-4, 4e-4};
  CHECK_THROWS_AS(scaling_fit(run_response(sheared(), {}, light_domain(), few),
                              Channel::ImSigmaMinus),
                  ConfigError);
  CHECK_THROWS_AS(scaling_fit(run_response(sheared(), {}, light_domain(), narrow),
                              Channel::ImSigmaMinus),
                  ConfigError);
}

TEST_CASE("zeroing one sector silences exactly its channel pair") {
  const std::vector<double> omegas = fit_window();
  const ResponseSpectrum full = run_response(sheared(), {}, light_domain(), omegas);
  for (Channel c : all_channels)
    REQUIRE(std::abs(channel_value(full, c, 0)) > 1e-14);

  const struct {
    Sector sector;
    Channel current_channel, magnetization_channel;
  } expected[] = {{Sector::OmegaA, Channel::ImSigmaMinus, Channel::ReAlphaMinus},
                  {Sector::GN, Channel::ImSigmaPlus, Channel::ReAlphaPlus},
                  {Sector::OmegaN, Channel::ReSigmaMinus, Channel::ImAlphaMinus},
                  {Sector::GA, Channel::ReSigmaPlus, Channel::ImAlphaPlus}};
  for (const auto& e : expected) {
    INFO(sector_name(e.sector));
    const ResponseSpectrum abl =
        run_response(sheared(), {}, light_domain(), omegas, 0, SectorMask::drop(e.sector));
    for (Channel c : all_channels) {
      INFO(channel_name(c));
      for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (c == e.current_channel || c == e.magnetization_channel)
          CHECK(channel_value(abl, c, i) == 0.0);
        else
          CHECK(bits_equal(channel_value(abl, c, i), channel_value(full, c, i)));
      }
    }
  }
}

TEST_CASE("cutoff doubling is a faithful convergence probe") {
  // tail decay: at a cutoff far beyond the mass scale the leading integral
  // changes by ~m/(2L) under doubling
  IntegrationDomain d;
  d.nr = 400;
  d.ntheta = 64;
  d.cutoff = 1e6;
  const SectorCoefficients a = weighted_sector_integrals(MassiveDirac{1.0}, {}, d);
  CHECK(a.convergence_delta < 1e-6);
  d.cutoff = 2e6;
  const SectorCoefficients b = weighted_sector_integrals(MassiveDirac{1.0}, {}, d);
  CHECK_THAT(a.sigma_omega_a.z(), WithinRel(b.sigma_omega_a.z(), 1e-6));

  // a cutoff comparable to the mass scale leaves a fat tail: rejected
  IntegrationDomain tight;
  tight.cutoff = 2.0;
  try {
    weighted_sector_integrals(MassiveDirac{1.0}, {}, tight);
    FAIL("expected a convergence rejection");
  } catch (const ConvergenceError& err) {
    CHECK(err.value_coarse > 0.0);
    CHECK(err.value_refined > 0.0);
    CHECK(std::string(err.what()).find("cutoff doubling") != std::string::npos);
  }

  // an adequate cutoff with an unreachable tolerance is also rejected
  IntegrationDomain strict = light_domain();
  strict.convergence_rel = 1e-9;
  CHECK_THROWS_AS(weighted_sector_integrals(MassiveDirac{1.0}, {}, strict), ConvergenceError);
}

TEST_CASE("band-symmetric occupation cancels every coefficient exactly") {
  // with both bands fully occupied, every pair weight appears once per band
  // with opposite sign at each node, so the accumulator returns to exactly
  // zero node by node
  const OccupationSpec both_filled{1e12, 0.0};
  for (const Model& model : {Model{MassiveDirac{1.0}}, sheared()}) {
    INFO(describe_model(model));
    const SectorCoefficients ws = weighted_sector_integrals(model, both_filled, light_domain());
    CHECK(ws.max_norm() == 0.0);
    CHECK(ws.convergence_delta == 0.0);
  }
  // gap-centred occupation breaks the symmetry and the integrals survive
  const SectorCoefficients half = weighted_sector_integrals(sheared(), {}, light_domain());
  CHECK(half.max_norm() > 1e-3);
  CHECK(std::abs(half.sigma_omega_n.z()) > 1e-12);
  CHECK(std::abs(half.sigma_g_a(0, 1)) > 1e-14);
}

TEST_CASE("constant-field model produces identically zero integrals") {
  const Model constant = CustomModel{
      "constant", [](const KPoint&) { return Vec3(0.3, -1.2, 0.8); },
      [](const KPoint&) { return Jac32::Zero().eval(); }};
  const SectorCoefficients ws = weighted_sector_integrals(constant, {}, light_domain());
  CHECK(ws.max_norm() == 0.0);
}

TEST_CASE("domain and gap preconditions are enforced") {
  IntegrationDomain bad = light_domain();
  bad.nr = 7;
  CHECK_THROWS_AS(weighted_sector_integrals(MassiveDirac{1.0}, {}, bad), ConfigError);
  IntegrationDomain tiny;
  tiny.cutoff = 1e-9;
  CHECK_THROWS_AS(weighted_sector_integrals(MassiveDirac{1.0}, {}, tiny), ConfigError);

  const Model nearly_degenerate = CustomModel{
      "pinched", [](const KPoint&) { return Vec3(0.0, 0.0, 1e-10); },
      [](const KPoint&) { return Jac32::Zero().eval(); }};
  CHECK_THROWS_AS(weighted_sector_integrals(nearly_degenerate, {}, light_domain()),
                  NodeProximityError);
}

TEST_CASE("spectra are bitwise reproducible across worker counts") {
  const std::vector<double> omegas = {1e-4, 5e-4, 1e-3};
  std::vector<std::string> payloads;
  for (unsigned workers : {1u, 4u, 8u}) {
    const ResponseSpectrum s = run_response(sheared(), {}, light_domain(), omegas, workers);
    payloads.push_back(spectrum_to_json(s).dump());
  }
  CHECK(payloads[0] == payloads[1]);
  CHECK(payloads[0] == payloads[2]);
}

TEST_CASE("spectrum serialization carries the run record") {
  const std::vector<double> omegas = {1e-4, 5e-4, 1e-3};
  const ResponseSpectrum s = run_response(MassiveDirac{1.0}, {}, light_domain(), omegas);
  std::vector<ScalingFit> fits;
  for (Channel c : {Channel::ImSigmaMinus, Channel::ReSigmaMinus}) {
    ScalingFit f;
    f.channel = c;
    fits.push_back(f);
  }
  const nlohmann::json j = spectrum_to_json(s, fits);
  CHECK(j["model"] == "massive_dirac(m=1)");
  CHECK(j["occupation"]["mu"] == 0.0);
  CHECK(j["occupation"]["T"] == 0.0);
  CHECK(j["domain"]["cutoff"] == 20.0);
  CHECK(j["domain"]["cutoff_doubled"] == 40.0);
  CHECK(j["prefactors"]["g_mu_b"] == 1.0);
  CHECK(j["prefactors"]["charge"] == 1.0);
  CHECK(j["convergence_delta"].get<double>() < 0.05);
  CHECK(j["omegas"].size() == 3);
  REQUIRE(j["sigma"].size() == 3);
  REQUIRE(j["sigma"][0].size() == 3);
  REQUIRE(j["sigma"][0][0].size() == 3);
  CHECK(j["sigma"][0][0][0].size() == 2); // complex entries serialize as [re, im]
  CHECK(j["alpha"].size() == 3);
  REQUIRE(j["sigma_minus"].size() == 3);
  CHECK_THAT(j["sigma_minus"][2][1].get<double>(),
             WithinRel(s.sigma_minus[2].imag(), 1e-15));
  REQUIRE(j["fits"].size() == 2);
  CHECK(j["fits"][0]["channel"] == "Im_sigma_minus");
  CHECK(j["fits"][1]["channel"] == "Re_sigma_minus");

  std::ostringstream os;
  write_spectrum_csv(os, s, {"demo run"});
  std::vector<std::string> lines;
  std::istringstream is(os.str());
  for (std::string line; std::getline(is, line);) lines.push_back(line);
  REQUIRE(lines.size() == 2 + omegas.size());
  CHECK(lines[0] == "# demo run");
  CHECK(lines[1] ==
        "omega,sigma_xx_re,sigma_xx_im,sigma_xy_re,sigma_xy_im,sigma_yx_re,sigma_yx_im,"
        "sigma_yy_re,sigma_yy_im,alpha_xx_re,alpha_xx_im,alpha_xy_re,alpha_xy_im,"
        "alpha_yx_re,alpha_yx_im,alpha_yy_re,alpha_yy_im,sigma_minus_re,sigma_minus_im,"
        "sigma_plus_re,sigma_plus_im,alpha_minus_re,alpha_minus_im,alpha_plus_re,"
        "alpha_plus_im");
  // the last field of the first data row is Im alpha_plus at the first omega
  const std::string row = lines[2];
  const double last = std::stod(row.substr(row.rfind(',') + 1));
  CHECK_THAT(last, WithinAbs(s.alpha_plus[0].imag(), 1e-300));
}
