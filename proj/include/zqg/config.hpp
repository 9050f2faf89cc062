#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zqg/fields.hpp"
#include "zqg/response.hpp"

namespace zqg {

inline constexpr const char* zqg_version = "1.0.0";

/**
 * A fully parsed run description. Every command consumes the parts it needs;
 * `echo` is the canonicalized configuration (defaults filled in, worker count
 * deliberately excluded since it cannot affect payloads) that gets embedded
 * into every output file so a run is reproducible from any of its artifacts.
 */
struct RunConfig {
  Model model = MassiveDirac{1.0};
  Band band = Band::Plus;
  std::optional<Grid2D> grid;
  std::vector<Quantity> quantities;
  std::optional<Contour> contour;
  OccupationSpec occupation;
  IntegrationDomain domain;
  std::vector<double> omegas;
  std::string output_dir = ".";
  nlohmann::json echo;
};

namespace detail {

inline void require_keys(const nlohmann::json& j, const char* where,
                         std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const char* key : required)
    if (!j.contains(key))
      throw ConfigError(std::string(where) + " is missing required key '" + key + "'");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* k : required) known = known || key == k;
    for (const char* k : optional) known = known || key == k;
    if (!known) throw ConfigError(std::string(where) + " has unknown key '" + key + "'");
  }
}

template <typename T>
T field_as(const nlohmann::json& j, const char* where, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(where) + " key '" + key + "' has the wrong type");
  }
}

template <typename T>
T field_or(const nlohmann::json& j, const char* where, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return field_as<T>(j, where, key);
}

inline Model parse_model(const nlohmann::json& j) {
  const std::string type = field_as<std::string>(j, "model", "type");
  if (type == "massive_dirac") {
    require_keys(j, "model", {"type", "m"}, {});
    return MassiveDirac{field_as<double>(j, "model", "m")};
  }
  if (type == "planar_winding") {
    require_keys(j, "model", {"type", "nw"}, {});
    return PlanarWinding{field_as<int>(j, "model", "nw")};
  }
  if (type == "sheared_dirac") {
    require_keys(j, "model", {"type", "m"}, {});
    return make_sheared_dirac(field_as<double>(j, "model", "m"));
  }
  if (type == "constant") {
    require_keys(j, "model", {"type", "d"}, {});
    const auto d = field_as<std::vector<double>>(j, "model", "d");
    if (d.size() != 3) throw ConfigError("model key 'd' must be a 3-vector");
    const Vec3 value(d[0], d[1], d[2]);
    return CustomModel{"constant", [value](const KPoint&) { return value; },
                       [](const KPoint&) { return Jac32::Zero().eval(); }};
  }
  throw ConfigError("unknown model type '" + type +
                    "'; valid: massive_dirac, planar_winding, sheared_dirac, constant");
}

inline nlohmann::json echo_model(const nlohmann::json& j) {
  nlohmann::json out = j; // already validated; canonical order comes from dump
  return out;
}

inline Grid2D parse_grid(const nlohmann::json& j) {
  const std::string kind = field_as<std::string>(j, "grid", "kind");
  if (kind == "cartesian") {
    require_keys(j, "grid", {"kind", "kx_min", "kx_max", "ky_min", "ky_max", "nx", "ny"}, {});
    return Grid2D::cartesian(field_as<double>(j, "grid", "kx_min"),
                             field_as<double>(j, "grid", "kx_max"),
                             field_as<double>(j, "grid", "ky_min"),
                             field_as<double>(j, "grid", "ky_max"),
                             field_as<int>(j, "grid", "nx"), field_as<int>(j, "grid", "ny"));
  }
  if (kind == "polar") {
    require_keys(j, "grid", {"kind", "r_min", "r_max", "nr", "ntheta"},
                 {"log_radial", "excludes_node"});
    return Grid2D::polar(field_as<double>(j, "grid", "r_min"),
                         field_as<double>(j, "grid", "r_max"), field_as<int>(j, "grid", "nr"),
                         field_as<int>(j, "grid", "ntheta"),
                         field_or<bool>(j, "grid", "log_radial", false),
                         field_or<bool>(j, "grid", "excludes_node", true));
  }
  throw ConfigError("unknown grid kind '" + kind + "'; valid: cartesian, polar");
}

inline Contour parse_contour(const nlohmann::json& j) {
  const std::string kind = field_as<std::string>(j, "contour", "kind");
  const int samples = field_or<int>(j, "contour", "samples", 256);
  if (kind == "circle") {
    require_keys(j, "contour", {"kind", "center", "radius"}, {"samples"});
    const auto c = field_as<std::vector<double>>(j, "contour", "center");
    if (c.size() != 2) throw ConfigError("contour key 'center' must be a 2-vector");
    Contour contour{Circle{KPoint{c[0], c[1]}, field_as<double>(j, "contour", "radius")},
                    samples};
    validate_contour(contour);
    return contour;
  }
  if (kind == "polyline") {
    require_keys(j, "contour", {"kind", "points"}, {"samples"});
    Polyline poly;
    for (const auto& p : j.at("points")) {
      const auto pt = p.get<std::vector<double>>();
      if (pt.size() != 2) throw ConfigError("contour points must be 2-vectors");
      poly.points.push_back(KPoint{pt[0], pt[1]});
    }
    Contour contour{poly, samples};
    validate_contour(contour);
    return contour;
  }
  throw ConfigError("unknown contour kind '" + kind + "'; valid: circle, polyline");
}

inline Quantity parse_quantity(const std::string& name) {
  for (Quantity q : {Quantity::OmegaA, Quantity::OmegaN, Quantity::GN, Quantity::GA,
                     Quantity::WindingField, Quantity::BerryCurvatureXY})
    if (name == quantity_name(q)) return q;
  throw ConfigError("unknown quantity '" + name +
                    "'; valid: omega_a, omega_n, g_n, g_a, winding_field, berry_curvature_xy");
}

inline std::vector<double> parse_frequencies(const nlohmann::json& j) {
  if (j.contains("omegas")) {
    require_keys(j, "frequencies", {"omegas"}, {});
    const auto omegas = field_as<std::vector<double>>(j, "frequencies", "omegas");
    if (omegas.empty()) throw ConfigError("frequencies key 'omegas' must be non-empty");
    return omegas;
  }
  require_keys(j, "frequencies", {"omega_lo", "omega_hi", "n_points"}, {"log_spacing"});
  const double lo = field_as<double>(j, "frequencies", "omega_lo");
  const double hi = field_as<double>(j, "frequencies", "omega_hi");
  const int n = field_as<int>(j, "frequencies", "n_points");
  const bool log_spacing = field_or<bool>(j, "frequencies", "log_spacing", true);
  if (!(lo > 0) || !(hi > lo)) throw ConfigError("frequency sweep needs omega_hi > omega_lo > 0");
  if (n < 2) throw ConfigError("frequency sweep needs n_points >= 2");
  std::vector<double> omegas(n);
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    omegas[i] = log_spacing ? std::exp(std::log(lo) + s * (std::log(hi) - std::log(lo)))
                            : lo + s * (hi - lo);
  }
  omegas.front() = lo;
  omegas.back() = hi;
  return omegas;
}

} // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  detail::require_keys(j, "config", {"model"},
                       {"band", "grid", "quantities", "contour", "occupation", "domain",
                        "frequencies", "output_dir"});
  RunConfig cfg;
  cfg.model = detail::parse_model(j.at("model"));
  cfg.echo["model"] = j.at("model");

  const std::string band = detail::field_or<std::string>(j, "config", "band", "plus");
  if (band == "plus")
    cfg.band = Band::Plus;
  else if (band == "minus")
    cfg.band = Band::Minus;
  else
    throw ConfigError("unknown band '" + band + "'; valid: plus, minus");
  cfg.echo["band"] = band;

  if (j.contains("grid")) {
    cfg.grid = detail::parse_grid(j.at("grid"));
    cfg.echo["grid"] = j.at("grid");
  }
  if (j.contains("quantities")) {
    for (const auto& q : j.at("quantities"))
      cfg.quantities.push_back(detail::parse_quantity(q.get<std::string>()));
    if (cfg.quantities.empty()) throw ConfigError("config key 'quantities' must be non-empty");
    cfg.echo["quantities"] = j.at("quantities");
  }
  if (j.contains("contour")) {
    cfg.contour = detail::parse_contour(j.at("contour"));
    cfg.echo["contour"] = j.at("contour");
  }

  if (j.contains("occupation")) {
    detail::require_keys(j.at("occupation"), "occupation", {}, {"mu", "T"});
    cfg.occupation.mu = detail::field_or<double>(j.at("occupation"), "occupation", "mu", 0.0);
    cfg.occupation.T = detail::field_or<double>(j.at("occupation"), "occupation", "T", 0.0);
    if (cfg.occupation.T < 0) throw ConfigError("occupation temperature must be >= 0");
  }
  cfg.echo["occupation"] = {{"mu", cfg.occupation.mu}, {"T", cfg.occupation.T}};

  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    detail::require_keys(d, "domain", {},
                         {"cutoff", "nr", "ntheta", "log_radial", "convergence_rel"});
    cfg.domain.cutoff = detail::field_or<double>(d, "domain", "cutoff", 0.0);
    cfg.domain.nr = detail::field_or<int>(d, "domain", "nr", cfg.domain.nr);
    cfg.domain.ntheta = detail::field_or<int>(d, "domain", "ntheta", cfg.domain.ntheta);
    cfg.domain.log_radial = detail::field_or<bool>(d, "domain", "log_radial", true);
    cfg.domain.convergence_rel =
        detail::field_or<double>(d, "domain", "convergence_rel", cfg.domain.convergence_rel);
    if (!(cfg.domain.convergence_rel > 0))
      throw ConfigError("domain key 'convergence_rel' must be > 0");
  }
  cfg.echo["domain"] = {{"cutoff", cfg.domain.cutoff},
                        {"nr", cfg.domain.nr},
                        {"ntheta", cfg.domain.ntheta},
                        {"log_radial", cfg.domain.log_radial},
                        {"convergence_rel", cfg.domain.convergence_rel}};

  if (j.contains("frequencies")) {
    cfg.omegas = detail::parse_frequencies(j.at("frequencies"));
    cfg.echo["frequencies"] = j.at("frequencies");
  }

  cfg.output_dir = detail::field_or<std::string>(j, "config", "output_dir", ".");
  cfg.echo["output_dir"] = cfg.output_dir;
  cfg.echo["version"] = zqg_version;
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

} // namespace zqg
