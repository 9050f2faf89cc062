// zqg: command-line surface for the two-band Bloch geometry library.
//
// Subcommands: fields, charge, response, symmetry, validate. Configuration
// comes from a JSON file (--config); --output-dir and --workers override it.
// Worker count may also come from the ZQG_WORKERS environment variable
// (flag wins); it is never echoed into outputs, which are byte-reproducible
// from the config alone.
//
// Exit codes: 0 success, 2 configuration/usage, 3 convergence failure,
// 4 node proximity, 5 validation-check failure, 1 other runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zqg/config.hpp"
#include "zqg/symmetry.hpp"
#include "zqg/validate.hpp"

namespace {

struct CommandArgs {
  std::string config_path;
  std::string output_dir;  // empty = keep the config's value
  int workers = -1;        // -1 = unset (env, then auto)
  std::string group;
  std::string sector;
  std::string mutate = "none";
};

unsigned resolve_cli_workers(int flag_value) {
  if (flag_value >= 0) return static_cast<unsigned>(flag_value);
  if (const char* env = std::getenv("ZQG_WORKERS")) {
    const std::string s(env);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw zqg::ConfigError("ZQG_WORKERS must be a non-negative integer, got '" + s + "'");
    return static_cast<unsigned>(std::stoul(s));
  }
  return 0;
}

zqg::RunConfig load_config(const CommandArgs& args) {
  if (args.config_path.empty()) throw zqg::ConfigError("missing --config");
  zqg::RunConfig cfg = zqg::load_run_config(args.config_path);
  if (!args.output_dir.empty()) {
    cfg.output_dir = args.output_dir;
    cfg.echo["output_dir"] = args.output_dir;
  }
  return cfg;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << j.dump(2) << "\n";
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<std::string> file_comments(const zqg::RunConfig& cfg) {
  return {std::string("zqg version ") + zqg::zqg_version, "config " + cfg.echo.dump()};
}

int cmd_fields(const CommandArgs& args) {
  const zqg::RunConfig cfg = load_config(args);
  if (!cfg.grid) throw zqg::ConfigError("fields command needs a 'grid' entry in the config");
  if (cfg.quantities.empty())
    throw zqg::ConfigError("fields command needs a 'quantities' entry in the config");
  const unsigned workers = resolve_cli_workers(args.workers);
  std::filesystem::create_directories(cfg.output_dir);
  for (zqg::Quantity q : cfg.quantities) {
    const zqg::SampledField field = zqg::sample_field(cfg.model, *cfg.grid, q, cfg.band, workers);
    const std::string path = cfg.output_dir + "/" + zqg::quantity_name(q) + ".csv";
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    zqg::write_field_csv(os, field, file_comments(cfg));
    if (!os) throw std::runtime_error("failed writing '" + path + "'");
    std::cout << "wrote " << path << " (" << field.grid.size() << " rows)\n";
  }
  return 0;
}

int cmd_charge(const CommandArgs& args) {
  const zqg::RunConfig cfg = load_config(args);
  if (!cfg.contour) throw zqg::ConfigError("charge command needs a 'contour' entry in the config");
  const unsigned workers = resolve_cli_workers(args.workers);
  const zqg::TopologicalCharges charges =
      zqg::topological_charges(cfg.model, *cfg.contour, cfg.band, workers);
  nlohmann::json j = zqg::charges_to_json(charges);
  j["version"] = zqg::zqg_version;
  j["config"] = cfg.echo;
  std::filesystem::create_directories(cfg.output_dir);
  const std::string path = cfg.output_dir + "/charges.json";
  write_json_file(path, j);
  std::cout << j.dump(2) << "\n";
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_response(const CommandArgs& args) {
  const zqg::RunConfig cfg = load_config(args);
  if (cfg.omegas.empty())
    throw zqg::ConfigError("response command needs a 'frequencies' entry in the config");
  const unsigned workers = resolve_cli_workers(args.workers);
  const zqg::ResponseSpectrum spectrum =
      zqg::run_response(cfg.model, cfg.occupation, cfg.domain, cfg.omegas, workers);

  std::vector<zqg::ScalingFit> fits;
  std::string fit_note;
  try {
    for (zqg::Channel c : zqg::all_channels) fits.push_back(zqg::scaling_fit(spectrum, c));
  } catch (const zqg::ConfigError& e) {
    fits.clear();
    fit_note = e.what();
  }

  nlohmann::json j = zqg::spectrum_to_json(spectrum, fits);
  j["version"] = zqg::zqg_version;
  j["config"] = cfg.echo;
  std::filesystem::create_directories(cfg.output_dir);
  const std::string json_path = cfg.output_dir + "/response.json";
  write_json_file(json_path, j);
  const std::string csv_path = cfg.output_dir + "/response.csv";
  {
    std::ofstream os(csv_path);
    if (!os) throw std::runtime_error("cannot open '" + csv_path + "' for writing");
    zqg::write_spectrum_csv(os, spectrum, file_comments(cfg));
    if (!os) throw std::runtime_error("failed writing '" + csv_path + "'");
  }

  std::cout << "wrote " << json_path << "\n";
  std::cout << "wrote " << csv_path << "\n";
  std::cout << "cutoff " << spectrum.cutoff << ", convergence delta "
            << spectrum.convergence_delta << "\n";
  if (!fit_note.empty()) std::cout << "fits skipped: " << fit_note << "\n";
  for (const zqg::ScalingFit& f : fits) {
    std::cout << "fit " << zqg::channel_name(f.channel);
    if (f.suppressed) {
      std::cout << ": suppressed (channel below floor across the window)\n";
    } else {
      std::cout << ": exponent " << f.exponent << ", prefactor " << f.prefactor << ", r2 "
                << f.r_squared << "\n";
    }
  }
  return 0;
}

int cmd_symmetry(const CommandArgs& args) {
  nlohmann::json j;
  if (!args.group.empty())
    j = zqg::group_report(args.group);
  else if (!args.sector.empty())
    j = zqg::sector_report(zqg::parse_sector(args.sector));
  else
    j = zqg::symmetry_table_report();
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_validate(const CommandArgs& args) {
  const zqg::MutationMode mode = zqg::parse_mutation_mode(args.mutate);
  const unsigned workers = resolve_cli_workers(args.workers);
  const zqg::ValidationReport report = zqg::run_validation(mode, workers);
  std::cout << zqg::report_to_json(report).dump(2) << "\n";
  return report.all_passed ? 0 : 5;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-band Bloch geometry toolkit: field maps, topological charges,\n"
               "low-frequency response sweeps, symmetry queries, and self-validation."};
  app.require_subcommand(1);
  app.set_version_flag("--version", zqg::zqg_version);

  CommandArgs args;

  CLI::App* fields = app.add_subcommand("fields", "Sample band-geometry fields to CSV");
  fields->add_option("--config", args.config_path, "JSON run configuration")->required();
  fields->add_option("--output-dir", args.output_dir, "Override the config's output directory");
  fields->add_option("--workers", args.workers, "Worker threads (0 = auto; env ZQG_WORKERS)");

  CLI::App* charge = app.add_subcommand("charge", "Extract topological charges along a contour");
  charge->add_option("--config", args.config_path, "JSON run configuration")->required();
  charge->add_option("--output-dir", args.output_dir, "Override the config's output directory");
  charge->add_option("--workers", args.workers, "Worker threads (0 = auto; env ZQG_WORKERS)");

  CLI::App* response = app.add_subcommand("response", "Sweep conductivity and kinetic"
                                                      " magnetoelectric responses");
  response->add_option("--config", args.config_path, "JSON run configuration")->required();
  response->add_option("--output-dir", args.output_dir, "Override the config's output directory");
  response->add_option("--workers", args.workers, "Worker threads (0 = auto; env ZQG_WORKERS)");

  CLI::App* symmetry = app.add_subcommand("symmetry", "Query which sectors a magnetic point"
                                                      " group admits");
  CLI::Option* group_opt = symmetry->add_option("--group", args.group, "Group label to look up");
  symmetry->add_option("--sector", args.sector, "Sector name to look up")->excludes(group_opt);

  CLI::App* validate = app.add_subcommand("validate", "Run the oracle cross-check suite");
  validate->add_option("--mutate", args.mutate,
                       "Fault injection: none (default) or omega-a-sign-flip");
  validate->add_option("--workers", args.workers, "Worker threads (0 = auto; env ZQG_WORKERS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fields->parsed()) return cmd_fields(args);
    if (charge->parsed()) return cmd_charge(args);
    if (response->parsed()) return cmd_response(args);
    if (symmetry->parsed()) return cmd_symmetry(args);
    if (validate->parsed()) return cmd_validate(args);
    return 2; // unreachable with require_subcommand(1)
  } catch (const zqg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const zqg::UnknownGroupError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const zqg::GridError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const zqg::ContourError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const zqg::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const zqg::NodeProximityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
