#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zqg/errors.hpp"
#include "zqg/sectors.hpp"

namespace zqg {

/**
 * Classification of the 2D magnetic point groups by which of the four Zeeman
 * geometric sectors they admit as a transport channel. Transcribed verbatim
 * from the source classification table — labels keep their primes and 1'
 * suffixes exactly as printed, and nothing is re-derived from representation
 * theory. The normal-curvature row reads "All": every listed group admits
 * that channel.
 *
 * Known tension, documented rather than resolved: the narrative text
 * accompanying the table says m'm'2 (with 3m', 4m'm', 4'm'm, 6m'm') admits
 * only the normal-metric channel, yet the printed anomalous-metric row also
 * contains m'm'2. This transcription follows the printed row.
 *
 * The nine "highlight" labels admit all four sectors.
 */
inline constexpr std::string_view symmetry_table_json = R"json({
  "version": "1",
  "highlight": ["1", "m", "2", "2'", "mm2", "m'm2'", "3", "4", "6"],
  "rows": {
    "g_n": ["1", "m", "2", "2'", "mm2", "m'm2'", "3", "4", "6",
            "m'm'2", "3m'", "4'", "4m'm'", "4'm'm", "6m'm'"],
    "g_a": ["1", "m", "2", "2'", "mm2", "m'm2'", "3", "4", "6",
            "11'", "m'", "m1'", "21'", "mm21'", "m'm'2",
            "31'", "41'", "4'", "61'", "6'"],
    "omega_n": "All",
    "omega_a": ["1", "m", "2", "2'", "mm2", "m'm2'", "3", "4", "6",
                "m'", "3m", "4mm", "6mm"]
  }
})json";

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/** Checksum of the embedded table; pinned by a golden test against edits. */
inline std::uint64_t symmetry_table_checksum() { return fnv1a64(symmetry_table_json); }

namespace detail {

struct SymmetryTable {
  std::string version;
  std::vector<std::string> labels; // sorted universe: every label in the table
  std::vector<std::string> highlight;
  std::map<std::string, std::set<Sector>> membership;
};

inline SymmetryTable build_symmetry_table() {
  const nlohmann::json j = nlohmann::json::parse(symmetry_table_json);
  SymmetryTable t;
  t.version = j.at("version").get<std::string>();
  t.highlight = j.at("highlight").get<std::vector<std::string>>();

  const auto row = [&](const char* key) {
    return j.at("rows").at(key).get<std::vector<std::string>>();
  };
  const std::vector<std::string> g_n = row("g_n");
  const std::vector<std::string> g_a = row("g_a");
  const std::vector<std::string> omega_a = row("omega_a");
  if (j.at("rows").at("omega_n") != "All")
    throw ConfigError("embedded symmetry table: the omega_n row must read \"All\"");

  // the label universe is everything the table mentions; the "All" row then
  // grants the normal-curvature channel to each of them
  std::set<std::string> universe(g_n.begin(), g_n.end());
  universe.insert(g_a.begin(), g_a.end());
  universe.insert(omega_a.begin(), omega_a.end());
  for (const std::string& label : universe) t.membership[label] = {Sector::OmegaN};
  for (const std::string& label : g_n) t.membership.at(label).insert(Sector::GN);
  for (const std::string& label : g_a) t.membership.at(label).insert(Sector::GA);
  for (const std::string& label : omega_a) t.membership.at(label).insert(Sector::OmegaA);
  t.labels.assign(universe.begin(), universe.end());

  for (const std::string& label : t.highlight)
    if (!universe.count(label) || t.membership.at(label).size() != 4)
      throw ConfigError("embedded symmetry table: highlight label '" + label +
                        "' must admit all four sectors");
  return t;
}

inline const SymmetryTable& symmetry_table() {
  static const SymmetryTable table = build_symmetry_table();
  return table;
}

} // namespace detail

inline const std::string& symmetry_table_version() { return detail::symmetry_table().version; }

/** All group labels in the table, sorted. */
inline const std::vector<std::string>& all_group_labels() {
  return detail::symmetry_table().labels;
}

/** The labels printed highlighted: the groups admitting all four sectors. */
inline const std::vector<std::string>& highlighted_group_labels() {
  return detail::symmetry_table().highlight;
}

/** The sectors the named magnetic point group admits. */
inline std::set<Sector> allowed_sectors(const std::string& group_name) {
  const auto& table = detail::symmetry_table();
  const auto it = table.membership.find(group_name);
  if (it == table.membership.end()) {
    std::string valid;
    for (const std::string& label : table.labels) {
      if (!valid.empty()) valid += ", ";
      valid += label;
    }
    throw UnknownGroupError("unknown magnetic point group '" + group_name +
                            "'; valid labels: " + valid);
  }
  return it->second;
}

/** Inverse lookup: every group whose row admits the sector. Sorted. */
inline std::vector<std::string> groups_allowing(Sector sector) {
  std::vector<std::string> out;
  for (const auto& [label, sectors] : detail::symmetry_table().membership)
    if (sectors.count(sector)) out.push_back(label);
  return out; // map iteration is already sorted by label
}

inline nlohmann::json group_report(const std::string& group_name) {
  nlohmann::json allowed = nlohmann::json::array();
  for (Sector s : all_sectors)
    if (allowed_sectors(group_name).count(s)) allowed.push_back(sector_name(s));
  return {{"group", group_name},
          {"allowed", allowed},
          {"table_version", symmetry_table_version()}};
}

inline nlohmann::json sector_report(Sector sector) {
  return {{"sector", sector_name(sector)},
          {"groups", groups_allowing(sector)},
          {"table_version", symmetry_table_version()}};
}

inline nlohmann::json symmetry_table_report() {
  nlohmann::json groups = nlohmann::json::object();
  for (const std::string& label : all_group_labels()) {
    nlohmann::json allowed = nlohmann::json::array();
    for (Sector s : all_sectors)
      if (allowed_sectors(label).count(s)) allowed.push_back(sector_name(s));
    groups[label] = allowed;
  }
  return {{"table_version", symmetry_table_version()},
          {"checksum", symmetry_table_checksum()},
          {"highlight", highlighted_group_labels()},
          {"groups", groups}};
}

} // namespace zqg
