#pragma once

#include <array>
#include <string>

#include "zqg/errors.hpp"

namespace zqg {

/**
 * The four sectors of the Zeeman geometric tensor: symmetric/antisymmetric
 * (metric/curvature) crossed with normal/anomalous (real/imaginary part of
 * the symmetrized or cross blocks). Each one feeds its own response channel.
 */
enum class Sector { OmegaA, GN, OmegaN, GA };

inline constexpr std::array<Sector, 4> all_sectors = {Sector::OmegaA, Sector::GN, Sector::OmegaN,
                                                      Sector::GA};

inline const char* sector_name(Sector s) {
  switch (s) {
    case Sector::OmegaA: return "omega_a";
    case Sector::GN: return "g_n";
    case Sector::OmegaN: return "omega_n";
    case Sector::GA: return "g_a";
  }
  return "unknown";
}

inline Sector parse_sector(const std::string& name) {
  for (Sector s : all_sectors)
    if (name == sector_name(s)) return s;
  throw ConfigError("unknown sector '" + name + "'; valid: omega_a, g_n, omega_n, g_a");
}

} // namespace zqg
