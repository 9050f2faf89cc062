#pragma once

namespace zqg {

inline constexpr const char* version = "0.1.0";

} // namespace zqg
