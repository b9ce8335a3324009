#pragma once

namespace camo {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "camo";

}  // namespace camo
