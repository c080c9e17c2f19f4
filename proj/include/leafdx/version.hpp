#pragma once

namespace leafdx {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kVersionString = "leafdx 0.1.0";

}  // namespace leafdx
