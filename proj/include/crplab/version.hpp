#pragma once

#include <string_view>

namespace crplab {

inline constexpr std::string_view kToolName = "crplab";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace crplab
