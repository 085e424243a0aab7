#pragma once

namespace gpmax {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gpmax
