#pragma once

namespace dualmean {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dualmean
