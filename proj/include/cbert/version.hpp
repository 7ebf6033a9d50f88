#pragma once

namespace cbert {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace cbert
