#pragma once

namespace cvqkd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cvqkd
