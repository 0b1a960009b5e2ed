#pragma once

namespace lobosc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lobosc
