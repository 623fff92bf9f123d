#pragma once

namespace ubmlab {
inline constexpr const char* kVersion = "0.1.0";
}
