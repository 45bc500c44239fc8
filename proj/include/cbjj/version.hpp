#pragma once

namespace cbjj {
inline constexpr const char* kVersion = "0.1.0";
}
