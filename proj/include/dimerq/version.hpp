#pragma once

namespace dimerq {
inline constexpr const char* version = "1.0.0";
}
