#pragma once

namespace exo {
inline constexpr const char* kToolVersion = "0.1.0";
}
