#pragma once

namespace kslab {
inline constexpr const char* kVersion = "0.1.0";
}
