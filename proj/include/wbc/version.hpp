#pragma once

namespace wbc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wbc
