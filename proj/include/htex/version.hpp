#pragma once

namespace htex {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace htex
