#pragma once

namespace popcomp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace popcomp
