#pragma once

namespace qsurr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qsurr
