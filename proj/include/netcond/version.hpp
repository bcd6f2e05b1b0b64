#pragma once

namespace netcond {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace netcond
