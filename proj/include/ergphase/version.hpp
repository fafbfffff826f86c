#pragma once

namespace ergphase {

inline constexpr const char* artifact_name = "ergphase";
inline constexpr const char* artifact_version = "0.1.0";

} // namespace ergphase
