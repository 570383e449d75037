#pragma once

namespace cbfs {

inline constexpr const char* kToolName = "cbfs";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace cbfs
