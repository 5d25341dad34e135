#pragma once

namespace aprifire {

inline constexpr const char* kToolName = "aprifire";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace aprifire
