#pragma once

namespace hfsc {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

}  // namespace hfsc
