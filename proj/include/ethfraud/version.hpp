#pragma once

namespace ethfraud {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ethfraud
