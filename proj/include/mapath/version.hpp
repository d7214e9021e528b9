#pragma once

namespace mapath {

inline constexpr const char* version() { return "0.1.0"; }

}  // namespace mapath
