#pragma once

namespace xydyn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace xydyn
