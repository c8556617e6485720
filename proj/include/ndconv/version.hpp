#pragma once

namespace ndconv {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ndconv
