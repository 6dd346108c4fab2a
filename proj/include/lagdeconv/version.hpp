#pragma once

namespace lagdeconv {

inline constexpr const char* kVersion = "lagdeconv 0.1.0";

}
