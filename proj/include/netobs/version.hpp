#pragma once

namespace netobs {
inline constexpr const char* version = "0.1.0";
}
