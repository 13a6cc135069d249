#pragma once

namespace hmiw {
inline constexpr const char* version = "0.1.0";
}
