#pragma once

namespace qite {

inline constexpr const char* version_string = "qite 0.1.0";

}  // namespace qite
