#pragma once

namespace boltzmom {

inline constexpr const char* version = "0.1.0";

}  // namespace boltzmom
