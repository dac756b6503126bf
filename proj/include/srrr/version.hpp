#ifndef SRRR_VERSION_HPP
#define SRRR_VERSION_HPP

namespace srrr {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
