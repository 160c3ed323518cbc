#ifndef ORBM_VERSION_HPP_
#define ORBM_VERSION_HPP_

namespace orbm {
inline constexpr const char* kVersion = "0.1.0";
}

#endif  // ORBM_VERSION_HPP_
