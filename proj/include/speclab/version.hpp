#ifndef SPECLAB_VERSION_HPP
#define SPECLAB_VERSION_HPP

namespace speclab {

inline constexpr const char* kVersion = "0.1.0";

} // namespace speclab

#endif
