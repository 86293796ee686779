#ifndef TIMELOC_VERSION_HPP
#define TIMELOC_VERSION_HPP

#define TIMELOC_VERSION_STRING "0.1.0"

namespace timeloc {
inline const char* version() { return TIMELOC_VERSION_STRING; }
}

#endif
