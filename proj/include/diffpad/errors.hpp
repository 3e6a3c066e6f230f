#pragma once

#include <stdexcept>
#include <string>

namespace diffpad {

/// Thrown when a computation produces or encounters non-finite state.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace diffpad
