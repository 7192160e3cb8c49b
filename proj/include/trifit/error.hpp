#pragma once

#include <stdexcept>
#include <string>

namespace trifit {

/// Error type thrown by every fallible operation in the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trifit
