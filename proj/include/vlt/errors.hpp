#pragma once

#include <stdexcept>
#include <string>

namespace vlt {

/// A quadrature or reconstruction produced or encountered non-finite values.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// A file did not conform to one of the binary formats.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vlt
