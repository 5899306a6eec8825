#pragma once

#include <stdexcept>
#include <string>

namespace whitney {

/// Base exception for every failed precondition or numerical failure in the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A query landed on a point where the operation is undefined (a site, outside the domain, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Lazy refinement hit the configured depth cap before reaching an accepted cube.
class DepthCapError : public Error {
public:
    using Error::Error;
};

} // namespace whitney
