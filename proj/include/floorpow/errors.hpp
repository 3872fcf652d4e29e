#pragma once

#include <stdexcept>
#include <string>

namespace floorpow {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition was violated by the caller.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A configured resource bound (memory, bit budget, sieve limit) would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// The dyadic prime window (P, 2P] holds no primes for the given parameters.
class EmptyWindowError : public Error {
 public:
  using Error::Error;
};

}  // namespace floorpow
