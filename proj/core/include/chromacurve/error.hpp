#pragma once

#include <stdexcept>
#include <string>

namespace chromacurve {

// Base of every error raised by the library. Catch this to handle any
// library failure; catch a derived type to react to a specific one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input too small or without spread (e.g. identical or collinear points).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// Normal equations whose condition estimate exceeds the fit limit.
class IllConditioned : public Error {
 public:
  using Error::Error;
};

class UnsupportedMethod : public Error {
 public:
  using Error::Error;
};

class MismatchedDimensions : public Error {
 public:
  using Error::Error;
};

class MalformedDocument : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace chromacurve
