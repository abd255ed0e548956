#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specfx {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct InvalidParams : Error {
  using Error::Error;
};

// A constant signal makes the 2x2 alignment normal matrix singular.
struct DegenerateSignal : Error {
  DegenerateSignal(std::string signal_label, const std::string& what)
      : Error(what), label(std::move(signal_label)) {}
  std::string label;
};

struct FrameNotOrthonormal : Error {
  using Error::Error;
};

struct EmptyCandidates : Error {
  using Error::Error;
};

struct NearZeroSlope : Error {
  using Error::Error;
};

// CSV/JSON input that cannot be parsed; `line` is 1-based (0 when unknown).
struct ParseError : Error {
  ParseError(std::size_t line_number, const std::string& what)
      : Error(what), line(line_number) {}
  std::size_t line = 0;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace specfx
