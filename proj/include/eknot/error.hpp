#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eknot {

enum class Errc {
  TooFewPoints,
  DegenerateEdge,
  MismatchedSampleCount,
  NonUniformSampling,
  CoincidentPoints,
  SelfIntersection,
  InvalidSpec,
  KnotGuardViolation,
  NonFiniteEnergy,
  DegenerateCurve,
  DegenerateDirection,
  StrandCountError,
  TransversalityError,
  AlignmentError,
  ParseError,
  IoError,
  UsageError,
};

std::string_view to_string(Errc code);

/// Domain and I/O failures raised by the library. The code is stable and is
/// what the CLI maps onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace eknot
