#pragma once

#include <stdexcept>
#include <string>

namespace bfm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vector that must be nonzero was (numerically) zero: collocated agents,
/// a zero bearing, or a leader sitting on the formation centroid.
class DegenerateVector : public Error {
 public:
  explicit DegenerateVector(const std::string& what, int edge = -1)
      : Error(what), edge_(edge) {}

  /// Offending edge index, or -1 when the failure is not tied to an edge.
  int edge() const noexcept { return edge_; }

 private:
  int edge_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidGraph : public Error {
 public:
  using Error::Error;
};

class NotRigid : public Error {
 public:
  using Error::Error;
};

class NotLocalizable : public Error {
 public:
  using Error::Error;
};

class ScheduleGap : public Error {
 public:
  using Error::Error;
};

class UnknownNeighbor : public Error {
 public:
  using Error::Error;
};

class EigenSolveFailure : public Error {
 public:
  using Error::Error;
};

class WindowTooShort : public Error {
 public:
  using Error::Error;
};

/// Leader scaling speeds that violate the common-ratio or common-sign rule.
class InconsistentScaling : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario input. `field` names the JSON path that failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bfm
