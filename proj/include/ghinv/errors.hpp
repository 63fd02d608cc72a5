#pragma once

#include <stdexcept>
#include <string>

namespace ghinv {

struct GhinvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateRoot : GhinvError {
  using GhinvError::GhinvError;
};
struct DegreeMismatch : GhinvError {
  using GhinvError::GhinvError;
};
struct PeriodicityViolation : GhinvError {
  using GhinvError::GhinvError;
};
struct FractionalCartan : GhinvError {
  using GhinvError::GhinvError;
};
struct NotInvertible : GhinvError {
  using GhinvError::GhinvError;
};
struct NotUnimodular : GhinvError {
  using GhinvError::GhinvError;
};
struct NotSemisimple : GhinvError {
  using GhinvError::GhinvError;
};
struct NotCentral : GhinvError {
  using GhinvError::GhinvError;
};
struct NotProjective : GhinvError {
  using GhinvError::GhinvError;
};
struct NotIntertwiner : GhinvError {
  using GhinvError::GhinvError;
};
struct RelationViolation : GhinvError {
  using GhinvError::GhinvError;
};
struct PropertyViolation : GhinvError {
  using GhinvError::GhinvError;
};
struct IllConditioned : GhinvError {
  using GhinvError::GhinvError;
};
struct Incompatible : GhinvError {
  using GhinvError::GhinvError;
};
struct NotAdmissible : GhinvError {
  using GhinvError::GhinvError;
};
struct MoveNotApplicable : GhinvError {
  using GhinvError::GhinvError;
};
struct FractionalResidue : GhinvError {
  using GhinvError::GhinvError;
};

// Parse errors carry a location (row/column of the offending diagram cell).
struct ParseError : GhinvError {
  int row = -1;
  int col = -1;
  ParseError(const std::string& msg, int r = -1, int c = -1)
      : GhinvError(r >= 0 ? msg + " (row " + std::to_string(r) +
                                (c >= 0 ? ", col " + std::to_string(c) : std::string()) + ")"
                          : msg),
        row(r),
        col(c) {}
};

}  // namespace ghinv
