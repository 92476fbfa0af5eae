#pragma once

#include <stdexcept>
#include <string>

namespace hsm5 {

enum class ErrorKind {
  Domain,            // parameter outside a surface domain or grid
  SingularGeometry,  // degenerate tangent plane or fundamental form
  FrameUndefined,    // feed direction parallel to the surface normal
  AxisSingularity,   // tool axis parallel to normal with R > 0
  NoOverlap,         // step-over too large for the effective profiles
  UnreachablePose,   // no rotary solution inside the A range
  Config,            // job configuration parse/validation failure
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class GeometryError : public Error {
 public:
  GeometryError(ErrorKind kind, const std::string& what) : Error(kind, what) {}
};

class UnreachablePoseError : public Error {
 public:
  explicit UnreachablePoseError(const std::string& what) : Error(ErrorKind::UnreachablePose, what) {}
};

/// Carries the 1-based line/column of the offending node when known (0 otherwise).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0)
      : Error(ErrorKind::Config, what), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Process exit code for an error kind (CLI contract).
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
      return 2;
    case ErrorKind::UnreachablePose:
      return 4;
    case ErrorKind::Io:
      return 1;
    default:
      return 3;
  }
}

}  // namespace hsm5
