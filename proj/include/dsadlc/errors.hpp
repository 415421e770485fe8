#pragma once

#include <stdexcept>
#include <string>

namespace dsadlc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lookup of a vehicle or frame that does not exist in the recording.
class NotFound : public Error {
 public:
  using Error::Error;
};

// A trajectory window was requested with less history than it needs.
// Callers must skip the case, never pad.
class WindowUnderrun : public Error {
 public:
  using Error::Error;
};

// A dataset file is missing a column or carries a value outside the schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Structurally valid file whose content violates a track invariant.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Weight/case file container is corrupt, truncated, or version-mismatched.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class NonPositiveStartSpeed : public Error {
 public:
  using Error::Error;
};

class MissingTrajectory : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsadlc
