#pragma once

#include <stdexcept>
#include <string>

namespace wifidist {

/// Base class for all library errors.
class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad configuration or bad arguments supplied by the caller (CLI exit 2).
class UsageError : public Error {
  using Error::Error;
};

class InvalidConfig : public UsageError {
  using UsageError::UsageError;
};

/// Problems with input data or on-disk artifacts (CLI exit 3).
class DataError : public Error {
  using Error::Error;
};

class ParseError : public DataError {
  using DataError::DataError;
};

class EmptyDataset : public DataError {
  using DataError::DataError;
};

/// Thrown when clipping removes every reading of a fingerprint.
class EmptyAfterClip : public DataError {
  using DataError::DataError;
};

class VersionMismatch : public DataError {
  using DataError::DataError;
};

class CorruptModel : public DataError {
  using DataError::DataError;
};

/// Binary proximity labels collapsed to a single class.
class DegenerateLabels : public DataError {
  using DataError::DataError;
};

class EmptyEvalSet : public DataError {
  using DataError::DataError;
};

class LengthMismatch : public DataError {
  using DataError::DataError;
};

}  // namespace wifidist
