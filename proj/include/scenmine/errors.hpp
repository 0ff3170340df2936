#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scenmine/common.hpp"

namespace scenmine {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- input data -------------------------------------------------------------

class SchemaError : public Error {
 public:
  SchemaError(std::string column, const std::string& message)
      : Error(message), column_(std::move(column)) {}
  [[nodiscard]] const std::string& column() const { return column_; }

 private:
  std::string column_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& message)
      : Error("row " + std::to_string(row) + ": " + message), row_(row) {}
  /// 1-based line number in the source file (the header is line 1).
  [[nodiscard]] std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class IntegrityError : public Error {
 public:
  IntegrityError(VehicleId id, const std::string& message)
      : Error("vehicle " + std::to_string(id) + ": " + message), id_(id) {}
  [[nodiscard]] VehicleId vehicle_id() const { return id_; }

 private:
  VehicleId id_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

// ---- activity / position ----------------------------------------------------

class UndecidableDirectionError : public Error {
 public:
  using Error::Error;
};

class AmbiguityError : public Error {
 public:
  AmbiguityError(std::vector<FrameIndex> frames, const std::string& message)
      : Error(message), frames_(std::move(frames)) {}
  [[nodiscard]] const std::vector<FrameIndex>& frames() const { return frames_; }

 private:
  std::vector<FrameIndex> frames_;
};

class EmptyWindowError : public Error {
 public:
  using Error::Error;
};

// ---- scenario query ---------------------------------------------------------

/// Base for everything that makes a language-model answer unusable.
class ResponseFormatError : public Error {
 public:
  using Error::Error;
};

class MalformedResponseError : public ResponseFormatError {
 public:
  using ResponseFormatError::ResponseFormatError;
};

class VocabularyError : public ResponseFormatError {
 public:
  VocabularyError(std::string label, const std::string& message)
      : ResponseFormatError(message), label_(std::move(label)) {}
  [[nodiscard]] const std::string& label() const { return label_; }

 private:
  std::string label_;
};

class StructureError : public ResponseFormatError {
 public:
  using ResponseFormatError::ResponseFormatError;
};

class ValidationError : public ResponseFormatError {
 public:
  ValidationError(std::vector<std::string> violations, const std::string& message)
      : ResponseFormatError(message), violations_(std::move(violations)) {}
  [[nodiscard]] const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class InterpretationError : public Error {
 public:
  using Error::Error;
};

// ---- remote provider --------------------------------------------------------

class TransportError : public Error {
 public:
  using Error::Error;
};

class CredentialError : public Error {
 public:
  using Error::Error;
};

class ProviderError : public Error {
 public:
  ProviderError(const std::string& message, std::string last_raw_response)
      : Error(message), last_raw_(std::move(last_raw_response)) {}
  [[nodiscard]] const std::string& last_raw_response() const { return last_raw_; }

 private:
  std::string last_raw_;
};

// ---- metrics / export -------------------------------------------------------

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ExportError : public Error {
 public:
  using Error::Error;
};

}  // namespace scenmine
