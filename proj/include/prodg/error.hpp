#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prodg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed document text. `position` is the byte offset reported by the reader.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Well-formed document that violates the procedure / tree constraints.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Edit script failure; `op_index` is the zero-based index of the failing op.
class EditError : public Error {
 public:
  EditError(const std::string& what, std::size_t op_index)
      : Error(what), op_index_(op_index) {}
  std::size_t op_index() const noexcept { return op_index_; }

 private:
  std::size_t op_index_;
};

class DegenerateRegionError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace prodg
