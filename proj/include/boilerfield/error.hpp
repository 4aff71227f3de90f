#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boilerfield {

/// Base for every error raised by the library. `exit_code()` is the process
/// exit status the CLI reports for it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
};

/// Invalid command line or configuration.
class UsageError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
};

class IngestError : public Error {
 public:
  enum class Kind { Encoding, Io };

  IngestError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class LoadError : public Error {
 public:
  enum class Kind { DimMismatch, BadFloat, Empty, Io };

  LoadError(Kind kind, std::size_t line, const std::string& what)
      : Error(what), kind_(kind), line_(line) {}
  Kind kind() const noexcept { return kind_; }
  /// 1-based line number; 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

class GraphError : public Error {
 public:
  enum class Kind { Dim, BadSigma, Empty };

  GraphError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class SeedError : public Error {
 public:
  enum class Kind { Empty, Coverage, BadFraction, BadRules };

  SeedError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class EvalError : public Error {
 public:
  enum class Kind { NoOverlap, Empty, Schema, PageMismatch };

  EvalError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Raised for malformed JSON documents (truth, prediction, rule files).
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace boilerfield
