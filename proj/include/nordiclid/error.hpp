#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nordiclid {

// Process exit codes used by the command line tool.
enum class ExitCode : int {
  kOk = 0,
  kInput = 2,
  kConfig = 3,
  kNumerical = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Bad or missing input data.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ExitCode::kInput, what) {}
};

// Invalid parameters or incompatible configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ExitCode::kConfig, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ExitCode::kNumerical, what) {}
};

class InsufficientData : public InputError {
 public:
  InsufficientData(std::string label, std::size_t available, std::size_t requested)
      : InputError("insufficient data for label '" + label + "': " +
                   std::to_string(available) + " available, " +
                   std::to_string(requested) + " requested"),
        label(std::move(label)),
        available(available),
        requested(requested) {}
  std::string label;
  std::size_t available;
  std::size_t requested;
};

class MissingLabelFile : public InputError {
 public:
  explicit MissingLabelFile(std::string code)
      : InputError("missing input file for label '" + code + "'"), code(std::move(code)) {}
  std::string code;
};

class InvalidUtf8 : public InputError {
 public:
  InvalidUtf8(std::string file, std::size_t offset)
      : InputError("invalid UTF-8 in " + file + " at byte " + std::to_string(offset)),
        file(std::move(file)),
        offset(offset) {}
  std::string file;
  std::size_t offset;
};

class MalformedRow : public InputError {
 public:
  explicit MalformedRow(std::size_t line)
      : InputError("malformed row at line " + std::to_string(line)), line(line) {}
  std::size_t line;
};

class FileError : public InputError {
 public:
  explicit FileError(std::string path, const std::string& why = "cannot open")
      : InputError(why + ": " + path), path(std::move(path)) {}
  std::string path;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyVocabulary : public InputError {
 public:
  EmptyVocabulary() : InputError("vocabulary is empty") {}
};

class NegativeCount : public InputError {
 public:
  NegativeCount() : InputError("naive Bayes requires non-negative feature counts") {}
};

class SequenceTooShort : public InputError {
 public:
  SequenceTooShort() : InputError("token sequence is empty") {}
};

class TooFewPoints : public InputError {
 public:
  explicit TooFewPoints(std::size_t n, std::size_t required = 2)
      : InputError("at least " + std::to_string(required) + " points required, got " +
                   std::to_string(n)) {}
};

class InvalidRatio : public ConfigError {
 public:
  explicit InvalidRatio(double ratio)
      : ConfigError("split ratio must lie strictly between 0 and 1, got " +
                    std::to_string(ratio)) {}
};

class InvalidArgument : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DimensionMismatch : public ConfigError {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : ConfigError("dimension mismatch: expected " + std::to_string(expected) +
                    ", got " + std::to_string(got)) {}
};

class LengthMismatch : public ConfigError {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : ConfigError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class ConvergenceFailure : public NumericalError {
 public:
  ConvergenceFailure(std::size_t component, double residual)
      : NumericalError("power iteration did not converge for component " +
                       std::to_string(component) + " (residual " +
                       std::to_string(residual) + ")"),
        component(component),
        residual(residual) {}
  std::size_t component;
  double residual;
};

class PerplexityInfeasible : public NumericalError {
 public:
  PerplexityInfeasible(double perplexity, std::size_t n)
      : NumericalError("perplexity " + std::to_string(perplexity) +
                       " cannot be reached with " + std::to_string(n) + " points") {}
};

}  // namespace nordiclid
