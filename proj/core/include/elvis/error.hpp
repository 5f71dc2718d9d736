#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace elvis {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dialog engine.
class MachineDefinitionError : public Error { using Error::Error; };
class UnmatchedFrameError : public Error { using Error::Error; };
class PreconditionError : public Error { using Error::Error; };

// Mailbox.
class MailboxFormatError : public Error { using Error::Error; };
class StatusTransitionError : public Error { using Error::Error; };
class UnknownMessageError : public Error { using Error::Error; };

// Evaluation.
class UndefinedMetricError : public Error { using Error::Error; };
class SchemaError : public Error { using Error::Error; };
class SingularDesignError : public Error {
 public:
  SingularDesignError(const std::string& what, std::vector<std::string> columns)
      : Error(what), columns_(std::move(columns)) {}
  /// Columns whose pivot vanished, in design order.
  const std::vector<std::string>& columns() const { return columns_; }

 private:
  std::vector<std::string> columns_;
};
class UnbalancedDesignError : public Error { using Error::Error; };
class NormalizationError : public Error { using Error::Error; };

// Files.
class LogFormatError : public Error { using Error::Error; };

class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace elvis
