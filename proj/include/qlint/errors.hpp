#pragma once

#include <stdexcept>
#include <string>

namespace qlint {

/// Parse failure in the analyzed source. Carries a 1-based location.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string message, int line, int col)
      : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(col) +
                           ": " + message),
        line_(line),
        col_(col),
        detail_(std::move(message)) {}

  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& detail() const { return detail_; }

 private:
  int line_;
  int col_;
  std::string detail_;
};

/// Transport or service failure from an external provider, after retries.
class ProviderError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The model reply could not be parsed into findings.
class MalformedResponse : public std::runtime_error {
 public:
  MalformedResponse(const std::string& message, std::string body)
      : std::runtime_error(message), body_(std::move(body)) {}

  const std::string& body() const { return body_; }

 private:
  std::string body_;
};

/// An assembled prompt does not fit the configured model context.
class ContextOverflow : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class EmptyIndex : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class OutOfRange : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class EmbedderError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The target file lacks the structure a fault-injection pattern needs.
class NotInjectable : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qlint
