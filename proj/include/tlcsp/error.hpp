#pragma once

#include <stdexcept>
#include <string>

namespace tlcsp {

enum class ErrorKind {
  config,
  format,
  label,
  io,
  dimension,
  empty_class,
  zero_weight,
  degenerate,
  conditioning,
  insufficient_data,
  affinity,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config error";
    case ErrorKind::format: return "format error";
    case ErrorKind::label: return "label error";
    case ErrorKind::io: return "I/O error";
    case ErrorKind::dimension: return "dimension error";
    case ErrorKind::empty_class: return "empty-class error";
    case ErrorKind::zero_weight: return "zero-weight error";
    case ErrorKind::degenerate: return "degenerate-input error";
    case ErrorKind::conditioning: return "conditioning error";
    case ErrorKind::insufficient_data: return "insufficient-data error";
    case ErrorKind::affinity: return "affinity error";
  }
  return "error";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

/// 2 config, 3 data format, 4 numerical failure.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::format:
    case ErrorKind::label:
    case ErrorKind::io:
      return 3;
    case ErrorKind::degenerate:
    case ErrorKind::conditioning:
    case ErrorKind::affinity:
      return 4;
    default:
      return 2;
  }
}

}  // namespace tlcsp
