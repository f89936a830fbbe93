#pragma once

#include <stdexcept>
#include <string>

namespace spicelab {

enum class ParseErrorCode {
  UnknownDevicePrefix,
  UndefinedModel,
  DuplicateDeviceName,
  MalformedNumber,
  MissingEnd,
  InvalidValue,
  SyntaxError,
};

inline const char* to_string(ParseErrorCode c) {
  switch (c) {
    case ParseErrorCode::UnknownDevicePrefix: return "UnknownDevicePrefix";
    case ParseErrorCode::UndefinedModel: return "UndefinedModel";
    case ParseErrorCode::DuplicateDeviceName: return "DuplicateDeviceName";
    case ParseErrorCode::MalformedNumber: return "MalformedNumber";
    case ParseErrorCode::MissingEnd: return "MissingEnd";
    case ParseErrorCode::InvalidValue: return "InvalidValue";
    case ParseErrorCode::SyntaxError: return "SyntaxError";
  }
  return "ParseError";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorCode code, int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + to_string(code) + ": " + what),
        code_(code),
        line_(line) {}
  ParseErrorCode code() const { return code_; }
  int line() const { return line_; }

 private:
  ParseErrorCode code_;
  int line_;
};

enum class SimErrorKind {
  NonConvergence,
  SingularMatrix,
  UnknownSource,
  InvalidSweep,
  UnknownSignal,
  WindowOutOfRange,
  WriteFailed,
  NoUnityGainPoint,
  DegenerateLobes,
  BadPlan,
};

inline const char* to_string(SimErrorKind k) {
  switch (k) {
    case SimErrorKind::NonConvergence: return "NonConvergence";
    case SimErrorKind::SingularMatrix: return "SingularMatrix";
    case SimErrorKind::UnknownSource: return "UnknownSource";
    case SimErrorKind::InvalidSweep: return "InvalidSweep";
    case SimErrorKind::UnknownSignal: return "UnknownSignal";
    case SimErrorKind::WindowOutOfRange: return "WindowOutOfRange";
    case SimErrorKind::WriteFailed: return "WriteFailed";
    case SimErrorKind::NoUnityGainPoint: return "NoUnityGainPoint";
    case SimErrorKind::DegenerateLobes: return "DegenerateLobes";
    case SimErrorKind::BadPlan: return "BadPlan";
  }
  return "SimError";
}

class SimError : public std::runtime_error {
 public:
  SimError(SimErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  SimErrorKind kind() const { return kind_; }

 private:
  SimErrorKind kind_;
};

}  // namespace spicelab
