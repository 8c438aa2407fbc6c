#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace oralab {

enum class ErrorCode {
  InvalidArgument,
  GridMismatch,
  InsufficientMass,
  InfeasibleCut,
  DeltaTooLarge,
  SandwichViolation,
  ValidityWindowExceeded,
  PopulationUnderflow,
  CouplingPreconditionViolated,
  NoSnapshotAtTime,
  SupportEscapesGrid,
  EmptyWindow,
  InvalidConfig,
  InvariantViolation,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Non-fatal numerical conditions. They are routed through a process-wide
// handler so a harness can log them or escalate them (strict mode).
enum class WarningKind {
  KernelWiderThanDomain,
  TruncationLoss,
  SlabClipped,
  SupportDiagnostic,
};

const char* to_string(WarningKind kind);

struct Warning {
  WarningKind kind;
  std::string message;
  double value = 0.0;
};

using WarningHandler = std::function<void(const Warning&)>;

// Returns the previously installed handler. An empty handler silences warnings.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(WarningKind kind, const std::string& message, double value = 0.0);

class ScopedWarningHandler {
 public:
  explicit ScopedWarningHandler(WarningHandler handler)
      : previous_(set_warning_handler(std::move(handler))) {}
  ~ScopedWarningHandler() { set_warning_handler(std::move(previous_)); }
  ScopedWarningHandler(const ScopedWarningHandler&) = delete;
  ScopedWarningHandler& operator=(const ScopedWarningHandler&) = delete;

 private:
  WarningHandler previous_;
};

}  // namespace oralab
