#include "oralab/error.hpp"

#include <iostream>
#include <mutex>

namespace oralab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InsufficientMass: return "InsufficientMass";
    case ErrorCode::InfeasibleCut: return "InfeasibleCut";
    case ErrorCode::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorCode::SandwichViolation: return "SandwichViolation";
    case ErrorCode::ValidityWindowExceeded: return "ValidityWindowExceeded";
    case ErrorCode::PopulationUnderflow: return "PopulationUnderflow";
    case ErrorCode::CouplingPreconditionViolated: return "CouplingPreconditionViolated";
    case ErrorCode::NoSnapshotAtTime: return "NoSnapshotAtTime";
    case ErrorCode::SupportEscapesGrid: return "SupportEscapesGrid";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

const char* to_string(WarningKind kind) {
  switch (kind) {
    case WarningKind::KernelWiderThanDomain: return "KernelWiderThanDomain";
    case WarningKind::TruncationLoss: return "TruncationLoss";
    case WarningKind::SlabClipped: return "SlabClipped";
    case WarningKind::SupportDiagnostic: return "SupportDiagnostic";
  }
  return "Unknown";
}

namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler_slot() {
  static WarningHandler h = [](const Warning& w) {
    std::cerr << "oralab warning [" << to_string(w.kind) << "]: " << w.message
              << '\n';
  };
  return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(handler_mutex());
  WarningHandler previous = std::move(handler_slot());
  handler_slot() = std::move(handler);
  return previous;
}

void warn(WarningKind kind, const std::string& message, double value) {
  WarningHandler h;
  {
    std::lock_guard<std::mutex> lock(handler_mutex());
    h = handler_slot();
  }
  if (h) h(Warning{kind, message, value});
}

}  // namespace oralab
