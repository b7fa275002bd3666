#pragma once

#include <stdexcept>
#include <string>

namespace vpoly {

/// Machine-readable failure classes. Each maps to a CLI exit code:
/// validation-type errors exit 1, size caps exit 2, verification
/// failures exit 3.
enum class errc {
  // validation (exit 1)
  kind_mismatch,
  unknown_vertex,
  unknown_edge,
  loop_contraction,
  duplicate_id,
  dangling_endpoint,
  mixed_weight_kinds,
  parse_error,
  missing_variable,
  zero_alpha,
  non_positive_weight,
  non_constant_j,
  non_integer_multiplier,
  spec_mismatch,
  zero_partition,
  inexact_field,
  inexact_edge_weight,
  truncation_violation,
  range_warning,
  degenerate_transform,
  division_by_zero,
  // resource limits (exit 2)
  too_large,
  // cross-validation (exit 3)
  verification_failure,
  // should-not-happen consistency checks
  internal_check,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::kind_mismatch: return "KindMismatch";
    case errc::unknown_vertex: return "UnknownVertex";
    case errc::unknown_edge: return "UnknownEdge";
    case errc::loop_contraction: return "LoopContraction";
    case errc::duplicate_id: return "DuplicateId";
    case errc::dangling_endpoint: return "DanglingEndpoint";
    case errc::mixed_weight_kinds: return "MixedWeightKinds";
    case errc::parse_error: return "ParseError";
    case errc::missing_variable: return "MissingVariable";
    case errc::zero_alpha: return "ZeroAlpha";
    case errc::non_positive_weight: return "NonPositiveWeight";
    case errc::non_constant_j: return "NonConstantJ";
    case errc::non_integer_multiplier: return "NonIntegerMultiplier";
    case errc::spec_mismatch: return "SpecMismatch";
    case errc::zero_partition: return "ZeroPartition";
    case errc::inexact_field: return "InexactField";
    case errc::inexact_edge_weight: return "InexactEdgeWeight";
    case errc::truncation_violation: return "TruncationViolation";
    case errc::range_warning: return "RangeWarning";
    case errc::degenerate_transform: return "DegenerateTransform";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::too_large: return "TooLarge";
    case errc::verification_failure: return "VerificationFailure";
    case errc::internal_check: return "InternalCheck";
  }
  return "UnknownError";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  errc code() const noexcept { return code_; }

  /// CLI exit code for this error class.
  int exit_code() const noexcept {
    switch (code_) {
      case errc::too_large: return 2;
      case errc::verification_failure: return 3;
      default: return 1;
    }
  }

 private:
  errc code_;
};

[[noreturn]] inline void throw_error(errc code, const std::string& what) {
  throw error(code, what);
}

}  // namespace vpoly
