#pragma once

#include <stdexcept>
#include <string>

namespace cotran {

// A usage/spec problem: bad dimensions, malformed input, unsupported variant.
struct SpecError : std::runtime_error {
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

// Matrix is not invertible at the requested tolerance.
struct SingularError : std::runtime_error {
  explicit SingularError(const std::string& what) : std::runtime_error(what) {}
};

// A constructor precondition check failed (morphism law, commutation,
// relation preservation, projector invariance, orthogonality, ...).
struct ConstructionError : std::runtime_error {
  explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical integration produced non-finite values.
struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, long long step)
      : std::runtime_error(what), step_index(step) {}
  long long step_index;
};

// Argument outside the sampled grid / window.
struct RangeError : std::runtime_error {
  explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};

// One of the completion checks (orthogonality, law, rank, invertibility,
// reconstruction) failed.
struct CompletionError : std::runtime_error {
  explicit CompletionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cotran
