#pragma once
#include <stdexcept>
#include <string>

namespace stretchlat {

// Malformed user input: body spec text, invalid request fields, dimension
// mismatches, non-finite coordinates.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The request is well formed but the work would exceed a hard capacity limit
// (lattice range outside int64, event/evaluation budget).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical procedure failed to reach its stated tolerance (root bracketing,
// quadrature refinement, internal re-verification).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Boundary analysis detected an inconsistency: odd derivative that should
// vanish by symmetry, flag not exhausted at the certified order, strategy
// disagreement.
struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config file problems; message carries the 1-based line number.
struct ConfigError : std::runtime_error {
  int line = 0;
  ConfigError(const std::string& msg, int line_number)
      : std::runtime_error("config line " + std::to_string(line_number) + ": " + msg),
        line(line_number) {}
};

}  // namespace stretchlat
