// Error taxonomy for the vrjplab library.
//
// All library errors derive from vrjplab::Error so callers can catch one
// base type; specific types distinguish precondition violations that tests
// assert on (graph construction, positive-definiteness, configuration).
#pragma once

#include <stdexcept>
#include <string>

namespace vrjplab {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid graph construction or quotient request (duplicate edge, self-loop,
// nonpositive weight, disconnected input, bad merge set, ...).
struct GraphError : Error {
  explicit GraphError(const std::string& msg) : Error(msg) {}
};

// A symmetric factorization failed: the matrix is not positive definite.
// Samplers rely on this to surface violations of the H > 0 support condition.
struct NotPositiveDefiniteError : Error {
  explicit NotPositiveDefiniteError(const std::string& msg) : Error(msg) {}
};

// Dimension mismatch between related containers (weight matrix vs eta, ...).
struct DimensionError : Error {
  explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// Invalid experiment / CLI / suite configuration (zero replicates, bad
// weight ordering, malformed config file, ...).
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace vrjplab
