#pragma once

#include <stdexcept>
#include <string>

namespace qwire {

// Argument errors use std::invalid_argument / std::out_of_range. The types
// below mark failures that callers are expected to tell apart.

/// A numerical routine (eigensolver, quadrature) did not converge.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Protocol parameters cannot be realised on the requested lattice.
class PlanningError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The minimal-wait search found no admissible wait.
class SearchFailure : public std::runtime_error {
  public:
    SearchFailure(const std::string& what, double best_t, double best_bound)
        : std::runtime_error(what), best_t_(best_t), best_bound_(best_bound) {}
    double best_wait() const { return best_t_; }
    double best_bound() const { return best_bound_; }

  private:
    double best_t_;
    double best_bound_;
};

/// Decoding region carries no weight of the arriving packet.
class DegenerateDecode : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Amplitude leaked out of the truncated Fock space.
class TruncationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(key) {}
    const std::string& key() const { return key_; }

  private:
    std::string key_;
};

}  // namespace qwire
