#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace wannier1d {

/// Machine-readable failure categories. The harness reports these by name.
enum class ErrorKind {
  invalid_argument,
  degenerate_band,
  ill_conditioned,
  orthogonal_neighbors,
  no_reliable_component,
  gauge_not_applied,
  missing_derivatives,
  config,
  io,
};

const char* to_string(ErrorKind kind);

/// Base class for all solver failures. Carries the quasimomentum and band
/// index at which the failure happened when those are meaningful.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<double> k = std::nullopt,
        std::optional<int> band = std::nullopt)
      : std::runtime_error(what), kind_(kind), k_(k), band_(band) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> k() const noexcept { return k_; }
  std::optional<int> band() const noexcept { return band_; }

 private:
  ErrorKind kind_;
  std::optional<double> k_;
  std::optional<int> band_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::invalid_argument, what) {}
};

/// The requested eigenvalue is not simple (isolated-band assumption broken).
class DegenerateBand : public Error {
 public:
  DegenerateBand(const std::string& what, double k, int band)
      : Error(ErrorKind::degenerate_band, what, k, band) {}
};

/// The shifted operator has more than one near-null singular value.
class IllConditioned : public Error {
 public:
  IllConditioned(const std::string& what, double k,
                 std::optional<int> band = std::nullopt)
      : Error(ErrorKind::ill_conditioned, what, k, band) {}
};

class OrthogonalNeighbors : public Error {
 public:
  OrthogonalNeighbors(const std::string& what, double k)
      : Error(ErrorKind::orthogonal_neighbors, what, k) {}
};

class NoReliableComponent : public Error {
 public:
  explicit NoReliableComponent(const std::string& what)
      : Error(ErrorKind::no_reliable_component, what) {}
};

}  // namespace wannier1d
