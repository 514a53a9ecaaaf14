#pragma once

#include <stdexcept>
#include <string>

namespace shrinkreg {

/// Malformed or inconsistent input data (CSV ingestion, panel validation).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An estimator is not defined on the given data, e.g. a non-positive
/// variance component. Carries the offending quantity and its value so the
/// CLI can report it verbatim.
class EstimatorUndefined : public std::runtime_error {
 public:
  EstimatorUndefined(const std::string& what, std::string quantity, double value)
      : std::runtime_error(what), quantity_(std::move(quantity)), value_(value) {}

  const std::string& quantity() const noexcept { return quantity_; }
  double value() const noexcept { return value_; }

 private:
  std::string quantity_;
  double value_;
};

/// Regressor matrix is rank deficient.
class SingularDesign : public EstimatorUndefined {
 public:
  explicit SingularDesign(const std::string& what)
      : EstimatorUndefined(what, "design rank", 0.0) {}
};

}  // namespace shrinkreg
