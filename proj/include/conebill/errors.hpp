#pragma once

#include <stdexcept>
#include <string>

namespace conebill {

class BilliardsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class ContractViolation : public BilliardsError {
 public:
  using BilliardsError::BilliardsError;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public BilliardsError {
 public:
  using BilliardsError::BilliardsError;
};

/// Incidence so close to tangential that the reflection law is ill-conditioned.
class GrazingError : public BilliardsError {
 public:
  using BilliardsError::BilliardsError;
};

class ToleranceError : public BilliardsError {
 public:
  using BilliardsError::BilliardsError;
};

class ConstructionError : public BilliardsError {
 public:
  using BilliardsError::BilliardsError;
};

class C2CheckFailure : public BilliardsError {
 public:
  using BilliardsError::BilliardsError;
};

class ConvexityFailure : public BilliardsError {
 public:
  using BilliardsError::BilliardsError;
};

class ReplayFailure : public BilliardsError {
 public:
  ReplayFailure(const std::string& what, long first_failing_index)
      : BilliardsError(what), first_failing_index_(first_failing_index) {}

  long first_failing_index() const noexcept { return first_failing_index_; }

 private:
  long first_failing_index_;
};

}  // namespace conebill
