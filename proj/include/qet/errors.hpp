#pragma once

#include <stdexcept>
#include <string>

namespace qet {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonHermitianInput : public Error {
public:
  explicit NonHermitianInput(double residual)
      : Error("NonHermitianInput: max|M - M^dagger| = " + std::to_string(residual)),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

class InvalidParams : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class NotNormalized : public Error {
public:
  explicit NotNormalized(double norm)
      : Error("NotNormalized: |psi| = " + std::to_string(norm)), norm_(norm) {}
  double norm() const noexcept { return norm_; }

private:
  double norm_;
};

enum class Constraint { normalization, balance, completeness, commutation, weights };

inline const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::normalization: return "normalization";
    case Constraint::balance: return "balance";
    case Constraint::completeness: return "completeness";
    case Constraint::commutation: return "commutation";
    case Constraint::weights: return "weights";
  }
  return "unknown";
}

class ConstraintViolation : public Error {
public:
  ConstraintViolation(Constraint which, double residual)
      : Error(std::string("ConstraintViolation(") + to_string(which) +
              "): residual " + std::to_string(residual)),
        which_(which), residual_(residual) {}
  Constraint which() const noexcept { return which_; }
  double residual() const noexcept { return residual_; }

private:
  Constraint which_;
  double residual_;
};

class IndexOutOfRange : public Error {
public:
  using Error::Error;
};

class DegenerateOutcome : public Error {
public:
  using Error::Error;
};

class PolicyMismatch : public Error {
public:
  using Error::Error;
};

}  // namespace qet
