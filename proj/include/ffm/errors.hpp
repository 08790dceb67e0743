#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ffm {

// Precondition violated by a caller-supplied argument (wrong degree, zero
// divisor, out-of-range h, principal character where a non-principal one is
// required, ...).
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class FieldMismatch : public DomainError {
  public:
    FieldMismatch() : DomainError("polynomials live over different fields") {}
};

class DivisionByZero : public DomainError {
  public:
    DivisionByZero() : DomainError("division by the zero polynomial") {}
};

// zeta_A evaluated at one of its poles.
class PoleError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

  private:
    std::size_t position_;
};

// Invalid experiment configuration; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace ffm
