#ifndef SABRGHQ_ERRORS_HPP
#define SABRGHQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sabrghq {

/// Raised when an argument lies outside the documented domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// An option price outside the no-arbitrage band of the Black-Scholes call,
/// so no implied volatility exists.
class BandError : public std::range_error {
 public:
  explicit BandError(const std::string& what) : std::range_error(what) {}
};

/// An iterative method failed to converge within its iteration budget.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool condition, const char* message) {
  if (!condition) throw DomainError(message);
}

}  // namespace detail
}  // namespace sabrghq

#endif  // SABRGHQ_ERRORS_HPP
