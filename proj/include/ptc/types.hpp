#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace ptc {

// Working precision. On x86-64 this is the 80-bit extended format.
using real = long double;
using cplx = std::complex<real>;

inline constexpr real pi = 3.141592653589793238462643383279502884L;
inline constexpr real two_pi = 2 * pi;

enum class Formulation { inner, outer };

/// Base of every numerical failure raised by the library.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSeriesError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BranchPointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Raised when a ray or trajectory comes within the pole tolerance of a b_j.
class NearPoleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TracingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AmbiguousStartError : public TracingError {
 public:
  using TracingError::TracingError;
};

class TopologyMismatchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InfeasibleGeometryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Reduces an angle to [0, 2π).
inline real wrap_angle(real a) {
  a = std::fmod(a, two_pi);
  if (a < 0) a += two_pi;
  return a;
}

}  // namespace ptc
