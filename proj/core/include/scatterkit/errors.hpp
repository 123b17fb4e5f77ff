#pragma once

#include <stdexcept>
#include <string>

namespace scatterkit {

/// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid model parameters (n < 2, flux outside (0,pi), zero potential, ...).
class InvalidParams : public Error {
public:
  using Error::Error;
};

/// An energy coincided with a threshold within machine tolerance.
class ThresholdEnergy : public Error {
public:
  using Error::Error;
};

/// The boundary-value matrix could not be inverted at this energy; this is the
/// signature of an eigenvalue of the perturbed operator (or numerical proximity
/// to one).
class SingularAtEnergy : public Error {
public:
  using Error::Error;
};

/// Requested an out-of-band evaluation with an in-band energy.
class InsideBand : public Error {
public:
  using Error::Error;
};

/// An epsilon-ladder limit failed to stabilise.
class NonConvergent : public Error {
public:
  using Error::Error;
};

/// Adaptive phase tracking hit the minimum step with a phase jump still >= pi/4.
class PhaseJump : public Error {
public:
  using Error::Error;
};

/// A sign change of the eigenvalue condition touched the search boundary.
class BracketAtBoundary : public Error {
public:
  using Error::Error;
};

/// Truncated-lattice counts at L and 2L disagree.
class Unstable : public Error {
public:
  using Error::Error;
};

/// Closed-form branch evaluated outside its interval.
class OutOfBranch : public Error {
public:
  using Error::Error;
};

} // namespace scatterkit
