#pragma once

#include <stdexcept>
#include <string>

namespace relnewt {

/** Base class for all solver and validation failures thrown by this library. */
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/** A direction vector with zero length was passed where a direction is required. */
struct ZeroDirection : Error { using Error::Error; };

/** The adaptive integrator could not take an acceptable step (step size underflow). */
struct StepFailure : Error { using Error::Error; };

/** A terminal event did not occur before the time cap. */
struct EventNotFound : Error { using Error::Error; };

/** An iterative solver exhausted its iteration budget without meeting its tolerance. */
struct NoConvergence : Error { using Error::Error; };

/** Two distinct solutions of a two point problem were found; the energy is too low
    for the data map to be single valued. */
struct NonUnique : Error { using Error::Error; };

/** A trajectory failed to leave a bounded region before the time cap. */
struct TrappedOrbit : Error { using Error::Error; };

/** The requested line does not cross the region transversally, so no chord exists. */
struct NoChord : Error { using Error::Error; };

/** The energy does not exceed c^2 + V at the evaluation point, the kinematics
    are undefined there. */
struct BelowShell : Error { using Error::Error; };

/** A curve left the region a field is restricted to. */
struct LeftDomain : Error { using Error::Error; };

/** Two gridded fields that must share a grid do not. */
struct GridMismatch : Error { using Error::Error; };

/** The bisection for the smallest admissible energy failed at the top of the range. */
struct ThresholdNotFound : Error { using Error::Error; };

/** A dataset file does not match its declared column schema. */
struct SchemaMismatch : Error { using Error::Error; };

/** An experiment configuration failed validation. */
struct ConfigError : Error { using Error::Error; };

} // namespace relnewt
