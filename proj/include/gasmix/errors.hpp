#ifndef GASMIX_ERRORS_HPP
#define GASMIX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gasmix {

/// Base class for all solver-domain errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Compressibility factor evaluated to a non-positive value; the pressure is
/// outside the model's validity range.
struct NonPositiveZ : Error { using Error::Error; };

/// Target potential value lies outside the attainable range of F on the
/// search bracket (no subsonic solution, e.g. pressure collapse on a pipe).
struct NoBracket : Error { using Error::Error; };

/// A pipe state left the subsonic domain.
struct SubsonicViolation : Error { using Error::Error; };

/// Node loads do not sum to zero.
struct Unbalanced : Error { using Error::Error; };

/// A node has zero mixing throughput but downstream edges carry flow.
struct ZeroThroughput : Error { using Error::Error; };

/// Negative flow through a compressor station.
struct CompressorBackflow : Error { using Error::Error; };

/// Network has more than one independent cycle.
struct MultipleCycles : Error { using Error::Error; };

/// Requested cut edge does not lie on the cycle.
struct NotACycleEdge : Error { using Error::Error; };

/// Compressor edges have a fixed flow direction and cannot be flipped.
struct CannotFlipCompressor : Error { using Error::Error; };

/// The selected cut edge is a compressor (excluded by the placement rules).
struct CutThroughCompressor : Error { using Error::Error; };

/// The cut residual g does not change sign over the admissible interval.
struct SignConditionFailed : Error { using Error::Error; };

/// Outer boundary-condition iteration did not converge.
struct NoConvergence : Error { using Error::Error; };

/// Input sequence of wrapped partial sums does not sum to zero.
struct NotZeroSum : Error { using Error::Error; };

/// Malformed network document.
struct ParseError : Error { using Error::Error; };

/// Structurally parsed network violates model invariants.
struct ValidationError : Error { using Error::Error; };

/// Edge id not present in the network.
struct UnknownEdge : Error { using Error::Error; };

/// Filesystem-level failure (missing input, unwritable output).
struct IoError : Error { using Error::Error; };

} // namespace gasmix

#endif
