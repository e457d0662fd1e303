#pragma once

#include <stdexcept>
#include <string>

namespace dispersive {

/// Invalid parameters, malformed configuration, or a violated precondition
/// that the caller controls.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A Field was used in the wrong representation (physical vs spectral).
class RepresentationError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Two fields (or a field and a coefficient set) live on different grids.
class GridMismatchError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The numerical state stopped being finite or exceeded the divergence bound.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Delay-history bookkeeping violation (misaligned push, uninitialized ring).
class HistoryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decay-rate fitting could not proceed (nonpositive samples, empty window).
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dispersive
