// Exception types shared by every module

#pragma once

#include <stdexcept>
#include <string>

namespace qep {

/// Invalid physical configuration, violation model, or file input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A first-order denominator vanishes (spin and oscillator levels cross).
class ResonanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested state sits too close to the truncation edge of the basis.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No exact eigenvector can be matched to the requested product state.
class AmbiguousStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qep
