#pragma once

namespace engset {

/// A space-time harmonicity residual: |net| together with the sum of the
/// magnitudes of the terms that were combined, so callers can judge it
/// against the size of what cancelled.
struct Residual {
    double absolute = 0.0;
    double scale = 0.0;

    double relative() const { return scale == 0.0 ? absolute : absolute / scale; }
};

} // namespace engset
