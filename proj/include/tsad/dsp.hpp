#pragma once

#include <vector>

namespace tsad {

// IIR filter in transfer-function form, a[0] == 1.
struct FilterCoeffs {
    std::vector<double> b;
    std::vector<double> a;
};

// Chebyshev type I digital low-pass (bilinear transform of the analog
// prototype), normalized to exactly unit gain at DC. `cutoff` is a
// fraction of the Nyquist frequency, 0 < cutoff < 1.
FilterCoeffs cheby1_lowpass(int order, double ripple_db, double cutoff);

// Direct-form II transposed difference equation with initial state zi
// (may be empty for zero initial conditions).
std::vector<double> lfilter(const FilterCoeffs& f, const std::vector<double>& x,
                            const std::vector<double>& zi);

// Steady-state initial conditions for a unit step input.
std::vector<double> lfilter_zi(const FilterCoeffs& f);

// Zero-phase filtering: odd-reflection padding of 3*(filter length) samples
// on both ends, forward pass, backward pass, padding removed. Requires
// x.size() > 3*max(b.size(), a.size()).
std::vector<double> filtfilt(const FilterCoeffs& f, const std::vector<double>& x);

// Minimum input length filtfilt accepts for this filter, exclusive bound.
std::size_t filtfilt_min_length(const FilterCoeffs& f);

}  // namespace tsad
