#pragma once

#include "mipdc/signal_io.hpp"
#include "mipdc/types.hpp"

#include <array>
#include <complex>
#include <vector>

namespace mipdc {

/// Direct-form IIR filter, normalized so that a[0] == 1. Designed filters
/// also carry second-order sections {b0, b1, b2, 1, a1, a2} whose product is
/// b / a; when present, filtering runs the cascade.
struct IirFilter {
    std::vector<double> b;
    std::vector<double> a;
    std::vector<std::array<double, 6>> sections;

    std::size_t order() const { return std::max(a.size(), b.size()) - 1; }

    /// H(e^{jw}) at w = 2*pi*f/fs.
    std::complex<double> response(double f_hz, double sample_rate_hz) const;
    /// Largest pole modulus; < 1 for a stable filter.
    double pole_radius() const;
};

/// Butterworth band-pass of prototype order `order` (the digital filter has
/// order 2*order), bilinear transform with pre-warped band edges.
IirFilter design_bandpass(double low_hz, double high_hz, double sample_rate_hz, int order);

/// Second-order notch with unit DC gain and a zero on the unit circle at center_hz.
IirFilter design_notch(double center_hz, double sample_rate_hz, double quality_q);

/// Single-pass causal filtering with optional initial state (transposed DF-II,
/// per section when sections are present; the state then holds two values per section).
VectorN lfilter(const IirFilter& filter, const ConstVecRefN& x, const VectorN* zi = nullptr);

/// Steady-state initial conditions for a unit step input, in the layout lfilter expects.
VectorN lfilter_zi(const IirFilter& filter);

/// Zero-phase forward-backward filtering with odd reflected padding of
/// 3 * max(len(a), len(b)) samples at each end.
VectorN filtfilt(const IirFilter& filter, const ConstVecRefN& signal);

struct PreprocessConfig {
    bool enabled = true;
    double bandpass_low_hz = 5.0;
    double bandpass_high_hz = 50.0;
    int bandpass_order = 4;
    double notch_center_hz = 50.0;
    double notch_q = 35.0;
    int decimate_factor = 1;
};

/// Band-pass then notch per channel, both zero-phase, then optional decimation.
Recording preprocess_recording(const Recording& rec, const PreprocessConfig& config);

}  // namespace mipdc
