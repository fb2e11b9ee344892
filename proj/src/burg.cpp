#include "mipdc/burg.hpp"

#include "mipdc/errors.hpp"

#include <cmath>

namespace mipdc {

BurgModel burg_fit(const ConstVecRefN& signal, int order) {
    require(order >= 1, "Burg order must be >= 1");
    const Index n = signal.size();
    if (n <= 2 * order)
        throw LengthError("Burg fit of order " + std::to_string(order) + " needs more than " +
                          std::to_string(2 * order) + " samples, got " + std::to_string(n));

    VectorN f = signal.array() - signal.mean();
    VectorN b = f;
    double err = f.squaredNorm() / static_cast<double>(n);
    if (!(err > 0.0)) throw DegenerateSignalError("signal is constant; zero prediction error at order 0");

    BurgModel model;
    model.ar_coeffs = VectorN::Zero(0);
    model.reflection_coeffs = VectorN::Zero(order);
    for (Index m = 1; m <= order; ++m) {
        // Stage m pairs forward error f(t) with backward error b(t - 1), t = m..n-1.
        const auto fw = f.segment(m, n - m);
        const auto bw = b.segment(m - 1, n - m);
        const double num = 2.0 * fw.dot(bw);
        const double den = fw.squaredNorm() + bw.squaredNorm();
        const double k = den > 0.0 ? num / den : 0.0;

        const VectorN f_next = fw - k * bw;
        const VectorN b_next = bw - k * fw;
        f.segment(m, n - m) = f_next;
        b.segment(m, n - m) = b_next;

        VectorN a(m);
        for (Index i = 0; i < m - 1; ++i) a[i] = model.ar_coeffs[i] - k * model.ar_coeffs[m - 2 - i];
        a[m - 1] = k;
        model.ar_coeffs = std::move(a);
        model.reflection_coeffs[m - 1] = k;
        err *= (1.0 - k * k);
    }
    model.noise_var = std::max(err, 0.0);
    return model;
}

int select_order_reflection(const ConstVecRefN& signal, int scan_order, double decay_threshold) {
    require(scan_order >= 2, "reflection scan order must be >= 2");
    require(decay_threshold > 0.0 && decay_threshold < 1.0, "decay threshold must lie in (0, 1)");
    const auto model = burg_fit(signal, scan_order);
    for (Index m = scan_order; m >= 1; --m)
        if (std::abs(model.reflection_coeffs[m - 1]) >= decay_threshold) return static_cast<int>(m);
    return 1;
}

VectorN burg_psd(const BurgModel& model, const std::vector<double>& freqs_hz, double sample_rate_hz) {
    require(sample_rate_hz > 0.0, "sample rate must be positive");
    const double nyquist = sample_rate_hz / 2.0;
    VectorN psd(static_cast<Index>(freqs_hz.size()));
    for (std::size_t q = 0; q < freqs_hz.size(); ++q) {
        const double f = freqs_hz[q];
        if (!(f >= 0.0 && f < nyquist))
            throw RangeError("PSD frequency " + std::to_string(f) + " Hz outside [0, Nyquist = " +
                             std::to_string(nyquist) + " Hz)");
        const double w = 2.0 * std::numbers::pi * f / sample_rate_hz;
        std::complex<double> poly = 1.0;
        for (Index k = 0; k < model.ar_coeffs.size(); ++k)
            poly -= model.ar_coeffs[k] * std::polar(1.0, -w * static_cast<double>(k + 1));
        psd[static_cast<Index>(q)] = model.noise_var / (sample_rate_hz * std::norm(poly));
    }
    return psd;
}

}  // namespace mipdc
