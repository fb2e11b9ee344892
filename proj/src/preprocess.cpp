#include "mipdc/preprocess.hpp"

#include "mipdc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mipdc {

namespace {

using cplx = std::complex<double>;

// Expands prod (z - r_k) into real coefficients, highest power first.
std::vector<double> poly_from_roots(const std::vector<cplx>& roots) {
    std::vector<cplx> c{1.0};
    for (const auto& r : roots) {
        std::vector<cplx> next(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k] += c[k];
            next[k + 1] -= r * c[k];
        }
        c = std::move(next);
    }
    std::vector<double> out(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) out[k] = c[k].real();
    return out;
}

void check_edge(double f_hz, double sample_rate_hz, const char* what) {
    if (!(f_hz > 0.0 && f_hz < sample_rate_hz / 2.0))
        throw DesignError(std::string(what) + " " + std::to_string(f_hz) + " Hz is outside (0, Nyquist = " +
                          std::to_string(sample_rate_hz / 2.0) + " Hz)");
}

}  // namespace

cplx IirFilter::response(double f_hz, double sample_rate_hz) const {
    const double w = 2.0 * std::numbers::pi * f_hz / sample_rate_hz;
    const cplx z1 = std::polar(1.0, -w);
    auto eval = [&](const std::vector<double>& c) {
        cplx acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z1 + *it;
        return acc;
    };
    return eval(b) / eval(a);
}

double IirFilter::pole_radius() const {
    const auto n = static_cast<Index>(a.size()) - 1;
    if (n <= 0) return 0.0;
    MatrixN companion = MatrixN::Zero(n, n);
    for (Index k = 0; k < n; ++k) companion(0, k) = -a[static_cast<std::size_t>(k) + 1] / a[0];
    if (n > 1) companion.bottomLeftCorner(n - 1, n - 1).setIdentity();
    return companion.eigenvalues().cwiseAbs().maxCoeff();
}

IirFilter design_bandpass(double low_hz, double high_hz, double sample_rate_hz, int order) {
    require(sample_rate_hz > 0.0, "sample rate must be positive");
    check_edge(low_hz, sample_rate_hz, "band-pass low edge");
    check_edge(high_hz, sample_rate_hz, "band-pass high edge");
    if (!(low_hz < high_hz)) throw DesignError("band-pass low edge must be below high edge");
    if (order < 1) throw DesignError("band-pass order must be >= 1");

    const double fs2 = 2.0 * sample_rate_hz;
    const double w_lo = fs2 * std::tan(std::numbers::pi * low_hz / sample_rate_hz);
    const double w_hi = fs2 * std::tan(std::numbers::pi * high_hz / sample_rate_hz);
    const double bw = w_hi - w_lo;
    const double w0_sq = w_lo * w_hi;

    // Analog low-pass prototype poles, mapped to band-pass pole pairs.
    std::vector<cplx> s_poles;
    for (int k = 1; k <= order; ++k) {
        const cplx p = std::polar(1.0, std::numbers::pi * (2.0 * k + order - 1.0) / (2.0 * order));
        const cplx half = p * bw / 2.0;
        const cplx disc = std::sqrt(half * half - w0_sq);
        s_poles.push_back(half + disc);
        s_poles.push_back(half - disc);
    }

    // Bilinear transform. The band-pass has `order` zeros at s = 0 (z = 1) and
    // `order` at infinity (z = -1).
    std::vector<cplx> z_poles;
    cplx denom = 1.0;
    for (const auto& s : s_poles) {
        z_poles.push_back((fs2 + s) / (fs2 - s));
        denom *= fs2 - s;
    }
    std::vector<cplx> z_zeros(static_cast<std::size_t>(order), cplx(1.0));
    z_zeros.insert(z_zeros.end(), static_cast<std::size_t>(order), cplx(-1.0));
    const double gain = (std::pow(bw, order) * std::pow(fs2, order) / denom).real();

    IirFilter f;
    f.b = poly_from_roots(z_zeros);
    for (auto& v : f.b) v *= gain;
    f.a = poly_from_roots(z_poles);

    // One section per pole pair, each with a zero at z = 1 and at z = -1.
    std::vector<cplx> upper, real;
    for (const auto& p : z_poles) {
        if (p.imag() > 1e-12) upper.push_back(p);
        else if (std::abs(p.imag()) <= 1e-12) real.push_back(p);
    }
    std::sort(real.begin(), real.end(), [](const cplx& x, const cplx& y) { return x.real() < y.real(); });
    std::vector<std::pair<double, double>> denominators;  // (a1, a2)
    for (const auto& p : upper) denominators.emplace_back(-2.0 * p.real(), std::norm(p));
    for (std::size_t k = 0; k + 1 < real.size(); k += 2)
        denominators.emplace_back(-(real[k].real() + real[k + 1].real()), real[k].real() * real[k + 1].real());
    if (denominators.size() != static_cast<std::size_t>(order))
        throw NumericalError("band-pass poles could not be paired into sections");
    for (std::size_t k = 0; k < denominators.size(); ++k) {
        const double g = k == 0 ? gain : 1.0;
        f.sections.push_back({g, 0.0, -g, 1.0, denominators[k].first, denominators[k].second});
    }
    return f;
}

IirFilter design_notch(double center_hz, double sample_rate_hz, double quality_q) {
    require(sample_rate_hz > 0.0, "sample rate must be positive");
    check_edge(center_hz, sample_rate_hz, "notch center");
    if (!(quality_q > 0.0)) throw DesignError("notch quality factor must be positive");

    const double w0 = 2.0 * std::numbers::pi * center_hz / sample_rate_hz;
    const double bw = w0 / quality_q;
    const double g = 1.0 / (1.0 + std::tan(bw / 2.0));
    const double c = std::cos(w0);
    IirFilter f{{g, -2.0 * g * c, g}, {1.0, -2.0 * g * c, 2.0 * g - 1.0}, {}};
    f.sections.push_back({f.b[0], f.b[1], f.b[2], 1.0, f.a[1], f.a[2]});
    return f;
}

namespace {

VectorN lfilter_direct(const IirFilter& filter, const ConstVecRefN& x, const VectorN* zi) {
    const std::size_t n = filter.order() + 1;
    std::vector<double> b(filter.b), a(filter.a);
    b.resize(n, 0.0);
    a.resize(n, 0.0);
    VectorN state = zi ? *zi : VectorN::Zero(static_cast<Index>(n - 1));
    VectorN y(x.size());
    for (Index t = 0; t < x.size(); ++t) {
        const double xt = x[t];
        const double yt = b[0] * xt + (n > 1 ? state[0] : 0.0);
        for (std::size_t k = 1; k + 1 < n; ++k)
            state[static_cast<Index>(k) - 1] = b[k] * xt - a[k] * yt + state[static_cast<Index>(k)];
        if (n > 1) state[static_cast<Index>(n) - 2] = b[n - 1] * xt - a[n - 1] * yt;
        y[t] = yt;
    }
    return y;
}

VectorN lfilter_zi_direct(const IirFilter& filter) {
    const auto n = static_cast<Index>(filter.order() + 1);
    if (n <= 1) return {};
    std::vector<double> b(filter.b), a(filter.a);
    b.resize(static_cast<std::size_t>(n), 0.0);
    a.resize(static_cast<std::size_t>(n), 0.0);
    // Solve (I - C^T) zi = b[1:] - a[1:] * b[0] with C the companion matrix of a.
    MatrixN companion_t = MatrixN::Zero(n - 1, n - 1);
    for (Index k = 0; k < n - 1; ++k) companion_t(k, 0) = -a[static_cast<std::size_t>(k) + 1];
    for (Index k = 0; k + 1 < n - 1; ++k) companion_t(k, k + 1) = 1.0;
    VectorN rhs(n - 1);
    for (Index k = 0; k < n - 1; ++k)
        rhs[k] = b[static_cast<std::size_t>(k) + 1] - a[static_cast<std::size_t>(k) + 1] * b[0];
    return (MatrixN::Identity(n - 1, n - 1) - companion_t).partialPivLu().solve(rhs);
}

IirFilter section_filter(const std::array<double, 6>& sec) {
    return {{sec[0], sec[1], sec[2]}, {1.0, sec[4], sec[5]}, {}};
}

}  // namespace

VectorN lfilter(const IirFilter& filter, const ConstVecRefN& x, const VectorN* zi) {
    if (filter.sections.empty()) return lfilter_direct(filter, x, zi);
    const auto n_sec = static_cast<Index>(filter.sections.size());
    require(zi == nullptr || zi->size() == 2 * n_sec, "initial state must hold two values per section");
    VectorN y = x;
    for (Index s = 0; s < n_sec; ++s) {
        const auto sec = section_filter(filter.sections[static_cast<std::size_t>(s)]);
        if (zi) {
            const VectorN z = zi->segment(2 * s, 2);
            y = lfilter_direct(sec, y, &z);
        } else {
            y = lfilter_direct(sec, y, nullptr);
        }
    }
    return y;
}

VectorN lfilter_zi(const IirFilter& filter) {
    if (filter.sections.empty()) return lfilter_zi_direct(filter);
    // Each section starts in the steady state of the step it sees, which is
    // scaled by the DC gain of the sections before it.
    VectorN zi(2 * static_cast<Index>(filter.sections.size()));
    double scale = 1.0;
    for (std::size_t s = 0; s < filter.sections.size(); ++s) {
        const auto& sec = filter.sections[s];
        zi.segment(2 * static_cast<Index>(s), 2) = scale * lfilter_zi_direct(section_filter(sec));
        scale *= (sec[0] + sec[1] + sec[2]) / (1.0 + sec[4] + sec[5]);
    }
    return zi;
}

VectorN filtfilt(const IirFilter& filter, const ConstVecRefN& signal) {
    const auto pad = static_cast<Index>(3 * std::max(filter.a.size(), filter.b.size()));
    if (signal.size() <= pad)
        throw LengthError("filtfilt needs more than " + std::to_string(pad) + " samples, got " +
                          std::to_string(signal.size()));

    const Index n = signal.size();
    VectorN ext(n + 2 * pad);
    for (Index k = 0; k < pad; ++k) {
        ext[k] = 2.0 * signal[0] - signal[pad - k];
        ext[n + pad + k] = 2.0 * signal[n - 1] - signal[n - 2 - k];
    }
    ext.segment(pad, n) = signal;

    const VectorN zi = lfilter_zi(filter);
    VectorN z0 = zi * ext[0];
    VectorN fwd = lfilter(filter, ext, &z0);
    VectorN rev = fwd.reverse();
    z0 = zi * rev[0];
    VectorN back = lfilter(filter, rev, &z0);
    return back.reverse().segment(pad, n);
}

Recording preprocess_recording(const Recording& rec, const PreprocessConfig& config) {
    rec.validate();
    require(config.decimate_factor >= 1, "decimation factor must be >= 1");
    Recording out = rec;
    if (config.enabled) {
        const auto bp = design_bandpass(config.bandpass_low_hz, config.bandpass_high_hz, rec.sample_rate_hz,
                                        config.bandpass_order);
        const auto notch = design_notch(config.notch_center_hz, rec.sample_rate_hz, config.notch_q);
        for (Index c = 0; c < rec.n_channels(); ++c) {
            const VectorN row = rec.samples.row(c).transpose();
            out.samples.row(c) = filtfilt(notch, filtfilt(bp, row)).transpose();
        }
    }
    if (config.decimate_factor > 1) {
        const Index f = config.decimate_factor;
        const double new_rate = rec.sample_rate_hz / static_cast<double>(f);
        if (config.enabled && !(config.bandpass_high_hz < new_rate / 2.0))
            throw DesignError("decimation by " + std::to_string(f) + " puts Nyquist below the band-pass edge");
        const Index n_out = (rec.n_samples() + f - 1) / f;
        MatrixN dec(rec.n_channels(), n_out);
        for (Index t = 0; t < n_out; ++t) dec.col(t) = out.samples.col(t * f);
        out.samples = std::move(dec);
        out.sample_rate_hz = new_rate;
        for (auto& m : out.trial_marks) {
            m.start /= f;
            m.end /= f;
        }
    }
    return out;
}

}  // namespace mipdc
