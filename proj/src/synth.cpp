#include "mipdc/synth.hpp"

#include "mipdc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mipdc {

namespace {

// SplitMix64 finalizer; decorrelates seeds derived as master + index.
std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

MatrixN noise_factor(const MatrixN& cov) {
    Eigen::LDLT<MatrixN> ldlt(cov);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw ContractError("noise covariance must be positive semi-definite");
    const VectorN d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
    MatrixN l = ldlt.matrixL();
    return ldlt.transpositionsP().transpose() * (l * d.asDiagonal());
}

VectorN rhythm_trace(const Rhythm& r, double fs, Index len, std::mt19937_64& rng) {
    const double omega = 2.0 * std::numbers::pi * r.freq_hz / fs;
    VectorN out(len);
    if (r.bandwidth_hz <= 0.0) {
        std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
        const double phase = phase_dist(rng);
        for (Index n = 0; n < len; ++n) out[n] = r.amplitude * std::sin(omega * static_cast<double>(n) + phase);
        return out;
    }
    const double radius = std::exp(-std::numbers::pi * r.bandwidth_hz / fs);
    const double a1 = 2.0 * radius * std::cos(omega);
    const double a2 = -radius * radius;
    // Stationary variance of x[n] = a1 x[n-1] + a2 x[n-2] + e[n] with unit-variance e.
    const double gamma0 = (1.0 - a2) / ((1.0 + a2) * ((1.0 - a2) * (1.0 - a2) - a1 * a1));
    const double scale = r.amplitude / std::sqrt(2.0 * gamma0);
    const auto burn = static_cast<Index>(std::ceil(10.0 * fs / (std::numbers::pi * r.bandwidth_hz)));
    std::normal_distribution<double> normal;
    double x1 = 0.0, x2 = 0.0;
    for (Index n = -burn; n < len; ++n) {
        const double x0 = a1 * x1 + a2 * x2 + normal(rng);
        x2 = x1;
        x1 = x0;
        if (n >= 0) out[n] = scale * x0;
    }
    return out;
}

}  // namespace

std::vector<DirectedEdge> coupling_pattern(const MvarModel& model) {
    std::vector<DirectedEdge> edges;
    const Index m = model.n_channels();
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < m; ++i) {
            if (i == j) continue;
            const bool nonzero = std::any_of(model.coeffs.begin(), model.coeffs.end(),
                                             [&](const MatrixN& a) { return a(i, j) != 0.0; });
            if (nonzero) edges.push_back({j, i});
        }
    return edges;
}

GroundTruth make_ground_truth(MvarModel model, std::uint64_t seed) {
    model.validate();
    GroundTruth truth;
    truth.coupling_edges = coupling_pattern(model);
    truth.model = std::move(model);
    truth.seed = seed;
    return truth;
}

MatrixN generate(const MvarModel& model, Index n_samples, Index burn_in, std::mt19937_64& rng) {
    model.validate();
    require(n_samples >= 0, "sample count must be non-negative");
    const double radius = check_stability(model);
    if (!(radius < 1.0))
        throw StabilityError("MVAR model is not stationary: companion spectral radius " + std::to_string(radius));
    const int p = model.order();
    const Index m = model.n_channels();
    if (burn_in < 0) burn_in = 100 * std::max(p, 1);

    const MatrixN factor = noise_factor(model.noise_cov);
    std::normal_distribution<double> normal;
    const Index total = burn_in + n_samples;
    MatrixN x = MatrixN::Zero(m, total + p);  // p leading zeros as initial state
    VectorN z(m);
    for (Index t = p; t < total + p; ++t) {
        for (Index c = 0; c < m; ++c) z[c] = normal(rng);
        VectorN xt = factor * z;
        for (int k = 1; k <= p; ++k) xt.noalias() += model.coeffs[static_cast<std::size_t>(k) - 1] * x.col(t - k);
        x.col(t) = xt;
    }
    return x.rightCols(n_samples);
}

MatrixN generate(const GroundTruth& truth, Index n_samples, Index burn_in) {
    std::mt19937_64 rng(truth.seed);
    return generate(truth.model, n_samples, burn_in, rng);
}

MvarModel random_stable_model(Index n_channels, int order, std::uint64_t seed, double max_radius) {
    require(n_channels >= 1 && order >= 1, "random model needs at least one channel and lag");
    require(max_radius > 0.0 && max_radius < 1.0, "target radius must lie in (0, 1)");
    std::mt19937_64 rng(mix_seed(seed));
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n_channels * order)));
    std::vector<MatrixN> coeffs;
    for (int k = 0; k < order; ++k) coeffs.push_back(MatrixN::NullaryExpr(n_channels, n_channels, [&] { return normal(rng); }));
    auto model = make_mvar(std::move(coeffs));
    const double radius = check_stability(model);
    if (radius > max_radius) {
        // Scaling A_k by s^k scales every companion eigenvalue by s.
        const double s = max_radius / radius;
        for (std::size_t k = 0; k < model.coeffs.size(); ++k) model.coeffs[k] *= std::pow(s, static_cast<double>(k + 1));
    }
    return model;
}

MvarModel scenario_model(const ScenarioConfig& config, ClassLabel label) {
    const Index m = config.n_channels;
    require(m >= 2, "scenario needs at least two channels");
    int order = 2;
    auto max_lag = [&](const std::vector<WeightedEdge>& edges) {
        for (const auto& e : edges) {
            require(e.lag >= 1, "edge lag must be >= 1");
            require(e.from >= 0 && e.from < m && e.to >= 0 && e.to < m && e.from != e.to,
                    "scenario edge endpoints must be distinct valid channels");
            order = std::max(order, e.lag);
        }
    };
    max_lag(config.shared_edges);
    max_lag(config.class1_edges);
    max_lag(config.class2_edges);

    std::vector<MatrixN> coeffs(static_cast<std::size_t>(order), MatrixN::Zero(m, m));
    coeffs[0].diagonal().setConstant(config.self_lag1);
    coeffs[1].diagonal().setConstant(config.self_lag2);
    auto add = [&](const std::vector<WeightedEdge>& edges) {
        for (const auto& e : edges) coeffs[static_cast<std::size_t>(e.lag) - 1](e.to, e.from) += e.weight;
    };
    add(config.shared_edges);
    add(label == ClassLabel::Class1 ? config.class1_edges : config.class2_edges);

    require(config.noise_std > 0.0, "noise standard deviation must be positive");
    auto model = make_mvar(std::move(coeffs), MatrixN::Identity(m, m) * (config.noise_std * config.noise_std));
    if (m == static_cast<Index>(default_channel_names().size())) model.channel_names = default_channel_names();
    return model;
}

Scenario make_two_class_scenario(const ScenarioConfig& config) {
    require(config.sample_rate_hz > 0.0 && config.epoch_seconds > 0.0, "sample rate and epoch length must be positive");
    require(config.epochs_per_class >= 1 && config.epochs_per_trial >= 1, "epoch counts must be positive");
    require(config.rhythm.channel < config.n_channels, "rhythm channel out of range");

    Scenario sc;
    sc.class1 = make_ground_truth(scenario_model(config, ClassLabel::Class1), config.seed);
    sc.class2 = make_ground_truth(scenario_model(config, ClassLabel::Class2), config.seed);
    for (const auto* truth : {&sc.class1, &sc.class2}) {
        const double radius = check_stability(truth->model);
        if (!(radius < 1.0))
            throw StabilityError("scenario model is not stationary: companion spectral radius " + std::to_string(radius));
    }

    const auto epoch_len = static_cast<Index>(std::lround(config.epoch_seconds * config.sample_rate_hz));
    const int trials_per_class = (config.epochs_per_class + config.epochs_per_trial - 1) / config.epochs_per_trial;

    std::vector<MatrixN> pieces;
    Recording& rec = sc.recording;
    rec.sample_rate_hz = config.sample_rate_hz;
    rec.channel_names = sc.class1.model.channel_names;
    Index cursor = 0;
    std::size_t trial_index = 0;
    for (int t = 0; t < trials_per_class; ++t) {
        const int n_epochs = std::min(config.epochs_per_trial, config.epochs_per_class - t * config.epochs_per_trial);
        for (const ClassLabel label : {ClassLabel::Class1, ClassLabel::Class2}) {
            const auto& truth = label == ClassLabel::Class1 ? sc.class1 : sc.class2;
            std::mt19937_64 rng(mix_seed(config.seed * 1000003ULL + trial_index));
            const Index len = n_epochs * epoch_len;
            MatrixN x = generate(truth.model, len, config.burn_in, rng);
            const auto& r = config.rhythm;
            if (r.channel >= 0 && r.label == label && r.amplitude != 0.0)
                x.row(r.channel) += rhythm_trace(r, config.sample_rate_hz, len, rng).transpose();
            rec.trial_marks.push_back({cursor, cursor + len, label});
            cursor += len;
            pieces.push_back(std::move(x));
            ++trial_index;
        }
    }
    rec.samples.resize(config.n_channels, cursor);
    Index at = 0;
    for (const auto& piece : pieces) {
        rec.samples.middleCols(at, piece.cols()) = piece;
        at += piece.cols();
    }
    sc.epochs = segment_epochs(rec, config.epoch_seconds);
    return sc;
}

}  // namespace mipdc
