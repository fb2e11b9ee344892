#pragma once

#include "mipdc/mvar.hpp"
#include "mipdc/signal_io.hpp"
#include "mipdc/types.hpp"

#include <Eigen/Eigenvalues>

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mipdc {

/// Spectral radius of the companion matrix; the process is stationary iff < 1.
template <typename T>
T check_stability(const BasicMvarModel<T>& model) {
    if (model.coeffs.empty()) return T(0);
    return model.companion().eigenvalues().cwiseAbs().maxCoeff();
}

/// Directed edge j -> i, i.e. A_k(i, j) != 0 for some lag k.
struct DirectedEdge {
    Index from = 0;
    Index to = 0;
    bool operator==(const DirectedEdge&) const = default;
};

struct GroundTruth {
    MvarModel model;
    std::vector<DirectedEdge> coupling_edges;
    std::uint64_t seed = 0;
};

/// Off-diagonal non-zero pattern of the coefficients, ordered by (from, to).
std::vector<DirectedEdge> coupling_pattern(const MvarModel& model);

GroundTruth make_ground_truth(MvarModel model, std::uint64_t seed);

/// Iterates the MVAR recursion with Gaussian innovations of covariance
/// noise_cov, drops burn_in samples and returns channels x n_samples.
/// burn_in < 0 selects 100 * order.
MatrixN generate(const GroundTruth& truth, Index n_samples, Index burn_in = -1);
MatrixN generate(const MvarModel& model, Index n_samples, Index burn_in, std::mt19937_64& rng);

/// Random dense MVAR rescaled so that its companion radius is at most max_radius.
MvarModel random_stable_model(Index n_channels, int order, std::uint64_t seed, double max_radius = 0.9);

struct WeightedEdge {
    Index from = 0;
    Index to = 0;
    double weight = 0.0;
    int lag = 1;
};

/// Class-dependent rhythm planted on one channel. With bandwidth_hz > 0 it is
/// a narrowband AR(2) resonance with the power of a sinusoid of this amplitude;
/// with bandwidth_hz == 0 it is a pure sinusoid of random phase.
struct Rhythm {
    Index channel = -1;  // -1 disables
    double freq_hz = 24.0;
    double amplitude = 0.0;
    double bandwidth_hz = 1.0;
    ClassLabel label = ClassLabel::Class1;
};

struct ScenarioConfig {
    Index n_channels = 16;
    double sample_rate_hz = kDefaultSampleRateHz;
    double epoch_seconds = 1.0;
    int epochs_per_class = 30;
    int epochs_per_trial = 6;
    double self_lag1 = 0.5;
    double self_lag2 = -0.2;
    double noise_std = 1.0;
    std::vector<WeightedEdge> shared_edges;
    std::vector<WeightedEdge> class1_edges;
    std::vector<WeightedEdge> class2_edges;
    Rhythm rhythm;
    Index burn_in = -1;
    std::uint64_t seed = 1;
};

struct Scenario {
    Recording recording;
    EpochSet epochs;
    GroundTruth class1;
    GroundTruth class2;
};

/// Truth model for one class: shared dynamics plus that class's edges.
MvarModel scenario_model(const ScenarioConfig& config, ClassLabel label);

/// Alternating Class1/Class2 trials, each simulated independently from a
/// per-trial seed, concatenated into one labeled recording and epoched.
Scenario make_two_class_scenario(const ScenarioConfig& config);

}  // namespace mipdc
