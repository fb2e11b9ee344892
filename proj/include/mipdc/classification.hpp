#pragma once

#include "mipdc/discriminability.hpp"
#include "mipdc/signal_io.hpp"
#include "mipdc/types.hpp"

#include <cstdint>
#include <vector>

namespace mipdc {

/// Binary RBF-kernel SVM, decision value sum_i dual_coeffs_i K(sv_i, x) + bias.
struct SvmModel {
    MatrixN support_vectors;  // one row per support vector
    VectorN dual_coeffs;      // alpha_i * y_i
    double bias = 0.0;
    double gamma = 0.0;
    double c_penalty = 0.0;
};

struct SmoOptions {
    double tolerance = 1e-3;
    long max_iterations = 0;       // 0 picks max(1e7, 100 n)
    bool record_objective = false; // keep the dual objective after every step
};

struct SmoResult {
    SvmModel model;
    VectorN alpha;  // one per training sample
    long iterations = 0;
    double kkt_gap = 0.0;  // max violation m(alpha) - M(alpha) at exit
    std::vector<double> objective_trace;
};

inline double rbf_kernel(const ConstVecRefN& u, const ConstVecRefN& v, double gamma) {
    return std::exp(-gamma * (u - v).squaredNorm());
}

/// Soft-margin dual solved by SMO with maximal-violating-pair selection.
/// `features` holds one sample per row; labels are +1 / -1.
SmoResult svm_train_detailed(const ConstMatRefN& features, const VectorNi& labels, double c_penalty, double gamma,
                             const SmoOptions& options = {});
SvmModel svm_train(const ConstMatRefN& features, const VectorNi& labels, double c_penalty, double gamma);

struct Prediction {
    int label = 1;
    double decision = 0.0;
};

Prediction svm_predict(const SvmModel& model, const ConstVecRefN& feature);

/// Per-dimension z-scoring fitted on training rows only.
struct Standardizer {
    VectorN mean;
    VectorN scale;

    static Standardizer fit(const ConstMatRefN& rows);
    MatrixN apply(const ConstMatRefN& rows) const;
};

struct Split {
    std::vector<Index> train;
    std::vector<Index> test;
};

/// Stratified random split; each class contributes round(fraction * n_c)
/// training samples, clamped so both folds see both classes.
Split stratified_split(const VectorNi& labels, double train_fraction, std::uint64_t seed);

struct CvResult {
    double mean_accuracy_pct = 0.0;
    double std_accuracy_pct = 0.0;
    int n_repeats = 0;
    std::vector<double> per_repeat;
};

/// Repeated stratified hold-out; repeat r draws its split from seed + r.
CvResult cross_validate(const ConstMatRefN& features, const VectorNi& labels, double c_penalty, double gamma,
                        int n_repeats, double split_fraction, std::uint64_t seed, int jobs = 1);

struct FeatureSet {
    MatrixN features;  // epochs x band frequencies
    VectorNi labels;   // Class1 -> +1, Class2 -> -1
    std::vector<double> freqs_hz;
};

inline int svm_label(ClassLabel c) { return c == ClassLabel::Class1 ? 1 : -1; }

/// Burg PSD of the selected channel at the grid frequencies inside spec.band.
FeatureSet build_feature_vectors(const EpochSet& epochs, const FeatureSpec& spec, int burg_order,
                                 const std::vector<double>& grid_hz);

/// Same, reading precomputed per-epoch PSD (channels x grid) instead of refitting.
FeatureSet build_feature_vectors(const PsdStack& psd, const std::vector<ClassLabel>& labels, const FeatureSpec& spec,
                                 const std::vector<double>& grid_hz);

}  // namespace mipdc
