#include "mipdc/classification.hpp"

#include "mipdc/burg.hpp"
#include "mipdc/errors.hpp"
#include "mipdc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mipdc {

namespace {

void check_training_set(const ConstMatRefN& x, const VectorNi& y, double c, double gamma) {
    require(x.rows() == y.size(), "feature and label counts differ");
    require(x.rows() > 0 && x.cols() > 0, "empty training set");
    require(c > 0.0 && gamma > 0.0, "C and gamma must be positive");
    require(x.allFinite(), "non-finite feature value");
    bool pos = false, neg = false;
    for (Index k = 0; k < y.size(); ++k) {
        require(y[k] == 1 || y[k] == -1, "labels must be +1 or -1");
        pos |= y[k] == 1;
        neg |= y[k] == -1;
    }
    require(pos && neg, "SVM training needs samples of both classes");
}

}  // namespace

SmoResult svm_train_detailed(const ConstMatRefN& x, const VectorNi& y, double c, double gamma,
                             const SmoOptions& options) {
    check_training_set(x, y, c, gamma);
    const Index n = x.rows();

    MatrixN kernel(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j <= i; ++j) kernel(i, j) = kernel(j, i) = rbf_kernel(x.row(i).transpose(), x.row(j).transpose(), gamma);
    const VectorN yd = y.cast<double>();
    const MatrixN q = (yd * yd.transpose()).cwiseProduct(kernel);

    VectorN alpha = VectorN::Zero(n);
    VectorN grad = VectorN::Constant(n, -1.0);  // Q alpha - e
    const long max_iter = options.max_iterations > 0 ? options.max_iterations : std::max<long>(10'000'000, 100 * n);

    auto in_up = [&](Index t) { return (y[t] == 1 && alpha[t] < c) || (y[t] == -1 && alpha[t] > 0.0); };
    auto in_low = [&](Index t) { return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < c); };
    auto objective = [&] { return 0.5 * (alpha.sum() - alpha.dot(grad)); };

    SmoResult result;
    if (options.record_objective) result.objective_trace.push_back(objective());
    long iter = 0;
    double gap = 0.0;
    for (; iter < max_iter; ++iter) {
        Index i = -1, j = -1;
        double g_max = -std::numeric_limits<double>::infinity();
        double g_min = std::numeric_limits<double>::infinity();
        for (Index t = 0; t < n; ++t) {
            const double v = -yd[t] * grad[t];
            if (in_up(t) && v > g_max) g_max = v, i = t;
            if (in_low(t) && v < g_min) g_min = v, j = t;
        }
        gap = g_max - g_min;
        if (i < 0 || j < 0 || gap < options.tolerance) break;

        const double old_ai = alpha[i], old_aj = alpha[j];
        if (y[i] != y[j]) {
            double quad = kernel(i, i) + kernel(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0) quad = 1e-12;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0 && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = diff;
            } else if (diff <= 0.0 && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0 && alpha[i] > c) {
                alpha[i] = c;
                alpha[j] = c - diff;
            } else if (diff <= 0.0 && alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = kernel(i, i) + kernel(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0) quad = 1e-12;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c && alpha[i] > c) {
                alpha[i] = c;
                alpha[j] = sum - c;
            } else if (sum <= c && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c && alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = sum - c;
            } else if (sum <= c && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        grad += q.col(i) * (alpha[i] - old_ai) + q.col(j) * (alpha[j] - old_aj);
        if (options.record_objective) result.objective_trace.push_back(objective());
    }

    // Offset from free vectors, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, free_sum = 0.0;
    int n_free = 0;
    for (Index t = 0; t < n; ++t) {
        const double yg = yd[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            free_sum += yg;
        }
    }
    const double rho = n_free > 0 ? free_sum / n_free : 0.5 * (ub + lb);

    std::vector<Index> sv;
    for (Index t = 0; t < n; ++t)
        if (alpha[t] > 0.0) sv.push_back(t);
    SvmModel& model = result.model;
    model.support_vectors.resize(static_cast<Index>(sv.size()), x.cols());
    model.dual_coeffs.resize(static_cast<Index>(sv.size()));
    for (std::size_t k = 0; k < sv.size(); ++k) {
        model.support_vectors.row(static_cast<Index>(k)) = x.row(sv[k]);
        model.dual_coeffs[static_cast<Index>(k)] = alpha[sv[k]] * yd[sv[k]];
    }
    model.bias = -rho;
    model.gamma = gamma;
    model.c_penalty = c;
    result.alpha = std::move(alpha);
    result.iterations = iter;
    result.kkt_gap = gap;
    return result;
}

SvmModel svm_train(const ConstMatRefN& features, const VectorNi& labels, double c_penalty, double gamma) {
    return svm_train_detailed(features, labels, c_penalty, gamma).model;
}

Prediction svm_predict(const SvmModel& model, const ConstVecRefN& feature) {
    require(feature.size() == model.support_vectors.cols(), "feature dimension does not match the model");
    double acc = model.bias;
    for (Index k = 0; k < model.support_vectors.rows(); ++k)
        acc += model.dual_coeffs[k] * rbf_kernel(model.support_vectors.row(k).transpose(), feature, model.gamma);
    return {acc >= 0.0 ? 1 : -1, acc};
}

Standardizer Standardizer::fit(const ConstMatRefN& rows) {
    require(rows.rows() > 0, "cannot standardize an empty set");
    Standardizer s;
    s.mean = rows.colwise().mean().transpose();
    const auto n = static_cast<double>(rows.rows());
    const VectorN var = (rows.rowwise() - s.mean.transpose()).colwise().squaredNorm().transpose() / std::max(n - 1.0, 1.0);
    s.scale = var.cwiseSqrt().unaryExpr([](double v) { return v > 0.0 ? v : 1.0; });
    return s;
}

MatrixN Standardizer::apply(const ConstMatRefN& rows) const {
    return (rows.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

namespace {

// Portable bounded draw: std::uniform_int_distribution differs across libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do v = rng();
    while (v >= limit);
    return v % n;
}

}  // namespace

Split stratified_split(const VectorNi& labels, double train_fraction, std::uint64_t seed) {
    require(train_fraction > 0.0 && train_fraction < 1.0, "split fraction must lie in (0, 1)");
    std::mt19937_64 rng(seed);
    Split split;
    for (const int cls : {1, -1}) {
        std::vector<Index> idx;
        for (Index k = 0; k < labels.size(); ++k)
            if (labels[k] == cls) idx.push_back(k);
        require(idx.size() >= 2, "cross-validation needs at least two samples per class");
        for (std::size_t k = idx.size() - 1; k > 0; --k) std::swap(idx[k], idx[bounded(rng, k + 1)]);
        const auto n = static_cast<long>(idx.size());
        const long n_train = std::clamp(std::lround(train_fraction * static_cast<double>(n)), 1L, n - 1);
        split.train.insert(split.train.end(), idx.begin(), idx.begin() + n_train);
        split.test.insert(split.test.end(), idx.begin() + n_train, idx.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

CvResult cross_validate(const ConstMatRefN& features, const VectorNi& labels, double c_penalty, double gamma,
                        int n_repeats, double split_fraction, std::uint64_t seed, int jobs) {
    require(n_repeats >= 1, "need at least one cross-validation repeat");
    require(features.rows() == labels.size(), "feature and label counts differ");
    CvResult cv;
    cv.n_repeats = n_repeats;
    cv.per_repeat.assign(static_cast<std::size_t>(n_repeats), 0.0);
    // Validate class counts up front so errors do not depend on thread timing.
    stratified_split(labels, split_fraction, seed);

    parallel_for(static_cast<std::size_t>(n_repeats), jobs, [&](std::size_t r) {
        const auto split = stratified_split(labels, split_fraction, seed + r);
        MatrixN train(static_cast<Index>(split.train.size()), features.cols());
        VectorNi train_y(train.rows());
        for (std::size_t k = 0; k < split.train.size(); ++k) {
            train.row(static_cast<Index>(k)) = features.row(split.train[k]);
            train_y[static_cast<Index>(k)] = labels[split.train[k]];
        }
        const auto scaler = Standardizer::fit(train);
        const auto model = svm_train(scaler.apply(train), train_y, c_penalty, gamma);
        int correct = 0;
        for (const Index t : split.test) {
            const MatrixN row = scaler.apply(features.row(t));
            correct += svm_predict(model, row.row(0).transpose()).label == labels[t];
        }
        cv.per_repeat[r] = 100.0 * correct / static_cast<double>(split.test.size());
    });

    const auto n = static_cast<double>(n_repeats);
    double sum = 0.0;
    for (const double a : cv.per_repeat) sum += a;
    cv.mean_accuracy_pct = sum / n;
    double ss = 0.0;
    for (const double a : cv.per_repeat) ss += (a - cv.mean_accuracy_pct) * (a - cv.mean_accuracy_pct);
    cv.std_accuracy_pct = n_repeats > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return cv;
}

FeatureSet build_feature_vectors(const PsdStack& psd, const std::vector<ClassLabel>& labels, const FeatureSpec& spec,
                                 const std::vector<double>& grid_hz) {
    require(psd.size() == labels.size(), "PSD and label counts differ");
    const auto idx = band_indices(grid_hz, spec.band);
    if (idx.empty()) throw RangeError("feature band " + spec.band.label() + " Hz is outside the analysis grid");
    FeatureSet out;
    out.features.resize(static_cast<Index>(psd.size()), static_cast<Index>(idx.size()));
    out.labels.resize(static_cast<Index>(psd.size()));
    for (const Index q : idx) out.freqs_hz.push_back(grid_hz[static_cast<std::size_t>(q)]);
    for (std::size_t e = 0; e < psd.size(); ++e) {
        require(spec.channel >= 0 && spec.channel < psd[e].rows(), "feature channel out of range");
        require(psd[e].cols() == static_cast<Index>(grid_hz.size()), "PSD columns do not match the grid");
        for (std::size_t k = 0; k < idx.size(); ++k)
            out.features(static_cast<Index>(e), static_cast<Index>(k)) = psd[e](spec.channel, idx[k]);
        out.labels[static_cast<Index>(e)] = svm_label(labels[e]);
    }
    return out;
}

FeatureSet build_feature_vectors(const EpochSet& epochs, const FeatureSpec& spec, int burg_order,
                                 const std::vector<double>& grid_hz) {
    require(spec.channel >= 0 && spec.channel < epochs.n_channels(), "feature channel out of range");
    const auto idx = band_indices(grid_hz, spec.band);
    if (idx.empty()) throw RangeError("feature band " + spec.band.label() + " Hz is outside the analysis grid");
    std::vector<double> freqs;
    for (const Index q : idx) freqs.push_back(grid_hz[static_cast<std::size_t>(q)]);

    FeatureSet out;
    out.freqs_hz = freqs;
    out.features.resize(static_cast<Index>(epochs.epochs.size()), static_cast<Index>(freqs.size()));
    out.labels.resize(static_cast<Index>(epochs.epochs.size()));
    for (std::size_t e = 0; e < epochs.epochs.size(); ++e) {
        const auto& ep = epochs.epochs[e];
        const VectorN signal = ep.samples.row(spec.channel).transpose();
        out.features.row(static_cast<Index>(e)) = burg_psd(burg_fit(signal, burg_order), freqs, epochs.sample_rate_hz).transpose();
        out.labels[static_cast<Index>(e)] = svm_label(ep.label);
    }
    return out;
}

}  // namespace mipdc
