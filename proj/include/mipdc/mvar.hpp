#pragma once

#include "mipdc/errors.hpp"
#include "mipdc/signal_io.hpp"
#include "mipdc/types.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace mipdc {

/// x(n) = sum_k A_k x(n-k) + e(n), with cov(e) = noise_cov.
template <typename T>
struct BasicMvarModel {
    std::vector<MatrixX<T>> coeffs;  // A_1..A_p, each M x M
    MatrixX<T> noise_cov;
    std::vector<std::string> channel_names;

    int order() const { return static_cast<int>(coeffs.size()); }
    Index n_channels() const { return noise_cov.rows(); }

    /// Mp x Mp companion matrix [[A_1 ... A_p], [I 0]].
    MatrixX<T> companion() const {
        const Index m = n_channels();
        const Index mp = m * static_cast<Index>(coeffs.size());
        MatrixX<T> c = MatrixX<T>::Zero(mp, mp);
        for (std::size_t k = 0; k < coeffs.size(); ++k) c.block(0, static_cast<Index>(k) * m, m, m) = coeffs[k];
        if (mp > m) c.bottomLeftCorner(mp - m, mp - m).setIdentity();
        return c;
    }

    /// Throws ContractError when shapes disagree or noise_cov is not symmetric.
    void validate() const {
        const Index m = noise_cov.rows();
        require(noise_cov.cols() == m, "noise covariance must be square");
        for (const auto& a : coeffs) require(a.rows() == m && a.cols() == m, "coefficient matrices must be M x M");
        require(channel_names.empty() || static_cast<Index>(channel_names.size()) == m,
                "channel name count must match the channel count");
        const T scale = T(1) + (m > 0 ? noise_cov.cwiseAbs().maxCoeff() : T(0));
        require(m == 0 || (noise_cov - noise_cov.transpose()).cwiseAbs().maxCoeff() <= T(1e-9) * scale,
                "noise covariance must be symmetric");
    }
};

using MvarModel = BasicMvarModel<Scalar>;

/// Convenience constructor: identity noise, generic channel names.
MvarModel make_mvar(std::vector<MatrixN> coeffs, MatrixN noise_cov = {});

/// Multichannel OLS fit of an MVAR(order) to one epoch (channels x samples).
/// Channels are demeaned first; noise_cov divides by max(N - p - Mp, 1).
MvarModel fit_mvar(const ConstMatRefN& samples, int order);
MvarModel fit_mvar(const Epoch& epoch, int order);

/// AIC(p) = N_eff ln det(Sigma_p) + 2 M^2 p over p = 1..max_order, all orders
/// regressing the same targets n = max_order..N-1 (Sigma_p is the ML residual
/// covariance). Returns the smallest minimizer. Orders whose lag Gram matrix
/// is numerically singular (band-limited data) are skipped.
int select_order_aic(const ConstMatRefN& samples, int max_order);
int select_order_aic(const Epoch& epoch, int max_order);

/// AIC score for every candidate order 1..max_order (index 0 is order 1);
/// +inf for numerically infeasible orders.
std::vector<double> aic_scores(const ConstMatRefN& samples, int max_order);

void to_json(nlohmann::json& j, const MvarModel& model);
void from_json(const nlohmann::json& j, MvarModel& model);

}  // namespace mipdc
