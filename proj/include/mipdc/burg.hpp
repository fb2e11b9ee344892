#pragma once

#include "mipdc/types.hpp"

#include <complex>
#include <numbers>
#include <vector>

namespace mipdc {

/// Univariate AR model in predictor form x(n) = sum_k a_k x(n-k) + e(n).
template <typename T>
struct BasicBurgModel {
    VectorX<T> ar_coeffs;          // a_1..a_p
    VectorX<T> reflection_coeffs;  // k_1..k_p, |k_m| <= 1
    T noise_var = T(0);

    int order() const { return static_cast<int>(ar_coeffs.size()); }
};

using BurgModel = BasicBurgModel<Scalar>;

/// Burg lattice recursion on the demeaned signal. Reflection coefficients
/// follow the predictor sign convention (k_m is the new a_m at stage m).
BurgModel burg_fit(const ConstVecRefN& signal, int order);

/// Largest m with |k_m| >= decay_threshold from a fit at scan_order, or 1.
int select_order_reflection(const ConstVecRefN& signal, int scan_order, double decay_threshold);

/// Two-sided AR spectral density
///   noise_var / (fs |1 - sum_k a_k e^{-2 pi i f k / fs}|^2)
/// at each frequency in [0, fs/2).
VectorN burg_psd(const BurgModel& model, const std::vector<double>& freqs_hz, double sample_rate_hz);

/// Predictor coefficients from reflection coefficients (step-up recursion).
template <typename Derived>
VectorX<typename Derived::Scalar> step_up(const Eigen::MatrixBase<Derived>& reflection) {
    using T = typename Derived::Scalar;
    VectorX<T> a(0);
    for (Index m = 0; m < reflection.size(); ++m) {
        VectorX<T> next(m + 1);
        for (Index i = 0; i < m; ++i) next[i] = a[i] - reflection[m] * a[m - 1 - i];
        next[m] = reflection[m];
        a = std::move(next);
    }
    return a;
}

}  // namespace mipdc
