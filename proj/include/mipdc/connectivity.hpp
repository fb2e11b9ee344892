#pragma once

#include "mipdc/errors.hpp"
#include "mipdc/mvar.hpp"
#include "mipdc/types.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

namespace mipdc {

/// Abar(f) = I - sum_k A_k exp(-2 pi i (f / fs) k).
template <typename T>
MatrixX<std::complex<T>> transfer_matrix(const BasicMvarModel<T>& model, T f_hz, T sample_rate_hz) {
    require(f_hz < sample_rate_hz / T(2), "transfer matrix frequency must be below Nyquist");
    const Index m = model.n_channels();
    const T w = T(2) * std::numbers::pi_v<T> * f_hz / sample_rate_hz;
    MatrixX<std::complex<T>> abar = MatrixX<std::complex<T>>::Identity(m, m);
    for (std::size_t k = 0; k < model.coeffs.size(); ++k)
        abar -= model.coeffs[k].template cast<std::complex<T>>() * std::polar(T(1), -w * static_cast<T>(k + 1));
    return abar;
}

/// Column-normalized magnitudes |Abar_ij| / ||Abar_{:,j}||_2 (Hermitian norm).
template <typename Derived>
MatrixX<typename Derived::RealScalar> pdc_magnitudes(const Eigen::MatrixBase<Derived>& abar) {
    using T = typename Derived::RealScalar;
    MatrixX<T> out(abar.rows(), abar.cols());
    for (Index j = 0; j < abar.cols(); ++j) {
        const T norm = abar.col(j).norm();
        if (!(norm > T(0)) || !std::isfinite(norm))
            throw NumericalError("transfer matrix column " + std::to_string(j) + " has zero or non-finite norm");
        out.col(j) = abar.col(j).cwiseAbs() / norm;
    }
    return out;
}

/// |pi_{i<-j}(f)| on a frequency grid; slice(q)(i, j) is the value at freqs_hz[q].
struct PdcTensor {
    std::vector<MatrixN> slices;
    std::vector<double> freqs_hz;
    std::vector<std::string> channel_names;

    Index n_channels() const { return slices.empty() ? 0 : slices.front().rows(); }
    std::size_t n_freqs() const { return freqs_hz.size(); }
    double at(Index i, Index j, std::size_t q) const { return slices[q](i, j); }
};

PdcTensor pdc(const MvarModel& model, const std::vector<double>& freqs_hz, double sample_rate_hz);

/// Median over (epoch, in-band frequency) pairs for each (i, j). The diagonal
/// is kept; callers treat it as a self-loop.
MatrixN band_median_pdc(const std::vector<PdcTensor>& per_epoch, const Band& band);

/// Elementwise median over epochs, restricted to in-band frequencies.
std::vector<MatrixN> epoch_median_slices(const std::vector<PdcTensor>& per_epoch, const Band& band);

struct FlowMap {
    VectorN outflow;
    VectorN inflow;
    Band band;
    ClassLabel label = ClassLabel::Class1;
    std::vector<std::string> channel_names;
};

/// Sums of squared epoch-median PDC over the band, excluding self-loops.
/// With `edge_mask` (M x M, nonzero = keep entry (i, j)) only masked
/// directions contribute.
FlowMap flow_map(const std::vector<PdcTensor>& per_epoch, const Band& band, ClassLabel label,
                 const std::optional<MatrixN>& edge_mask = std::nullopt);

void to_json(nlohmann::json& j, const PdcTensor& tensor);
void from_json(const nlohmann::json& j, PdcTensor& tensor);

/// CSV rows "channel,outflow,inflow".
void save_flow_map(const std::filesystem::path& path, const FlowMap& flows);

}  // namespace mipdc
