#pragma once

#include "mipdc/connectivity.hpp"
#include "mipdc/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mipdc {

/// Squared point-biserial correlation between values and class membership.
/// Uses the population standard deviation of the pooled sample; 0 if it vanishes.
double rsquared(const ConstVecRefN& class1, const ConstVecRefN& class2);

/// r^2 per channel (rows) and frequency (columns).
struct RSquaredMap {
    MatrixN values;
    std::vector<double> freqs_hz;
    std::vector<std::string> channel_names;
};

/// Spectral power per epoch: one channels x freqs matrix per epoch.
using PsdStack = std::vector<MatrixN>;

RSquaredMap rsquared_map(const PsdStack& psd_class1, const PsdStack& psd_class2,
                         const std::vector<double>& freqs_hz, const std::vector<std::string>& channel_names);

struct FeatureSpec {
    Index channel = 0;
    std::string channel_name;
    double center_hz = 0.0;
    Band band;
    double rsquared = 0.0;
    bool degenerate = false;  // map was all zero; first cell returned
};

/// Global argmax of the map (lowest channel, then lowest frequency on ties),
/// band = center +/- 1 Hz clipped to the grid.
FeatureSpec select_features(const RSquaredMap& map, double half_width_hz = 1.0);

enum class RanksumMethod { Auto, Exact, Normal };

/// Two-sided Wilcoxon rank-sum p-value. Auto uses the exact null distribution
/// when n_x + n_y <= 20 and there are no ties, otherwise the normal
/// approximation with tie-corrected variance and continuity correction.
double ranksum(const ConstVecRefN& x, const ConstVecRefN& y, RanksumMethod method = RanksumMethod::Auto);

struct Edge {
    Index from = 0;  // source channel j
    Index to = 0;    // target channel i
    Band band;
    double p_value = 1.0;
    ClassLabel predominant = ClassLabel::Class1;
};

struct EdgeSignificance {
    std::vector<Edge> edges;
    double alpha_level = 0.001;
    std::vector<std::string> channel_names;

    /// Expected count of false edges for M(M-1) independent null tests.
    double expected_null_edges() const;
    /// M x M mask with 1 at (to, from) for every listed edge.
    MatrixN mask() const;
};

/// Mean PDC magnitude over in-band frequencies, one value per epoch, for (i, j).
VectorN band_mean_pdc(const std::vector<PdcTensor>& per_epoch, const Band& band, Index i, Index j);

/// Wilcoxon screening of every ordered pair i != j. Keeps p < alpha_level;
/// alpha_level >= 1 keeps every pair.
EdgeSignificance screen_edges(const std::vector<PdcTensor>& pdc_class1, const std::vector<PdcTensor>& pdc_class2,
                              const Band& band, double alpha_level);

/// CSV "from,to,band_low,band_high,p_value,predominant".
void save_edges(const std::filesystem::path& path, const EdgeSignificance& sig);

}  // namespace mipdc
