#include "mipdc/discriminability.hpp"

#include "mipdc/errors.hpp"
#include "mipdc/signal_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace mipdc {

double rsquared(const ConstVecRefN& class1, const ConstVecRefN& class2) {
    require(class1.size() > 0 && class2.size() > 0, "r^2 needs at least one sample per class");
    const auto n1 = static_cast<double>(class1.size());
    const auto n2 = static_cast<double>(class2.size());
    const double m1 = class1.mean();
    const double m2 = class2.mean();
    const double grand = (n1 * m1 + n2 * m2) / (n1 + n2);
    const double ss = (class1.array() - grand).square().sum() + (class2.array() - grand).square().sum();
    const double sd = std::sqrt(ss / (n1 + n2));
    if (!(sd > 0.0)) return 0.0;
    const double r = (m1 - m2) / sd * std::sqrt(n1 * n2) / (n1 + n2);
    return std::clamp(r * r, 0.0, 1.0);
}

RSquaredMap rsquared_map(const PsdStack& psd_class1, const PsdStack& psd_class2, const std::vector<double>& freqs_hz,
                         const std::vector<std::string>& channel_names) {
    require(psd_class1.size() >= 2 && psd_class2.size() >= 2, "r^2 map needs at least two epochs per class");
    const Index m = psd_class1.front().rows();
    const Index nf = psd_class1.front().cols();
    for (const auto* stack : {&psd_class1, &psd_class2})
        for (const auto& p : *stack) require(p.rows() == m && p.cols() == nf, "PSD dimensions differ between epochs");
    require(static_cast<Index>(freqs_hz.size()) == nf, "frequency count does not match PSD columns");
    require(static_cast<Index>(channel_names.size()) == m, "channel count does not match PSD rows");

    RSquaredMap map{MatrixN(m, nf), freqs_hz, channel_names};
    VectorN a(static_cast<Index>(psd_class1.size())), b(static_cast<Index>(psd_class2.size()));
    for (Index c = 0; c < m; ++c)
        for (Index q = 0; q < nf; ++q) {
            for (std::size_t e = 0; e < psd_class1.size(); ++e) a[static_cast<Index>(e)] = psd_class1[e](c, q);
            for (std::size_t e = 0; e < psd_class2.size(); ++e) b[static_cast<Index>(e)] = psd_class2[e](c, q);
            map.values(c, q) = rsquared(a, b);
        }
    return map;
}

FeatureSpec select_features(const RSquaredMap& map, double half_width_hz) {
    require(map.values.size() > 0, "empty r^2 map");
    require(static_cast<Index>(map.freqs_hz.size()) == map.values.cols(), "r^2 map frequency count mismatch");
    Index best_c = 0, best_q = 0;
    for (Index c = 0; c < map.values.rows(); ++c)
        for (Index q = 0; q < map.values.cols(); ++q)
            if (map.values(c, q) > map.values(best_c, best_q)) {
                best_c = c;
                best_q = q;
            }
    FeatureSpec spec;
    spec.channel = best_c;
    spec.channel_name = static_cast<std::size_t>(best_c) < map.channel_names.size()
                            ? map.channel_names[static_cast<std::size_t>(best_c)]
                            : "ch" + std::to_string(best_c + 1);
    spec.center_hz = map.freqs_hz[static_cast<std::size_t>(best_q)];
    spec.band = {std::max(spec.center_hz - half_width_hz, map.freqs_hz.front()),
                 std::min(spec.center_hz + half_width_hz, map.freqs_hz.back())};
    spec.rsquared = map.values(best_c, best_q);
    spec.degenerate = map.values.cwiseAbs().maxCoeff() == 0.0;
    return spec;
}

namespace {

struct RankInfo {
    double rank_sum_x = 0.0;
    double tie_term = 0.0;  // sum over tie groups of t^3 - t
    bool has_ties = false;
};

RankInfo rank_x(const ConstVecRefN& x, const ConstVecRefN& y) {
    const Index nx = x.size();
    const Index n = nx + y.size();
    std::vector<std::pair<double, bool>> pooled;
    pooled.reserve(static_cast<std::size_t>(n));
    for (Index k = 0; k < nx; ++k) pooled.emplace_back(x[k], true);
    for (Index k = 0; k < y.size(); ++k) pooled.emplace_back(y[k], false);
    std::sort(pooled.begin(), pooled.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    RankInfo info;
    std::size_t start = 0;
    while (start < pooled.size()) {
        std::size_t stop = start + 1;
        while (stop < pooled.size() && pooled[stop].first == pooled[start].first) ++stop;
        const double t = static_cast<double>(stop - start);
        const double midrank = 0.5 * static_cast<double>(start + 1 + stop);
        for (std::size_t k = start; k < stop; ++k)
            if (pooled[k].second) info.rank_sum_x += midrank;
        if (t > 1) {
            info.has_ties = true;
            info.tie_term += t * t * t - t;
        }
        start = stop;
    }
    return info;
}

// Null distribution of the rank sum of nx labels drawn from ranks 1..n.
double exact_p(Index nx, Index n, double w) {
    const Index max_sum = n * (n + 1) / 2;
    // counts[k][s]: subsets of size k with rank sum s, built rank by rank.
    std::vector<std::vector<double>> counts(static_cast<std::size_t>(nx) + 1,
                                            std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    counts[0][0] = 1.0;
    for (Index r = 1; r <= n; ++r)
        for (Index k = std::min(r, nx); k >= 1; --k)
            for (Index s = max_sum; s >= r; --s)
                counts[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] +=
                    counts[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(s - r)];
    const auto& dist = counts[static_cast<std::size_t>(nx)];
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    const auto w_int = static_cast<Index>(std::llround(w));
    double lower = 0.0, upper = 0.0;
    for (Index s = 0; s <= max_sum; ++s) {
        if (s <= w_int) lower += dist[static_cast<std::size_t>(s)];
        if (s >= w_int) upper += dist[static_cast<std::size_t>(s)];
    }
    return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

double normal_p(Index nx, Index ny, const RankInfo& info) {
    const auto fx = static_cast<double>(nx);
    const auto fy = static_cast<double>(ny);
    const double n = fx + fy;
    const double mean = fx * (n + 1.0) / 2.0;
    const double var = fx * fy / 12.0 * ((n + 1.0) - info.tie_term / (n * (n - 1.0)));
    if (!(var > 0.0)) return 1.0;
    const double diff = info.rank_sum_x - mean;
    const double corrected = diff - 0.5 * ((diff > 0.0) - (diff < 0.0));
    const double z = corrected / std::sqrt(var);
    return std::min(1.0, std::erfc(std::abs(z) / std::numbers::sqrt2));
}

}  // namespace

double ranksum(const ConstVecRefN& x, const ConstVecRefN& y, RanksumMethod method) {
    require(x.size() > 0 && y.size() > 0, "rank-sum test needs non-empty samples");
    require(x.allFinite() && y.allFinite(), "rank-sum test needs finite samples");
    const auto info = rank_x(x, y);
    const Index n = x.size() + y.size();
    bool exact = method == RanksumMethod::Exact || (method == RanksumMethod::Auto && n <= 20 && !info.has_ties);
    if (method == RanksumMethod::Exact) require(!info.has_ties, "exact rank-sum distribution requires tie-free samples");
    const double p = exact ? exact_p(x.size(), n, info.rank_sum_x) : normal_p(x.size(), y.size(), info);
    return std::max(p, std::numeric_limits<double>::min());
}

double EdgeSignificance::expected_null_edges() const {
    const auto m = static_cast<double>(channel_names.size());
    return std::min(alpha_level, 1.0) * m * (m - 1.0);
}

MatrixN EdgeSignificance::mask() const {
    const auto m = static_cast<Index>(channel_names.size());
    MatrixN out = MatrixN::Zero(m, m);
    for (const auto& e : edges) out(e.to, e.from) = 1.0;
    return out;
}

VectorN band_mean_pdc(const std::vector<PdcTensor>& per_epoch, const Band& band, Index i, Index j) {
    VectorN out(static_cast<Index>(per_epoch.size()));
    for (std::size_t e = 0; e < per_epoch.size(); ++e) {
        const auto idx = band_indices(per_epoch[e].freqs_hz, band);
        if (idx.empty()) throw RangeError("band " + band.label() + " Hz does not intersect the frequency grid");
        double acc = 0.0;
        for (const Index q : idx) acc += per_epoch[e].at(i, j, static_cast<std::size_t>(q));
        out[static_cast<Index>(e)] = acc / static_cast<double>(idx.size());
    }
    return out;
}

namespace {

double median(VectorN v) {
    std::sort(v.begin(), v.end());
    const Index n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

EdgeSignificance screen_edges(const std::vector<PdcTensor>& pdc_class1, const std::vector<PdcTensor>& pdc_class2,
                              const Band& band, double alpha_level) {
    require(pdc_class1.size() >= 2 && pdc_class2.size() >= 2, "edge screening needs at least two epochs per class");
    require(alpha_level > 0.0, "alpha level must be positive");
    const Index m = pdc_class1.front().n_channels();
    for (const auto* set : {&pdc_class1, &pdc_class2})
        for (const auto& t : *set) require(t.n_channels() == m, "PDC tensors disagree on channel count");

    EdgeSignificance sig;
    sig.alpha_level = alpha_level;
    sig.channel_names = pdc_class1.front().channel_names;
    if (sig.channel_names.size() != static_cast<std::size_t>(m)) {
        sig.channel_names.clear();
        for (Index c = 0; c < m; ++c) sig.channel_names.push_back("ch" + std::to_string(c + 1));
    }
    const bool keep_all = alpha_level >= 1.0;
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < m; ++i) {
            if (i == j) continue;
            const VectorN v1 = band_mean_pdc(pdc_class1, band, i, j);
            const VectorN v2 = band_mean_pdc(pdc_class2, band, i, j);
            const double p = ranksum(v1, v2);
            if (!(keep_all || p < alpha_level)) continue;
            const auto pred = median(v1) >= median(v2) ? ClassLabel::Class1 : ClassLabel::Class2;
            sig.edges.push_back({j, i, band, p, pred});
        }
    return sig;
}

void save_edges(const std::filesystem::path& path, const EdgeSignificance& sig) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "from,to,band_low,band_high,p_value,predominant\n";
    for (const auto& e : sig.edges)
        out << sig.channel_names[static_cast<std::size_t>(e.from)] << ',' << sig.channel_names[static_cast<std::size_t>(e.to)]
            << ',' << format_number(e.band.low_hz) << ',' << format_number(e.band.high_hz) << ','
            << format_number(e.p_value) << ',' << to_int(e.predominant) << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace mipdc
