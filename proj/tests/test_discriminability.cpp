#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mipdc/discriminability.hpp"
#include "mipdc/errors.hpp"
#include "mipdc/signal_io.hpp"
#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <random>

using namespace mipdc;

namespace {

double pearson_sq(const VectorN& x, const VectorN& y) {
    const VectorN xc = x.array() - x.mean();
    const VectorN yc = y.array() - y.mean();
    const double r = xc.dot(yc) / std::sqrt(xc.squaredNorm() * yc.squaredNorm());
    return r * r;
}

double brute_rsquared(const VectorN& a, const VectorN& b) {
    VectorN v(a.size() + b.size()), y(a.size() + b.size());
    v << a, b;
    y << VectorN::Constant(a.size(), 1.0), VectorN::Constant(b.size(), -1.0);
    return pearson_sq(v, y);
}

// Enumerates every split of the pooled ranks.
double exhaustive_ranksum(const VectorN& x, const VectorN& y) {
    const Index nx = x.size(), n = nx + y.size();
    VectorN pooled(n);
    pooled << x, y;
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return pooled[a] < pooled[b]; });
    VectorN rank(n);
    for (Index k = 0; k < n; ++k) rank[order[static_cast<std::size_t>(k)]] = double(k + 1);
    const double w = rank.head(nx).sum();

    std::vector<bool> pick(static_cast<std::size_t>(n), false);
    std::fill(pick.begin(), pick.begin() + nx, true);
    double lower = 0, upper = 0, total = 0;
    do {
        double s = 0;
        for (Index k = 0; k < n; ++k)
            if (pick[static_cast<std::size_t>(k)]) s += double(k + 1);
        total += 1;
        lower += s <= w;
        upper += s >= w;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

RSquaredMap map_of(const MatrixN& values) {
    RSquaredMap m;
    m.values = values;
    m.freqs_hz = frequency_grid(8, 8 + double(values.cols() - 1), 1);
    for (Index c = 0; c < values.rows(); ++c) m.channel_names.push_back("c" + std::to_string(c));
    return m;
}

// Per-epoch tensors with uniform noise in [0, 0.2] and an optional lift on one pair.
std::vector<PdcTensor> noise_tensors(int n_epochs, Index m, const std::vector<double>& freqs, std::mt19937_64& rng,
                                     Index lift_i = -1, Index lift_j = -1, double lift = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 0.2);
    std::vector<PdcTensor> out(static_cast<std::size_t>(n_epochs));
    for (auto& t : out) {
        t.freqs_hz = freqs;
        t.channel_names = {};
        for (std::size_t q = 0; q < freqs.size(); ++q) {
            MatrixN s(m, m);
            for (Index i = 0; i < m; ++i)
                for (Index j = 0; j < m; ++j) s(i, j) = u(rng);
            if (lift_i >= 0) s(lift_i, lift_j) += lift;
            t.slices.push_back(s);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("r squared worked examples") {
    VectorN a(3), b(3);
    a << 1, 1, 1;
    b << 0, 0, 0;
    CHECK(rsquared(a, b) == doctest::Approx(1.0));
    b << 1, 1, 1;
    CHECK(rsquared(a, b) == 0.0);
    a << 1, 2, 3;
    b << 1, 2, 3;
    CHECK(rsquared(a, b) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("r squared matches the pearson correlation with class indicators") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 50; ++rep) {
        const Index n1 = 2 + rep % 9, n2 = 3 + rep % 7;
        VectorN a(n1), b(n2);
        for (auto& v : a) v = g(rng) + 0.3 * rep / 10.0;
        for (auto& v : b) v = g(rng);
        const double r2 = rsquared(a, b);
        CHECK(r2 == doctest::Approx(brute_rsquared(a, b)).epsilon(1e-10));
        CHECK(r2 >= 0.0);
        CHECK(r2 <= 1.0);
        // Affine invariance and class symmetry.
        CHECK(rsquared((a.array() * -3.5 + 2.0).matrix(), (b.array() * -3.5 + 2.0).matrix()) ==
              doctest::Approx(r2).epsilon(1e-10));
        CHECK(rsquared(b, a) == doctest::Approx(r2).epsilon(1e-12));
    }
}

TEST_CASE("r squared under the null stays small") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    std::vector<double> r2;
    for (int rep = 0; rep < 1000; ++rep) {
        VectorN a(30), b(30);
        for (auto& v : a) v = g(rng);
        for (auto& v : b) v = g(rng);
        r2.push_back(rsquared(a, b));
    }
    std::sort(r2.begin(), r2.end());
    CHECK(r2[949] < 0.25);
}

TEST_CASE("r squared map finds a planted difference") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g(1.0, 0.1);
    const auto freqs = frequency_grid(8, 30, 1);
    const auto names = default_channel_names();
    PsdStack c1, c2;
    for (int e = 0; e < 30; ++e)
        for (auto* stack : {&c1, &c2}) {
            MatrixN p(16, 23);
            for (Index i = 0; i < p.size(); ++i) p.data()[i] = g(rng);
            if (stack == &c2) p(3, 16) += 0.3;  // 24 Hz
            stack->push_back(p);
        }
    const auto map = rsquared_map(c1, c2, freqs, names);
    CHECK(map.values.rows() == 16);
    CHECK(map.values.cols() == 23);
    CHECK(map.channel_names == names);
    const auto spec = select_features(map);
    CHECK(spec.channel == 3);
    CHECK(spec.channel_name == names[3]);
    CHECK(spec.center_hz == 24.0);
    CHECK(spec.band.low_hz == 23.0);
    CHECK(spec.band.high_hz == 25.0);
    CHECK_FALSE(spec.degenerate);

    CHECK_THROWS_AS(rsquared_map(c1, c2, frequency_grid(8, 20, 1), names), ContractError);
}

TEST_CASE("feature selection windows and ties") {
    MatrixN v = MatrixN::Zero(3, 11);
    v(1, 2) = 0.4;
    auto spec = select_features(map_of(v));
    CHECK(spec.channel == 1);
    CHECK(spec.center_hz == 10.0);
    CHECK(spec.band.low_hz == 9.0);
    CHECK(spec.band.high_hz == 11.0);
    CHECK(spec.rsquared == doctest::Approx(0.4));

    v(1, 2) = 0.0;
    v(2, 0) = 0.4;  // at the grid edge
    spec = select_features(map_of(v));
    CHECK(spec.band.low_hz == 8.0);
    CHECK(spec.band.high_hz == 9.0);

    v(0, 5) = 0.4;  // tie: lowest channel wins
    v(0, 7) = 0.4;
    spec = select_features(map_of(v));
    CHECK(spec.channel == 0);
    CHECK(spec.center_hz == 13.0);

    spec = select_features(map_of(MatrixN::Zero(2, 4)));
    CHECK(spec.degenerate);
    CHECK(spec.channel == 0);
    CHECK(spec.center_hz == 8.0);
}

TEST_CASE("rank sum worked examples") {
    VectorN x(3), y(3);
    x << 1, 2, 3;
    y << 4, 5, 6;
    CHECK(ranksum(x, y) == doctest::Approx(0.1));
    CHECK(ranksum(y, x) == doctest::Approx(0.1));
    CHECK(ranksum(x, x) >= 0.99);
    VectorN z(4);
    z << 1, 1, 1, 1;
    CHECK(ranksum(z, z) == doctest::Approx(1.0));
    CHECK_THROWS_AS(ranksum(VectorN(0), y), ContractError);
    VectorN t(3);
    t << 1, 1, 2;
    CHECK_THROWS_AS(ranksum(t, y, RanksumMethod::Exact), ContractError);
}

TEST_CASE("exact rank sum agrees with exhaustive enumeration") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 60; ++rep) {
        const Index nx = 1 + rep % 6, ny = 1 + (rep / 6) % 6;
        VectorN x(nx), y(ny);
        for (auto& v : x) v = g(rng) + 0.5;
        for (auto& v : y) v = g(rng);
        CHECK(ranksum(x, y, RanksumMethod::Exact) == doctest::Approx(exhaustive_ranksum(x, y)).epsilon(1e-12));
        CHECK(ranksum(x, y) == doctest::Approx(ranksum(y, x)).epsilon(1e-12));
    }
}

TEST_CASE("normal approximation is close to exact at 10 + 10") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 40; ++rep) {
        VectorN x(10), y(10);
        for (auto& v : x) v = g(rng) + 0.4;
        for (auto& v : y) v = g(rng);
        CHECK(std::abs(ranksum(x, y, RanksumMethod::Exact) - ranksum(x, y, RanksumMethod::Normal)) < 0.02);
    }
}

TEST_CASE("rank sum p values are uniform-ish under the null") {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> g;
    int below = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        VectorN x(30), y(30);
        for (auto& v : x) v = g(rng);
        for (auto& v : y) v = g(rng);
        below += ranksum(x, y) < 0.05;
    }
    CHECK(below > 60);
    CHECK(below < 140);
}

TEST_CASE("edge screening") {
    std::mt19937_64 rng(23);
    const auto freqs = frequency_grid(8, 30, 1);
    const Band alpha{8, 12}, beta{13, 30};
    auto c1 = noise_tensors(30, 4, freqs, rng, 2, 1, 0.2);
    auto c2 = noise_tensors(30, 4, freqs, rng);

    SUBCASE("the lifted pair is found") {
        const auto sig = screen_edges(c1, c2, alpha, 0.001);
        REQUIRE(sig.edges.size() >= 1);
        bool found = false;
        for (const auto& e : sig.edges) {
            CHECK(e.from != e.to);
            CHECK(e.p_value < 0.001);
            if (e.from == 1 && e.to == 2) {
                found = true;
                CHECK(e.predominant == ClassLabel::Class1);
            }
        }
        CHECK(found);
        CHECK(sig.mask()(2, 1) == 1.0);
        CHECK(sig.expected_null_edges() == doctest::Approx(0.012));
    }
    SUBCASE("swapping classes keeps p values and flips predominance") {
        const auto a = screen_edges(c1, c2, alpha, 1.0);
        const auto b = screen_edges(c2, c1, alpha, 1.0);
        REQUIRE(a.edges.size() == 12);
        REQUIRE(b.edges.size() == 12);
        for (std::size_t k = 0; k < a.edges.size(); ++k) {
            CHECK(a.edges[k].p_value == doctest::Approx(b.edges[k].p_value).epsilon(1e-12));
            if (a.edges[k].from == 1 && a.edges[k].to == 2) CHECK(b.edges[k].predominant == ClassLabel::Class2);
        }
    }
    SUBCASE("values outside the band are ignored") {
        const auto before = screen_edges(c1, c2, alpha, 1.0);
        for (auto& t : c2)
            for (std::size_t q = 0; q < freqs.size(); ++q)
                if (!alpha.contains(freqs[q])) t.slices[q].array() += 5.0;
        const auto after = screen_edges(c1, c2, alpha, 1.0);
        for (std::size_t k = 0; k < before.edges.size(); ++k) CHECK(after.edges[k].p_value == before.edges[k].p_value);
        const auto in_beta = screen_edges(c1, c2, beta, 0.001);
        CHECK(in_beta.edges.size() == 12);
    }
    SUBCASE("alpha one keeps all ordered pairs of 16 channels") {
        auto d1 = noise_tensors(5, 16, freqs, rng);
        auto d2 = noise_tensors(5, 16, freqs, rng);
        CHECK(screen_edges(d1, d2, beta, 1.0).edges.size() == 240);
    }
    SUBCASE("contracts") {
        CHECK_THROWS_AS(screen_edges({c1[0]}, c2, alpha, 0.01), ContractError);
        CHECK_THROWS_AS(screen_edges(c1, c2, alpha, 0.0), ContractError);
    }
}

TEST_CASE("band mean pdc averages in-band bins") {
    PdcTensor t;
    t.freqs_hz = {8, 9, 10, 11};
    for (double v : {1.0, 2.0, 3.0, 100.0}) t.slices.push_back(MatrixN::Constant(2, 2, v));
    const auto v = band_mean_pdc({t, t}, Band{8, 10}, 0, 1);
    REQUIRE(v.size() == 2);
    CHECK(v[0] == doctest::Approx(2.0));
}

TEST_CASE("edges csv") {
    testing::TempDir dir("edges");
    EdgeSignificance sig;
    sig.channel_names = {"A", "B"};
    sig.edges.push_back({0, 1, Band{8, 12}, 2.5e-4, ClassLabel::Class2});
    save_edges(dir / "e.csv", sig);
    std::ifstream in(dir / "e.csv");
    std::string header, row, extra;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "from,to,band_low,band_high,p_value,predominant");
    CHECK(row.rfind("A,B,8,12,", 0) == 0);
    CHECK(row.back() == '2');
    CHECK_FALSE(std::getline(in, extra));
    CHECK_THROWS_AS(save_edges(dir / "nope/e.csv", sig), IoError);
}
