#pragma once

#include "mipdc/types.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace testing {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("mipdc_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline mipdc::VectorN white_noise(mipdc::Index n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sd);
    mipdc::VectorN x(n);
    for (mipdc::Index i = 0; i < n; ++i) x[i] = normal(rng);
    return x;
}

inline mipdc::VectorN ar_series(const mipdc::VectorN& a, mipdc::Index n, std::uint64_t seed, mipdc::Index burn = 2000) {
    const mipdc::VectorN e = white_noise(n + burn, seed);
    mipdc::VectorN x = mipdc::VectorN::Zero(n + burn);
    for (mipdc::Index t = 0; t < n + burn; ++t) {
        double v = e[t];
        for (mipdc::Index k = 0; k < a.size(); ++k)
            if (t - k - 1 >= 0) v += a[k] * x[t - k - 1];
        x[t] = v;
    }
    return x.tail(n);
}

}  // namespace testing
