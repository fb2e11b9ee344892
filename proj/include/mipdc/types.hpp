#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace mipdc {

using Scalar = double;
using Eigen::Index;

template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatrixN = MatrixX<Scalar>;
using VectorN = VectorX<Scalar>;
using VectorNi = Eigen::Matrix<int, Eigen::Dynamic, 1>;
using MatrixNc = MatrixX<std::complex<Scalar>>;
using ConstMatRefN = Eigen::Ref<const MatrixN>;
using ConstVecRefN = Eigen::Ref<const VectorN>;

/// Motor-imagery task label. Class1 is right hand, Class2 left hand.
enum class ClassLabel : int { Class1 = 1, Class2 = 2 };

inline int to_int(ClassLabel c) { return static_cast<int>(c); }
inline ClassLabel other(ClassLabel c) {
    return c == ClassLabel::Class1 ? ClassLabel::Class2 : ClassLabel::Class1;
}
inline std::string to_string(ClassLabel c) {
    return c == ClassLabel::Class1 ? "class1" : "class2";
}

/// Closed frequency interval [low_hz, high_hz].
struct Band {
    double low_hz = 0.0;
    double high_hz = 0.0;

    bool contains(double f_hz) const {
        constexpr double eps = 1e-9;
        return f_hz >= low_hz - eps && f_hz <= high_hz + eps;
    }
    std::string label() const;
};

/// Inclusive linear grid low, low+step, ..., up to high.
std::vector<double> frequency_grid(double low_hz, double high_hz, double step_hz);

/// Indices into freqs that fall inside band.
std::vector<Index> band_indices(const std::vector<double>& freqs, const Band& band);

/// The 16 electrodes of the reference montage (10/20 system).
const std::vector<std::string>& default_channel_names();

constexpr double kDefaultSampleRateHz = 1200.0;

}  // namespace mipdc
