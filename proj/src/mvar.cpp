#include "mipdc/mvar.hpp"

#include "mipdc/errors.hpp"

#include <cmath>
#include <limits>

namespace mipdc {

namespace {

constexpr double kMinRcond = 1e-12;

MatrixN demeaned(const ConstMatRefN& x) {
    return x.colwise() - x.rowwise().mean();
}

// Stacked lag regressors: block k (k = 1..order) holds x(n - k) for targets
// n = first_target..N-1.
MatrixN lag_matrix(const MatrixN& x, int order, Index first_target) {
    const Index m = x.rows();
    const Index len = x.cols() - first_target;
    MatrixN z(m * order, len);
    for (int k = 1; k <= order; ++k) z.middleRows((k - 1) * m, m) = x.middleCols(first_target - k, len);
    return z;
}

void check_length(Index n_samples, Index n_channels, int order) {
    require(order >= 1, "MVAR order must be >= 1");
    if (n_samples <= n_channels * order + order)
        throw LengthError("epoch of " + std::to_string(n_samples) + " samples is too short for an MVAR(" +
                          std::to_string(order) + ") with " + std::to_string(n_channels) + " channels");
}

void check_variance(const MatrixN& x) {
    for (Index c = 0; c < x.rows(); ++c)
        if (x.row(c).squaredNorm() == 0.0)
            throw SingularityError("channel " + std::to_string(c) + " is constant; regressor Gram matrix is singular");
}

Eigen::LLT<MatrixN> factor_gram(const MatrixN& gram) {
    Eigen::LLT<MatrixN> llt(gram);
    if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond))
        throw SingularityError("regressor Gram matrix is singular (duplicated or degenerate channels?)");
    return llt;
}

MatrixN gram_of(const MatrixN& z) {
    MatrixN g = MatrixN::Zero(z.rows(), z.rows());
    g.selfadjointView<Eigen::Lower>().rankUpdate(z);
    return g.selfadjointView<Eigen::Lower>();
}

}  // namespace

MvarModel make_mvar(std::vector<MatrixN> coeffs, MatrixN noise_cov) {
    require(!coeffs.empty() || noise_cov.size() > 0, "cannot infer channel count");
    const Index m = coeffs.empty() ? noise_cov.rows() : coeffs.front().rows();
    MvarModel model;
    model.coeffs = std::move(coeffs);
    model.noise_cov = noise_cov.size() > 0 ? std::move(noise_cov) : MatrixN::Identity(m, m);
    for (Index c = 0; c < m; ++c) model.channel_names.push_back("ch" + std::to_string(c + 1));
    model.validate();
    return model;
}

MvarModel fit_mvar(const ConstMatRefN& samples, int order) {
    const Index m = samples.rows();
    const Index n = samples.cols();
    check_length(n, m, order);
    const MatrixN x = demeaned(samples);
    check_variance(x);

    const MatrixN z = lag_matrix(x, order, order);
    const MatrixN y = x.rightCols(n - order);
    const auto llt = factor_gram(gram_of(z));
    const MatrixN b = llt.solve(z * y.transpose()).transpose();  // M x Mp

    const MatrixN resid = y - b * z;
    const double divisor = std::max<double>(static_cast<double>(n - order - m * order), 1.0);
    MvarModel model;
    model.noise_cov = (resid * resid.transpose()) / divisor;
    model.noise_cov = 0.5 * (model.noise_cov + model.noise_cov.transpose());
    for (int k = 0; k < order; ++k) model.coeffs.push_back(b.middleCols(k * m, m));
    for (Index c = 0; c < m; ++c) model.channel_names.push_back("ch" + std::to_string(c + 1));
    return model;
}

MvarModel fit_mvar(const Epoch& epoch, int order) {
    return fit_mvar(epoch.samples, order);
}

std::vector<double> aic_scores(const ConstMatRefN& samples, int max_order) {
    require(max_order >= 1, "AIC max order must be >= 1");
    const Index m = samples.rows();
    const Index n = samples.cols();
    check_length(n, m, max_order);
    const MatrixN x = demeaned(samples);
    check_variance(x);

    // One Gram over the largest lag set; smaller orders use its leading blocks.
    const MatrixN z = lag_matrix(x, max_order, max_order);
    const MatrixN y = x.rightCols(n - max_order);
    const MatrixN gram = gram_of(z);
    const MatrixN cross = y * z.transpose();
    const MatrixN yy = y * y.transpose();
    const auto n_eff = static_cast<double>(n - max_order);

    // Lag Grams are nested, so once one is numerically singular every larger
    // order is too; those orders score +inf.
    std::vector<double> scores(static_cast<std::size_t>(max_order), std::numeric_limits<double>::infinity());
    for (int p = 1; p <= max_order; ++p) {
        const Index k = m * p;
        Eigen::LLT<MatrixN> llt(gram.topLeftCorner(k, k));
        if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond)) {
            if (p == 1) throw SingularityError("regressor Gram matrix is singular (duplicated or degenerate channels?)");
            break;
        }
        const MatrixN cp = cross.leftCols(k);
        MatrixN sigma = (yy - cp * llt.solve(cp.transpose())) / n_eff;
        sigma = 0.5 * (sigma + sigma.transpose());
        Eigen::LLT<MatrixN> sl(sigma);
        if (sl.info() != Eigen::Success) {
            if (p == 1) throw SingularityError("residual covariance at order 1 is not positive definite");
            break;
        }
        const double logdet = 2.0 * sl.matrixL().toDenseMatrix().diagonal().array().log().sum();
        scores[static_cast<std::size_t>(p) - 1] = n_eff * logdet + 2.0 * static_cast<double>(m * m * p);
    }
    return scores;
}

int select_order_aic(const ConstMatRefN& samples, int max_order) {
    const auto scores = aic_scores(samples, max_order);
    int best = 1;
    for (int p = 2; p <= max_order; ++p)
        if (scores[static_cast<std::size_t>(p) - 1] < scores[static_cast<std::size_t>(best) - 1]) best = p;
    return best;
}

int select_order_aic(const Epoch& epoch, int max_order) {
    return select_order_aic(epoch.samples, max_order);
}

namespace {

nlohmann::json matrix_json(const MatrixN& a) {
    auto rows = nlohmann::json::array();
    for (Index i = 0; i < a.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixN matrix_from_json(const nlohmann::json& j) {
    const auto rows = static_cast<Index>(j.size());
    const auto cols = rows ? static_cast<Index>(j.at(0).size()) : 0;
    MatrixN a(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Index>(row.size()) != cols) throw FormatError("ragged matrix in JSON");
        for (Index c = 0; c < cols; ++c) a(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return a;
}

}  // namespace

void to_json(nlohmann::json& j, const MvarModel& model) {
    auto a = nlohmann::json::array();
    for (const auto& ak : model.coeffs) a.push_back(matrix_json(ak));
    j = {{"p", model.order()}, {"A", std::move(a)}, {"noise_cov", matrix_json(model.noise_cov)},
         {"channels", model.channel_names}};
}

void from_json(const nlohmann::json& j, MvarModel& model) {
    try {
        model.coeffs.clear();
        for (const auto& ak : j.at("A")) model.coeffs.push_back(matrix_from_json(ak));
        model.noise_cov = matrix_from_json(j.at("noise_cov"));
        model.channel_names = j.at("channels").get<std::vector<std::string>>();
        if (j.at("p").get<int>() != model.order()) throw FormatError("MVAR JSON: 'p' disagrees with length of 'A'");
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("MVAR JSON: ") + e.what());
    }
    model.validate();
}

}  // namespace mipdc
