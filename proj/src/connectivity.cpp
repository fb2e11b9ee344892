#include "mipdc/connectivity.hpp"

#include "mipdc/signal_io.hpp"

#include <algorithm>
#include <fstream>

namespace mipdc {

namespace {

double median_of(std::vector<double>& v) {
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

std::vector<Index> checked_band(const std::vector<PdcTensor>& per_epoch, const Band& band) {
    require(!per_epoch.empty(), "need at least one PDC tensor");
    const auto& ref = per_epoch.front();
    for (const auto& t : per_epoch)
        require(t.freqs_hz == ref.freqs_hz && t.n_channels() == ref.n_channels(),
                "PDC tensors must share channels and frequency grid");
    auto idx = band_indices(ref.freqs_hz, band);
    if (idx.empty()) throw RangeError("band " + band.label() + " Hz does not intersect the frequency grid");
    return idx;
}

}  // namespace

PdcTensor pdc(const MvarModel& model, const std::vector<double>& freqs_hz, double sample_rate_hz) {
    require(!freqs_hz.empty(), "PDC frequency grid is empty");
    for (std::size_t q = 0; q < freqs_hz.size(); ++q) {
        require(freqs_hz[q] >= 0.0 && freqs_hz[q] < sample_rate_hz / 2.0, "PDC frequency outside [0, Nyquist)");
        require(q == 0 || freqs_hz[q] > freqs_hz[q - 1], "PDC frequency grid must be strictly increasing");
    }
    PdcTensor t;
    t.freqs_hz = freqs_hz;
    t.channel_names = model.channel_names;
    t.slices.reserve(freqs_hz.size());
    for (const double f : freqs_hz) t.slices.push_back(pdc_magnitudes(transfer_matrix(model, f, sample_rate_hz)));
    return t;
}

std::vector<MatrixN> epoch_median_slices(const std::vector<PdcTensor>& per_epoch, const Band& band) {
    const auto idx = checked_band(per_epoch, band);
    const Index m = per_epoch.front().n_channels();
    std::vector<MatrixN> out;
    std::vector<double> buf(per_epoch.size());
    for (const Index q : idx) {
        MatrixN med(m, m);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j) {
                for (std::size_t e = 0; e < per_epoch.size(); ++e)
                    buf[e] = per_epoch[e].at(i, j, static_cast<std::size_t>(q));
                med(i, j) = median_of(buf);
            }
        out.push_back(std::move(med));
    }
    return out;
}

MatrixN band_median_pdc(const std::vector<PdcTensor>& per_epoch, const Band& band) {
    const auto idx = checked_band(per_epoch, band);
    const Index m = per_epoch.front().n_channels();
    MatrixN out(m, m);
    std::vector<double> buf;
    buf.reserve(per_epoch.size() * idx.size());
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            buf.clear();
            for (const auto& t : per_epoch)
                for (const Index q : idx) buf.push_back(t.at(i, j, static_cast<std::size_t>(q)));
            out(i, j) = median_of(buf);
        }
    return out;
}

FlowMap flow_map(const std::vector<PdcTensor>& per_epoch, const Band& band, ClassLabel label,
                 const std::optional<MatrixN>& edge_mask) {
    const auto slices = epoch_median_slices(per_epoch, band);
    const Index m = per_epoch.front().n_channels();
    if (edge_mask) require(edge_mask->rows() == m && edge_mask->cols() == m, "edge mask must be M x M");

    MatrixN mass = MatrixN::Zero(m, m);
    for (const auto& s : slices) mass += s.cwiseAbs2();
    mass.diagonal().setZero();
    if (edge_mask) mass = mass.cwiseProduct((edge_mask->array() != 0.0).cast<double>().matrix());

    FlowMap flows;
    flows.outflow = mass.colwise().sum().transpose();
    flows.inflow = mass.rowwise().sum();
    flows.band = band;
    flows.label = label;
    flows.channel_names = per_epoch.front().channel_names;
    return flows;
}

void to_json(nlohmann::json& j, const PdcTensor& tensor) {
    auto values = nlohmann::json::array();
    const Index m = tensor.n_channels();
    for (Index i = 0; i < m; ++i)
        for (Index jj = 0; jj < m; ++jj)
            for (std::size_t q = 0; q < tensor.n_freqs(); ++q) values.push_back(tensor.at(i, jj, q));
    j = {{"freqs", tensor.freqs_hz}, {"channels", tensor.channel_names}, {"values", std::move(values)}};
}

void from_json(const nlohmann::json& j, PdcTensor& tensor) {
    try {
        tensor.freqs_hz = j.at("freqs").get<std::vector<double>>();
        tensor.channel_names = j.at("channels").get<std::vector<std::string>>();
        const auto& values = j.at("values");
        const auto m = static_cast<Index>(tensor.channel_names.size());
        const std::size_t nf = tensor.freqs_hz.size();
        if (values.size() != static_cast<std::size_t>(m * m) * nf)
            throw FormatError("PDC JSON: value count does not match channels x channels x freqs");
        tensor.slices.assign(nf, MatrixN(m, m));
        std::size_t k = 0;
        for (Index i = 0; i < m; ++i)
            for (Index jj = 0; jj < m; ++jj)
                for (std::size_t q = 0; q < nf; ++q) tensor.slices[q](i, jj) = values.at(k++).get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("PDC JSON: ") + e.what());
    }
}

void save_flow_map(const std::filesystem::path& path, const FlowMap& flows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "channel,outflow,inflow\n";
    for (Index c = 0; c < flows.outflow.size(); ++c) {
        const auto name = static_cast<std::size_t>(c) < flows.channel_names.size()
                              ? flows.channel_names[static_cast<std::size_t>(c)]
                              : "ch" + std::to_string(c + 1);
        out << name << ',' << format_number(flows.outflow[c]) << ',' << format_number(flows.inflow[c]) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace mipdc
