#include "mipdc/types.hpp"

#include "mipdc/errors.hpp"

#include <cmath>
#include <cstdio>

namespace mipdc {

std::string Band::label() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g-%g", low_hz, high_hz);
    return buf;
}

std::vector<double> frequency_grid(double low_hz, double high_hz, double step_hz) {
    require(step_hz > 0.0, "frequency grid step must be positive");
    require(low_hz <= high_hz, "frequency grid low must not exceed high");
    // Computed as low + k*step so that 1 Hz grids hit integers exactly.
    const auto n = static_cast<std::size_t>(std::floor((high_hz - low_hz) / step_hz + 1e-9)) + 1;
    std::vector<double> grid(n);
    for (std::size_t k = 0; k < n; ++k) grid[k] = low_hz + static_cast<double>(k) * step_hz;
    return grid;
}

std::vector<Index> band_indices(const std::vector<double>& freqs, const Band& band) {
    std::vector<Index> idx;
    for (std::size_t k = 0; k < freqs.size(); ++k)
        if (band.contains(freqs[k])) idx.push_back(static_cast<Index>(k));
    return idx;
}

const std::vector<std::string>& default_channel_names() {
    static const std::vector<std::string> names = {
        "FC5", "FC1", "FC2", "FC6", "C3", "CZ", "C4", "CP5",
        "CP1", "CP2", "CP6", "P3", "PZ", "P4", "PO3", "PO4"};
    return names;
}

}  // namespace mipdc
