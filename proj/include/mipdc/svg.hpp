#pragma once

#include "mipdc/connectivity.hpp"
#include "mipdc/discriminability.hpp"

#include <string>

namespace mipdc::svg {

/// Channels x frequencies heatmap on the fixed scale [0, max]; max is printed.
std::string rsquared_heatmap(const RSquaredMap& map);

/// Channels on a circle, one arrow per edge colored by predominant class.
std::string edge_diagram(const EdgeSignificance& sig, const std::string& title);

/// Outflow and inflow bars per channel, one panel per class.
std::string flow_bars(const FlowMap& class1, const FlowMap& class2, const std::string& title);

}  // namespace mipdc::svg
