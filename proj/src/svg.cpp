#include "mipdc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace mipdc::svg {

namespace {

constexpr const char* kClass1Color = "#8c510a";  // brown
constexpr const char* kClass2Color = "#1b7837";  // green

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string header(double w, double h) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) +
           "\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, const std::string& extra = "") {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\"" + (extra.empty() ? "" : " " + extra) + ">" + escape(s) +
           "</text>\n";
}

// White -> yellow -> red -> dark red ramp on t in [0, 1].
std::string heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    static const double stops[4][3] = {{255, 255, 255}, {254, 224, 76}, {227, 74, 51}, {127, 0, 0}};
    const double pos = t * 3.0;
    const int k = std::min(static_cast<int>(pos), 2);
    const double u = pos - k;
    char buf[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(stops[k][c] + u * (stops[k + 1][c] - stops[k][c])));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

std::string freq_label(double f) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%g", f);
    return buf;
}

}  // namespace

std::string rsquared_heatmap(const RSquaredMap& map) {
    const auto rows = static_cast<double>(map.values.rows());
    const auto cols = static_cast<double>(map.values.cols());
    const double cell = 22.0, left = 60.0, top = 40.0;
    const double width = left + cols * cell + 110.0;
    const double height = top + rows * cell + 50.0;
    const double vmax = map.values.size() ? map.values.maxCoeff() : 0.0;

    std::ostringstream out;
    out << header(width, height);
    out << text(left, 20, "r^2 map (channels x frequency, Hz)", "font-size=\"13\"");
    for (Index c = 0; c < map.values.rows(); ++c) {
        out << text(left - 6, top + (c + 0.5) * cell + 4, map.channel_names[static_cast<std::size_t>(c)], "text-anchor=\"end\"");
        for (Index q = 0; q < map.values.cols(); ++q) {
            const double t = vmax > 0.0 ? map.values(c, q) / vmax : 0.0;
            out << "<rect x=\"" << num(left + q * cell) << "\" y=\"" << num(top + c * cell) << "\" width=\"" << num(cell)
                << "\" height=\"" << num(cell) << "\" fill=\"" << heat_color(t) << "\"/>\n";
        }
    }
    for (Index q = 0; q < map.values.cols(); ++q)
        out << text(left + (q + 0.5) * cell, top + rows * cell + 14, freq_label(map.freqs_hz[static_cast<std::size_t>(q)]),
                    "text-anchor=\"middle\" font-size=\"9\"");
    const double lx = left + cols * cell + 20.0;
    for (int k = 0; k < 20; ++k)
        out << "<rect x=\"" << num(lx) << "\" y=\"" << num(top + (19 - k) * 8.0) << "\" width=\"16\" height=\"8\" fill=\""
            << heat_color((k + 0.5) / 20.0) << "\"/>\n";
    out << text(lx + 20, top + 8, "max " + num(vmax));
    out << text(lx + 20, top + 160, "0");
    out << "</svg>\n";
    return out.str();
}

std::string edge_diagram(const EdgeSignificance& sig, const std::string& title) {
    const double size = 520.0, cx = size / 2, cy = size / 2 + 10, radius = 200.0;
    const auto m = sig.channel_names.size();
    auto pos = [&](std::size_t k) {
        const double angle = -std::numbers::pi / 2 + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        return std::pair{cx + radius * std::cos(angle), cy + radius * std::sin(angle)};
    };

    std::ostringstream out;
    out << header(size, size + 40);
    out << "<defs>\n";
    for (const auto& [id, color] : {std::pair{"c1", kClass1Color}, std::pair{"c2", kClass2Color}})
        out << "<marker id=\"arrow-" << id << "\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"7\" "
            << "markerHeight=\"7\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"" << color << "\"/></marker>\n";
    out << "</defs>\n";
    out << text(20, 22, title, "font-size=\"13\"");
    for (const auto& e : sig.edges) {
        auto [x1, y1] = pos(static_cast<std::size_t>(e.from));
        auto [x2, y2] = pos(static_cast<std::size_t>(e.to));
        const double dx = x2 - x1, dy = y2 - y1, len = std::hypot(dx, dy);
        const double shrink = len > 0 ? 14.0 / len : 0.0;
        const bool c1 = e.predominant == ClassLabel::Class1;
        out << "<line x1=\"" << num(x1 + dx * shrink) << "\" y1=\"" << num(y1 + dy * shrink) << "\" x2=\""
            << num(x2 - dx * shrink) << "\" y2=\"" << num(y2 - dy * shrink) << "\" stroke=\""
            << (c1 ? kClass1Color : kClass2Color) << "\" stroke-width=\"1.6\" marker-end=\"url(#arrow-"
            << (c1 ? "c1" : "c2") << ")\"/>\n";
    }
    for (std::size_t k = 0; k < m; ++k) {
        auto [x, y] = pos(k);
        out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"13\" fill=\"#f0f0f0\" stroke=\"#333\"/>\n";
        out << text(x, y + 4, sig.channel_names[k], "text-anchor=\"middle\" font-size=\"9\"");
    }
    out << text(20, size + 20, "class 1 predominant", std::string("fill=\"") + kClass1Color + "\"");
    out << text(180, size + 20, "class 2 predominant", std::string("fill=\"") + kClass2Color + "\"");
    out << text(340, size + 20, std::to_string(sig.edges.size()) + " edges, p < " + freq_label(sig.alpha_level));
    out << "</svg>\n";
    return out.str();
}

std::string flow_bars(const FlowMap& class1, const FlowMap& class2, const std::string& title) {
    const auto m = static_cast<std::size_t>(class1.outflow.size());
    const double slot = 34.0, left = 50.0, panel_h = 180.0, top = 40.0;
    const double width = left + static_cast<double>(m) * slot + 30.0;
    const double height = top + 2 * (panel_h + 40.0) + 20.0;
    double vmax = 0.0;
    for (const auto* f : {&class1, &class2})
        vmax = std::max({vmax, f->outflow.size() ? f->outflow.maxCoeff() : 0.0, f->inflow.size() ? f->inflow.maxCoeff() : 0.0});

    std::ostringstream out;
    out << header(width, height);
    out << text(left, 20, title, "font-size=\"13\"");
    int panel = 0;
    for (const auto* f : {&class1, &class2}) {
        const double base = top + panel * (panel_h + 40.0) + panel_h;
        out << text(left, base - panel_h - 4, to_string(f->label) + " (max " + num(vmax) + ")");
        out << "<line x1=\"" << num(left) << "\" y1=\"" << num(base) << "\" x2=\"" << num(width - 20) << "\" y2=\""
            << num(base) << "\" stroke=\"#333\"/>\n";
        for (std::size_t c = 0; c < m; ++c) {
            const double x = left + static_cast<double>(c) * slot;
            const double h_out = vmax > 0 ? f->outflow[static_cast<Index>(c)] / vmax * panel_h : 0.0;
            const double h_in = vmax > 0 ? f->inflow[static_cast<Index>(c)] / vmax * panel_h : 0.0;
            out << "<rect x=\"" << num(x + 4) << "\" y=\"" << num(base - h_out) << "\" width=\"12\" height=\"" << num(h_out)
                << "\" fill=\"#d6604d\"/>\n";
            out << "<rect x=\"" << num(x + 16) << "\" y=\"" << num(base - h_in) << "\" width=\"12\" height=\"" << num(h_in)
                << "\" fill=\"#4393c3\"/>\n";
            const auto& name = c < f->channel_names.size() ? f->channel_names[c] : std::to_string(c + 1);
            out << text(x + 16, base + 12, name, "text-anchor=\"middle\" font-size=\"9\"");
        }
        ++panel;
    }
    out << text(left, height - 8, "outflow", "fill=\"#d6604d\"");
    out << text(left + 70, height - 8, "inflow", "fill=\"#4393c3\"");
    out << "</svg>\n";
    return out.str();
}

}  // namespace mipdc::svg
