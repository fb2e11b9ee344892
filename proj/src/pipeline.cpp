#include "mipdc/pipeline.hpp"

#include "mipdc/burg.hpp"
#include "mipdc/mvar.hpp"
#include "mipdc/parallel.hpp"
#include "mipdc/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace mipdc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string shortest(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Reads keys with defaults and records every resolved value.
class Resolver {
public:
    explicit Resolver(const ConfigStore& in) : in_(in), out_(in) {}

    double real(const std::string& key, double fallback) {
        const double v = in_.get_double(key, fallback);
        out_.set(key, shortest(v));
        return v;
    }
    long integer(const std::string& key, long fallback) {
        const long v = in_.get_int(key, fallback);
        out_.set(key, std::to_string(v));
        return v;
    }
    bool flag(const std::string& key, bool fallback) {
        const bool v = in_.get_bool(key, fallback);
        out_.set(key, v ? "true" : "false");
        return v;
    }
    std::string str(const std::string& key, const std::string& fallback) {
        auto v = in_.get_string(key, fallback);
        out_.set(key, v);
        return v;
    }
    ConfigStore take() { return std::move(out_); }

private:
    const ConfigStore& in_;
    ConfigStore out_;
};

Band parse_band(const std::string& key, const std::string& text) {
    const auto dash = text.find('-', 1);
    double lo = 0, hi = 0;
    auto parse = [&](std::string s, double& v) {
        s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
    };
    if (dash == std::string::npos || !parse(text.substr(0, dash), lo) || !parse(text.substr(dash + 1), hi) || !(lo <= hi))
        throw ContractError("band '" + key + "' expects low-high in Hz, got '" + text + "'");
    return {lo, hi};
}

SignalFormat parse_format(const std::string& key, const std::string& text, const std::string& path) {
    if (text == "csv") return SignalFormat::Csv;
    if (text == "binary") return SignalFormat::Binary;
    if (text == "auto") return fs::path(path).extension() == ".bin" ? SignalFormat::Binary : SignalFormat::Csv;
    throw ContractError("config key '" + key + "' expects csv, binary or auto, got '" + text + "'");
}

Index channel_index(const std::string& token, const std::vector<std::string>& names) {
    const auto it = std::find(names.begin(), names.end(), token);
    if (it != names.end()) return it - names.begin();
    long v = -1;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || v < 0 ||
        v >= static_cast<long>(names.size()))
        throw ContractError("unknown channel '" + token + "'");
    return v;
}

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

// "FROM>TO:WEIGHT[@LAG]" entries separated by commas.
std::vector<WeightedEdge> parse_edges(const std::string& key, const std::string& text,
                                      const std::vector<std::string>& names) {
    std::vector<WeightedEdge> edges;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = strip(item);
        if (item.empty()) continue;
        const auto gt = item.find('>');
        const auto colon = item.find(':');
        if (gt == std::string::npos || colon == std::string::npos || colon < gt)
            throw ContractError("config key '" + key + "': edge '" + item + "' must look like FROM>TO:WEIGHT[@LAG]");
        WeightedEdge e;
        e.from = channel_index(strip(item.substr(0, gt)), names);
        e.to = channel_index(strip(item.substr(gt + 1, colon - gt - 1)), names);
        auto rest = item.substr(colon + 1);
        if (const auto at = rest.find('@'); at != std::string::npos) {
            e.lag = std::stoi(rest.substr(at + 1));
            rest = rest.substr(0, at);
        }
        rest = strip(rest);
        const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), e.weight);
        if (rest.empty() || ec != std::errc() || ptr != rest.data() + rest.size())
            throw ContractError("config key '" + key + "': bad weight in edge '" + item + "'");
        edges.push_back(e);
    }
    return edges;
}

std::vector<std::string> scenario_names(Index n) {
    if (n == static_cast<Index>(default_channel_names().size())) return default_channel_names();
    std::vector<std::string> names;
    for (Index c = 0; c < n; ++c) names.push_back("ch" + std::to_string(c + 1));
    return names;
}

}  // namespace

PipelineConfig resolve_config(const ConfigStore& store) {
    Resolver r(store);
    PipelineConfig c;

    c.seed = static_cast<std::uint64_t>(r.integer("seed", 1));

    c.input_signal = r.str("input.signal", "");
    c.input_format = parse_format("input.format", r.str("input.format", "auto"), c.input_signal);
    c.input_sample_rate_hz = r.real("input.sample_rate", kDefaultSampleRateHz);
    c.epoch_seconds = r.real("input.epoch_seconds", 1.0);

    c.preprocess.enabled = r.flag("preprocess.enabled", true);
    c.preprocess.bandpass_low_hz = r.real("preprocess.bandpass.low", 5.0);
    c.preprocess.bandpass_high_hz = r.real("preprocess.bandpass.high", 50.0);
    c.preprocess.bandpass_order = static_cast<int>(r.integer("preprocess.bandpass.order", 4));
    c.preprocess.notch_center_hz = r.real("preprocess.notch.center", 50.0);
    c.preprocess.notch_q = r.real("preprocess.notch.q", 35.0);
    c.preprocess.decimate_factor = static_cast<int>(r.integer("preprocess.decimate.factor", 1));

    c.grid_low_hz = r.real("grid.low", 8.0);
    c.grid_high_hz = r.real("grid.high", 30.0);
    c.grid_step_hz = r.real("grid.step", 1.0);

    auto band_keys = store.keys_in("bands");
    if (band_keys.empty()) {
        c.bands = {{"alpha", {8.0, 12.0}}, {"beta", {13.0, 30.0}}};
        for (const auto& b : c.bands) r.str("bands." + b.name, shortest(b.band.low_hz) + "-" + shortest(b.band.high_hz));
    } else {
        for (const auto& k : band_keys) c.bands.push_back({k, parse_band(k, r.str("bands." + k, ""))});
    }

    c.burg_order = static_cast<int>(r.integer("power.burg_order", 0));
    c.burg_scan_order = static_cast<int>(r.integer("power.burg_scan", 20));
    c.reflection_threshold = r.real("power.reflection_threshold", 0.1);
    c.aic_max_order = static_cast<int>(r.integer("mvar.aic_max_order", 20));

    c.svm_c = r.real("svm.c", 512.0);
    c.svm_gamma = r.real("svm.gamma", 0.002);
    c.svm_repeats = static_cast<int>(r.integer("svm.repeats", 100));
    c.svm_split = r.real("svm.split", 0.5);

    c.screen_alpha = r.real("screen.alpha", 0.001);

    auto& s = c.synth;
    s.n_channels = r.integer("synth.channels", 16);
    require(s.n_channels >= 2, "synth.channels must be >= 2");
    const auto names = scenario_names(s.n_channels);
    s.sample_rate_hz = r.real("synth.sample_rate", kDefaultSampleRateHz);
    s.epoch_seconds = c.epoch_seconds;
    s.epochs_per_class = static_cast<int>(r.integer("synth.epochs_per_class", 30));
    s.epochs_per_trial = static_cast<int>(r.integer("synth.epochs_per_trial", 6));
    s.self_lag1 = r.real("synth.self_lag1", 0.5);
    s.self_lag2 = r.real("synth.self_lag2", -0.2);
    s.noise_std = r.real("synth.noise_std", 1.0);
    const std::string default_c1 = s.n_channels == 16 ? "CZ>C4:0.4" : "0>1:0.4";
    s.shared_edges = parse_edges("synth.shared_edges", r.str("synth.shared_edges", ""), names);
    s.class1_edges = parse_edges("synth.class1_edges", r.str("synth.class1_edges", default_c1), names);
    s.class2_edges = parse_edges("synth.class2_edges", r.str("synth.class2_edges", ""), names);
    const auto rhythm_channel = r.str("synth.rhythm.channel", s.n_channels == 16 ? "P4" : "none");
    s.rhythm.channel = rhythm_channel == "none" ? -1 : channel_index(rhythm_channel, names);
    s.rhythm.freq_hz = r.real("synth.rhythm.freq", 24.0);
    s.rhythm.amplitude = r.real("synth.rhythm.amplitude", 0.5);
    s.rhythm.bandwidth_hz = r.real("synth.rhythm.bandwidth", 1.0);
    require(s.rhythm.bandwidth_hz >= 0.0, "synth.rhythm.bandwidth must be non-negative");
    const long rhythm_class = r.integer("synth.rhythm.class", 1);
    require(rhythm_class == 1 || rhythm_class == 2, "synth.rhythm.class must be 1 or 2");
    s.rhythm.label = static_cast<ClassLabel>(rhythm_class);
    s.burn_in = r.integer("synth.burn_in", -1);
    s.seed = static_cast<std::uint64_t>(r.integer("synth.seed", static_cast<long>(c.seed)));
    c.synth_name = r.str("synth.name", "synth");
    c.synth_format = parse_format("synth.format", r.str("synth.format", "csv"), "");

    c.output_dir = r.str("output.dir", "out");
    c.resolved = r.take();

    require(c.grid_low_hz < c.grid_high_hz && c.grid_step_hz > 0.0, "grid needs low < high and step > 0");
    require(c.grid_low_hz >= 0.0, "grid low must be non-negative");
    for (const auto& b : c.bands)
        require(b.band.low_hz >= c.grid_low_hz - 1e-9 && b.band.high_hz <= c.grid_high_hz + 1e-9,
                "band '" + b.name + "' lies outside the frequency grid");
    require(c.epoch_seconds > 0.0 && c.input_sample_rate_hz > 0.0, "epoch length and sample rate must be positive");
    require(c.burg_order >= 0 && c.burg_scan_order >= 2, "power.burg_order >= 0 and power.burg_scan >= 2 required");
    require(c.reflection_threshold > 0.0 && c.reflection_threshold < 1.0, "power.reflection_threshold must lie in (0, 1)");
    require(c.aic_max_order >= 1, "mvar.aic_max_order must be >= 1");
    require(c.svm_c > 0.0 && c.svm_gamma > 0.0 && c.svm_repeats >= 1, "svm.c, svm.gamma and svm.repeats must be positive");
    require(c.svm_split > 0.0 && c.svm_split < 1.0, "svm.split must lie in (0, 1)");
    require(c.screen_alpha > 0.0, "screen.alpha must be positive");
    return c;
}

OutputSink::OutputSink(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory '" + dir_.string() + "'");
}

fs::path OutputSink::path(const std::string& name) {
    auto p = dir_ / name;
    if (std::find(written_.begin(), written_.end(), p) == written_.end()) written_.push_back(p);
    return p;
}

void OutputSink::write_text(const std::string& name, const std::string& text) {
    const auto p = path(name);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + p.string() + "'");
}

void OutputSink::write_json(const std::string& name, const json& j) {
    write_text(name, j.dump(2) + "\n");
}

void OutputSink::remove_all() noexcept {
    for (const auto& p : written_) {
        std::error_code ec;
        fs::remove(p, ec);
    }
    written_.clear();
}

namespace {

Scenario synthesize(const PipelineConfig& config) {
    return make_two_class_scenario(config.synth);
}

json band_json(const Band& b) { return json::array({b.low_hz, b.high_hz}); }

json flows_json(const FlowMap& f) {
    json j = json::object();
    for (Index c = 0; c < f.outflow.size(); ++c)
        j[f.channel_names[static_cast<std::size_t>(c)]] = {{"outflow", f.outflow[c]}, {"inflow", f.inflow[c]}};
    return j;
}

int lower_median(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

}  // namespace

EpochSet prepare_epochs(const PipelineConfig& config) {
    Recording rec;
    if (config.input_signal.empty()) {
        rec = synthesize(config).recording;
    } else {
        rec = load_recording(config.input_signal, config.input_format, config.input_sample_rate_hz);
    }
    rec = preprocess_recording(rec, config.preprocess);
    auto epochs = segment_epochs(rec, config.epoch_seconds);
    epochs.require_two_classes();
    require(config.grid_high_hz < epochs.sample_rate_hz / 2.0, "frequency grid reaches the Nyquist frequency");
    return epochs;
}

json run_synth(const PipelineConfig& config, OutputSink& sink) {
    const auto sc = synthesize(config);
    const std::string ext = config.synth_format == SignalFormat::Csv ? ".csv" : ".bin";
    const auto signal = sink.path(config.synth_name + ext);
    sink.path(config.synth_name + ".events.csv");
    save_recording(signal, sc.recording, config.synth_format);

    auto edge_list = [](const std::vector<DirectedEdge>& edges) {
        json a = json::array();
        for (const auto& e : edges) a.push_back({e.from, e.to});
        return a;
    };
    json truth = {{"seed", config.synth.seed},
                  {"sample_rate_hz", config.synth.sample_rate_hz},
                  {"class1", sc.class1.model},
                  {"class2", sc.class2.model},
                  {"class1_edges", edge_list(sc.class1.coupling_edges)},
                  {"class2_edges", edge_list(sc.class2.coupling_edges)},
                  {"rhythm",
                   {{"channel", sc.class1.model.channel_names.empty() || config.synth.rhythm.channel < 0
                                    ? json(nullptr)
                                    : json(sc.class1.model.channel_names[static_cast<std::size_t>(config.synth.rhythm.channel)])},
                    {"freq_hz", config.synth.rhythm.freq_hz},
                    {"amplitude", config.synth.rhythm.amplitude},
                    {"bandwidth_hz", config.synth.rhythm.bandwidth_hz},
                    {"class", to_int(config.synth.rhythm.label)}}}};
    sink.write_json(config.synth_name + ".truth.json", truth);
    return {{"signal", signal.filename().string()},
            {"events", (config.synth_name + ".events.csv")},
            {"truth", config.synth_name + ".truth.json"},
            {"channels", sc.recording.n_channels()},
            {"samples", sc.recording.n_samples()},
            {"trials", sc.recording.trial_marks.size()},
            {"epochs", sc.epochs.epochs.size()}};
}

json run_power_track(const PipelineConfig& config, const EpochSet& epochs, OutputSink& sink, const RunOptions& options) {
    const auto grid = config.grid();
    const Index m = epochs.n_channels();
    const std::size_t n_epochs = epochs.epochs.size();

    std::vector<int> orders(static_cast<std::size_t>(m), config.burg_order);
    if (config.burg_order == 0) {
        std::vector<std::vector<int>> picks(n_epochs);
        parallel_for(n_epochs, options.jobs, [&](std::size_t e) {
            for (Index c = 0; c < m; ++c)
                picks[e].push_back(select_order_reflection(epochs.epochs[e].samples.row(c).transpose(),
                                                           config.burg_scan_order, config.reflection_threshold));
        });
        for (Index c = 0; c < m; ++c) {
            std::vector<int> per_channel;
            for (const auto& p : picks) per_channel.push_back(p[static_cast<std::size_t>(c)]);
            orders[static_cast<std::size_t>(c)] = lower_median(per_channel);
        }
    }

    PsdStack psd(n_epochs);
    parallel_for(n_epochs, options.jobs, [&](std::size_t e) {
        MatrixN rows(m, static_cast<Index>(grid.size()));
        for (Index c = 0; c < m; ++c) {
            const VectorN x = epochs.epochs[e].samples.row(c).transpose();
            rows.row(c) = burg_psd(burg_fit(x, orders[static_cast<std::size_t>(c)]), grid, epochs.sample_rate_hz).transpose();
        }
        psd[e] = std::move(rows);
    });

    PsdStack psd1, psd2;
    std::vector<ClassLabel> labels;
    for (std::size_t e = 0; e < n_epochs; ++e) {
        labels.push_back(epochs.epochs[e].label);
        (labels.back() == ClassLabel::Class1 ? psd1 : psd2).push_back(psd[e]);
    }
    const auto map = rsquared_map(psd1, psd2, grid, epochs.channel_names);
    std::vector<std::string> freq_labels;
    for (const double f : grid) freq_labels.push_back(shortest(f));
    save_matrix(sink.path("rsq_map.csv"), map.values, epochs.channel_names, freq_labels);
    sink.write_text("rsq_map.svg", svg::rsquared_heatmap(map));

    const auto spec = select_features(map);
    const auto features = build_feature_vectors(psd, labels, spec, grid);
    const auto cv = cross_validate(features.features, features.labels, config.svm_c, config.svm_gamma, config.svm_repeats,
                                   config.svm_split, config.seed, options.jobs);

    json order_json = json::object();
    for (Index c = 0; c < m; ++c) order_json[epochs.channel_names[static_cast<std::size_t>(c)]] = orders[static_cast<std::size_t>(c)];
    const std::string band_text = shortest(spec.band.low_hz) + "-" + shortest(spec.band.high_hz);
    return {{"sample_rate_hz", epochs.sample_rate_hz},
            {"epochs", {{"class1", psd1.size()}, {"class2", psd2.size()}}},
            {"burg_order_rule", config.burg_order == 0 ? "reflection coefficients, median per channel" : "fixed"},
            {"burg_orders", order_json},
            {"rsq_max", spec.rsquared},
            {"feature",
             {{"channel", spec.channel_name},
              {"center_hz", spec.center_hz},
              {"band", band_json(spec.band)},
              {"freqs_hz", features.freqs_hz},
              {"degenerate_map", spec.degenerate}}},
            {"standardization", "z-score per dimension with training-fold statistics"},
            {"cv",
             {{"mean", cv.mean_accuracy_pct},
              {"std", cv.std_accuracy_pct},
              {"n", cv.n_repeats},
              {"per_repeat", cv.per_repeat},
              {"channel", spec.channel_name},
              {"band", band_json(spec.band)}}},
            {"table", {{"accuracy_pct", cv.mean_accuracy_pct}, {"sd", cv.std_accuracy_pct}, {"channel", spec.channel_name},
                       {"frequency_hz", band_text}}}};
}

json run_connectivity_track(const PipelineConfig& config, const EpochSet& epochs, OutputSink& sink,
                            const RunOptions& options) {
    const auto grid = config.grid();
    const Index m = epochs.n_channels();
    const Index n = epochs.epoch_length();
    const std::size_t n_epochs = epochs.epochs.size();
    // Largest order with more samples than regressors: n > m p + p.
    const int feasible = static_cast<int>((n - 1) / (m + 1));
    const int max_order = std::min(config.aic_max_order, feasible);
    require(max_order >= 1, "epochs are too short for any MVAR fit");

    std::vector<std::optional<PdcTensor>> tensors(n_epochs);
    std::vector<int> orders(n_epochs, 0);
    std::vector<std::string> failures(n_epochs);
    parallel_for(n_epochs, options.jobs, [&](std::size_t e) {
        try {
            const auto& ep = epochs.epochs[e];
            orders[e] = select_order_aic(ep, max_order);
            auto model = fit_mvar(ep, orders[e]);
            model.channel_names = epochs.channel_names;
            tensors[e] = pdc(model, grid, epochs.sample_rate_hz);
        } catch (const ContractError& err) {
            failures[e] = err.what();
        }
    });

    std::vector<PdcTensor> c1, c2;
    json excluded = json::array();
    std::map<int, int> histogram;
    for (std::size_t e = 0; e < n_epochs; ++e) {
        if (!tensors[e]) {
            excluded.push_back({{"epoch", e}, {"reason", failures[e]}});
            continue;
        }
        ++histogram[orders[e]];
        (epochs.epochs[e].label == ClassLabel::Class1 ? c1 : c2).push_back(std::move(*tensors[e]));
    }
    if (c1.size() < 2 || c2.size() < 2)
        throw ContractError("fewer than two usable epochs per class after excluding failed MVAR fits");

    json order_hist = json::object();
    for (const auto& [p, count] : histogram) order_hist[std::to_string(p)] = count;

    json bands = json::object();
    for (const auto& nb : config.bands) {
        const auto sig = screen_edges(c1, c2, nb.band, config.screen_alpha);
        save_edges(sink.path("edges_" + nb.name + ".csv"), sig);
        sink.write_text("edges_" + nb.name + ".svg",
                        svg::edge_diagram(sig, nb.name + " band " + nb.band.label() + " Hz: class-discriminative directions"));

        const auto f1 = flow_map(c1, nb.band, ClassLabel::Class1);
        const auto f2 = flow_map(c2, nb.band, ClassLabel::Class2);
        const auto mask = sig.mask();
        const auto s1 = flow_map(c1, nb.band, ClassLabel::Class1, mask);
        const auto s2 = flow_map(c2, nb.band, ClassLabel::Class2, mask);
        save_flow_map(sink.path("flows_" + nb.name + "_class1.csv"), f1);
        save_flow_map(sink.path("flows_" + nb.name + "_class2.csv"), f2);
        save_flow_map(sink.path("flows_" + nb.name + "_class1_significant.csv"), s1);
        save_flow_map(sink.path("flows_" + nb.name + "_class2_significant.csv"), s2);
        sink.write_text("flows_" + nb.name + ".svg", svg::flow_bars(f1, f2, nb.name + " band " + nb.band.label() + " Hz: information flow"));

        json edges = json::array();
        for (const auto& e : sig.edges)
            edges.push_back({{"from", sig.channel_names[static_cast<std::size_t>(e.from)]},
                             {"to", sig.channel_names[static_cast<std::size_t>(e.to)]},
                             {"p_value", e.p_value},
                             {"predominant", to_int(e.predominant)}});
        bands[nb.name] = {{"band", band_json(nb.band)},
                          {"alpha", config.screen_alpha},
                          {"n_edges", sig.edges.size()},
                          {"expected_null_edges", sig.expected_null_edges()},
                          {"edges", edges},
                          {"flows", {{"class1", flows_json(f1)}, {"class2", flows_json(f2)}}},
                          {"flows_significant", {{"class1", flows_json(s1)}, {"class2", flows_json(s2)}}}};
    }
    return {{"sample_rate_hz", epochs.sample_rate_hz},
            {"epochs", {{"class1", c1.size()}, {"class2", c2.size()}}},
            {"aic_max_order", max_order},
            {"aic_orders", order_hist},
            {"excluded_epochs", excluded.size()},
            {"excluded", excluded},
            {"bands", bands}};
}

namespace {

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const IoError& e) {
        throw StageError(name, e.what(), 2);
    } catch (const std::exception& e) {
        throw StageError(name, e.what(), 1);
    }
}

}  // namespace

json run_command(Command command, const PipelineConfig& config, const RunOptions& options) {
    auto sink = stage("output", [&] { return OutputSink(config.output_dir); });
    try {
        json report = {{"seed", config.seed}, {"config", config.resolved.values()}};
        switch (command) {
            case Command::Synth: report["command"] = "synth"; break;
            case Command::Power: report["command"] = "power"; break;
            case Command::Connectivity: report["command"] = "connectivity"; break;
            case Command::All: report["command"] = "all"; break;
        }
        if (command == Command::Synth) {
            report["synth"] = stage("synth", [&] { return run_synth(config, sink); });
            sink.write_json(config.synth_name + ".report.json", report);
            return report;
        }
        if (command == Command::All && config.input_signal.empty())
            report["synth"] = stage("synth", [&] { return run_synth(config, sink); });
        const auto epochs = stage("load", [&] { return prepare_epochs(config); });
        if (command == Command::Power || command == Command::All)
            report["power"] = stage("power", [&] { return run_power_track(config, epochs, sink, options); });
        if (command == Command::Connectivity || command == Command::All)
            report["connectivity"] = stage("connectivity", [&] { return run_connectivity_track(config, epochs, sink, options); });
        stage("report", [&] {
            sink.write_json("report.json", report);
            return 0;
        });
        return report;
    } catch (...) {
        sink.remove_all();
        throw;
    }
}

}  // namespace mipdc
