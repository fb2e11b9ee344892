#pragma once

#include "mipdc/classification.hpp"
#include "mipdc/config.hpp"
#include "mipdc/connectivity.hpp"
#include "mipdc/discriminability.hpp"
#include "mipdc/preprocess.hpp"
#include "mipdc/signal_io.hpp"
#include "mipdc/synth.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace mipdc {

struct NamedBand {
    std::string name;
    Band band;
};

/// Fully resolved run configuration. `resolved` holds every key, defaults
/// included, and is what reports embed.
struct PipelineConfig {
    std::string input_signal;  // empty: analyze the synthetic scenario
    SignalFormat input_format = SignalFormat::Csv;
    double input_sample_rate_hz = kDefaultSampleRateHz;
    double epoch_seconds = 1.0;

    PreprocessConfig preprocess;

    double grid_low_hz = 8.0;
    double grid_high_hz = 30.0;
    double grid_step_hz = 1.0;
    std::vector<NamedBand> bands;

    int burg_order = 0;  // 0 selects the order per channel from reflection coefficients
    int burg_scan_order = 20;
    double reflection_threshold = 0.1;
    int aic_max_order = 20;

    double svm_c = 512.0;
    double svm_gamma = 0.002;
    int svm_repeats = 100;
    double svm_split = 0.5;

    double screen_alpha = 0.001;

    ScenarioConfig synth;
    std::string synth_name = "synth";
    SignalFormat synth_format = SignalFormat::Csv;

    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 1;

    ConfigStore resolved;

    std::vector<double> grid() const { return frequency_grid(grid_low_hz, grid_high_hz, grid_step_hz); }
};

/// Fills defaults, validates, and returns the resolved configuration.
PipelineConfig resolve_config(const ConfigStore& store);

/// Failure inside a named pipeline stage. Exit code 2 for I/O problems, 1 otherwise.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& message, int exit_code)
        : Error("[" + stage + "] " + message), stage_(std::move(stage)), exit_code_(exit_code) {}
    const std::string& stage() const { return stage_; }
    int exit_code() const { return exit_code_; }

private:
    std::string stage_;
    int exit_code_;
};

struct RunOptions {
    int jobs = 1;
};

/// Paths written by a run, for cleanup on failure.
class OutputSink {
public:
    explicit OutputSink(std::filesystem::path dir);
    std::filesystem::path path(const std::string& name);
    void write_text(const std::string& name, const std::string& text);
    void write_json(const std::string& name, const nlohmann::json& j);
    void remove_all() noexcept;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
};

/// Loads (or synthesizes), preprocesses and epochs the input.
EpochSet prepare_epochs(const PipelineConfig& config);

nlohmann::json run_power_track(const PipelineConfig& config, const EpochSet& epochs, OutputSink& sink,
                               const RunOptions& options = {});
nlohmann::json run_connectivity_track(const PipelineConfig& config, const EpochSet& epochs, OutputSink& sink,
                                      const RunOptions& options = {});
nlohmann::json run_synth(const PipelineConfig& config, OutputSink& sink);

enum class Command { Synth, Power, Connectivity, All };

/// Runs a subcommand end to end, writes report.json (except for synth) and
/// returns the report. On failure every file written by this run is removed
/// and a StageError is thrown.
nlohmann::json run_command(Command command, const PipelineConfig& config, const RunOptions& options = {});

}  // namespace mipdc
