// Command-line front end: synth, power, connectivity, all.

#include "mipdc/pipeline.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

int run(mipdc::Command command, const std::string& config_path, const std::vector<std::string>& sets, int jobs,
        const std::optional<long>& seed, const std::string& out_dir) {
    try {
        auto store = config_path.empty() ? mipdc::ConfigStore{} : mipdc::ConfigStore::from_file(config_path);
        for (const auto& s : sets) store.set(s);
        if (seed) store.set("seed", std::to_string(*seed));
        if (!out_dir.empty()) store.set("output.dir", out_dir);
        const auto config = mipdc::resolve_config(store);
        const auto report = mipdc::run_command(command, config, {jobs});

        if (report.contains("power")) {
            const auto& t = report["power"]["table"];
            std::cout << "power: accuracy " << t["accuracy_pct"].get<double>() << "% (SD " << t["sd"].get<double>()
                      << "), channel " << t["channel"].get<std::string>() << ", "
                      << t["frequency_hz"].get<std::string>() << " Hz\n";
        }
        if (report.contains("connectivity")) {
            for (const auto& [name, band] : report["connectivity"]["bands"].items())
                std::cout << "connectivity: " << name << " band, " << band["n_edges"].get<std::size_t>()
                          << " significant directions (expected under null " << band["expected_null_edges"].get<double>()
                          << ")\n";
        }
        std::cout << "outputs in " << config.output_dir.string() << "\n";
        return 0;
    } catch (const mipdc::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const mipdc::IoError& e) {
        std::cerr << "error: [config] " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: [config] " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Motor-imagery EEG analysis: spectral power and partial directed coherence"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir;
    std::vector<std::string> sets;
    int jobs = 1;
    std::optional<long> seed;
    app.add_option("--config", config_path, "INI config file (or a report.json to re-run)")->check(CLI::ExistingFile);
    app.add_option("--set", sets, "Override a config key, KEY=VALUE (repeatable)")->take_all();
    app.add_option("--jobs", jobs, "Worker threads for per-epoch work")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Master random seed");
    app.add_option("--out", out_dir, "Output directory");

    const std::pair<const char*, mipdc::Command> commands[] = {
        {"synth", mipdc::Command::Synth},
        {"power", mipdc::Command::Power},
        {"connectivity", mipdc::Command::Connectivity},
        {"all", mipdc::Command::All}};
    const char* help[] = {"Write a synthetic two-class dataset with ground truth",
                          "Spectral-power track: Burg PSD, r^2 map, SVM cross-validation",
                          "Connectivity track: MVAR, PDC, Wilcoxon edge screening, flow maps",
                          "Both tracks (synthesizing the input when none is configured)"};
    std::vector<CLI::App*> subs;
    for (std::size_t k = 0; k < 4; ++k) subs.push_back(app.add_subcommand(commands[k].first, help[k]));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    for (std::size_t k = 0; k < 4; ++k)
        if (subs[k]->parsed()) return run(commands[k].second, config_path, sets, jobs, seed, out_dir);
    return 1;
}
