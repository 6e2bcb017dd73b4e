#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <new>
#include <string>
#include <thread>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

namespace {

enum Exit { kOk = 0, kConfigInvalid = 2, kComputationFailed = 3, kIoError = 4 };

int report(Exit code, const char* kind, const std::string& message) {
    const cli::json record{{"error", kind}, {"exit_code", static_cast<int>(code)}, {"message", message}};
    std::cerr << record.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cavity-embedded SSH chain: spectra, Kerr shifts, vertices and biphoton entanglement"};
    app.set_version_flag("--version", CAVSSH_VERSION);

    std::string command;
    std::string config_path;
    std::string out_dir;
    unsigned threads = 1;
    bool verbose = false;

    std::vector<std::string> names;
    for (const auto& [name, fn] : cli::command_table()) names.push_back(name);
    app.add_option("command", command, "what to compute")->required()->check(CLI::IsMember(names));
    app.add_option("--config", config_path, "run configuration (JSON, comments allowed)")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--threads", threads, "worker threads; results do not depend on it")
        ->check(CLI::Range(1u, 1024u));
    app.add_flag("--verbose", verbose, "progress on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report(kConfigInvalid, "ConfigInvalid", e.what());
    }

    cli::RunConfig cfg;
    try {
        cfg = cli::load_config(config_path);
        cli::preflight(command, cfg);
    } catch (const cli::ConfigInvalid& e) {
        return report(kConfigInvalid, "ConfigInvalid", e.what());
    }
    if (verbose) std::cerr << "cavssh " << command << ": config ok, " << threads << " thread(s)\n";

    const auto t0 = std::chrono::steady_clock::now();
    cli::OutputSet outputs;
    std::string failure;
    try {
        cli::command_table().at(command)(cfg, threads, outputs);
    } catch (const cli::ConfigInvalid& e) {
        return report(kConfigInvalid, "ConfigInvalid", e.what());
    } catch (const cavssh::Error& e) {
        failure = e.what();
    } catch (const std::bad_alloc&) {
        failure = "out of memory";
    }
    if (failure.empty() && !outputs.all_converged()) failure = "one or more sweep points did not converge";
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (verbose) std::cerr << "cavssh " << command << ": computed in " << seconds << " s\n";

    try {
        const std::filesystem::path dir(out_dir);
        cli::prepare_dir(dir);
        for (const auto& [name, content] : outputs.files()) cli::write_file(dir / name, content);
        cli::json manifest{
            {"tool", "cavssh"},
            {"version", CAVSSH_VERSION},
            {"command", command},
            {"config", cfg.echo},
            {"resolved", {{"omega_c", cfg.cavity.omega_c}, {"n_k", cfg.n_k}, {"n_k2d", cfg.n_k2d}}},
            {"threads", threads},
            {"wall_clock_seconds", seconds},
            {"status", failure.empty() ? "ok" : "failed"},
            {"partial", !failure.empty()},
            {"outputs", outputs.manifest_entries()},
            {"convergence", outputs.convergence()},
            {"metadata", outputs.metadata()},
        };
        if (!failure.empty()) manifest["error"] = failure;
        cli::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const cli::IoError& e) {
        return report(kIoError, "IoError", e.what());
    }

    if (!failure.empty()) return report(kComputationFailed, "ComputationFailed", failure);
    return kOk;
}
