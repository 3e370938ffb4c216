#include "droplet.h"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace {

int fail(droplet_status st, const std::string& where) {
    std::fprintf(stderr, "droplet: %s: %s\n", where.c_str(), droplet_last_error());
    return (int)st;
}

struct ScenarioHandle {
    droplet_scenario* sc = nullptr;
    ~ScenarioHandle() { droplet_scenario_free(sc); }
};

struct ResultHandle {
    droplet_result* r = nullptr;
    ~ResultHandle() { droplet_result_free(r); }
};

int apply_overrides(droplet_scenario* sc,
                    const std::vector<std::string>& sets,
                    const std::string& slices) {
    for (const std::string& kv : sets) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "droplet: --set expects key=value, got '%s'\n",
                         kv.c_str());
            return (int)DROPLET_INVALID_INPUT;
        }
        droplet_status st = droplet_scenario_set(sc, kv.substr(0, eq).c_str(),
                                                 kv.substr(eq + 1).c_str());
        if (st != DROPLET_OK) return fail(st, "--set " + kv);
    }
    if (!slices.empty()) {
        droplet_status st = droplet_scenario_set(sc, "times", slices.c_str());
        if (st != DROPLET_OK) return fail(st, "--slices");
    }
    return 0;
}

std::string scenario_name(const droplet_scenario* sc) {
    size_t needed = 0;
    droplet_scenario_name(sc, nullptr, 0, &needed);
    std::string name(needed, '\0');
    if (droplet_scenario_name(sc, name.data(), name.size(), nullptr) != DROPLET_OK)
        return "scenario";
    name.resize(needed - 1);
    return name;
}

int solve_one(droplet_scenario* sc, const std::string& out_dir, bool quiet) {
    ResultHandle res;
    droplet_status st = droplet_solve(sc, out_dir.empty() ? nullptr : out_dir.c_str(),
                                      &res.r);
    if (st != DROPLET_OK) return fail(st, "solve");
    if (!quiet) {
        int n = droplet_result_slice_count(res.r);
        for (int i = 0; i < n; ++i) {
            double time = 0;
            int nodes = 0;
            droplet_result_slice(res.r, i, &time, nullptr, nullptr, nullptr, &nodes);
            std::printf("slice %d: t = %.12g, %d nodes\n", i, time, nodes);
        }
        if (!out_dir.empty())
            std::printf("wrote %d slice(s) to %s\n", n, out_dir.c_str());
    }
    return 0;
}

int run_solve(const std::string& config, const std::string& out_dir,
              const std::vector<std::string>& sets, const std::string& slices) {
    ScenarioHandle sc;
    droplet_status st = droplet_scenario_load(config.c_str(), &sc.sc);
    if (st != DROPLET_OK) return fail(st, config);
    if (int rc = apply_overrides(sc.sc, sets, slices)) return rc;
    return solve_one(sc.sc, out_dir, false);
}

int run_batch(const std::string& config_dir, const std::string& out_dir,
              const std::vector<std::string>& sets) {
    namespace fs = std::filesystem;
    std::error_code ec;
    std::vector<fs::path> configs;
    for (const auto& entry : fs::directory_iterator(config_dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".cfg")
            configs.push_back(entry.path());
    }
    if (ec) {
        std::fprintf(stderr, "droplet: cannot read directory '%s': %s\n",
                     config_dir.c_str(), ec.message().c_str());
        return 2;
    }
    if (configs.empty()) {
        std::fprintf(stderr, "droplet: no .cfg files in '%s'\n", config_dir.c_str());
        return 2;
    }
    std::sort(configs.begin(), configs.end());

    int worst = 0;
    for (const fs::path& path : configs) {
        ScenarioHandle sc;
        droplet_status st = droplet_scenario_load(path.string().c_str(), &sc.sc);
        if (st != DROPLET_OK) {
            std::printf("%s: FAILED (%s)\n", path.filename().string().c_str(),
                        droplet_last_error());
            worst = std::max(worst, (int)st);
            continue;
        }
        // a bad --set is the same for every file; stop instead of repeating it
        if (int rc = apply_overrides(sc.sc, sets, "")) return rc;
        std::string name = scenario_name(sc.sc);
        std::string dest = out_dir.empty() ? "" : (fs::path(out_dir) / name).string();
        ResultHandle res;
        st = droplet_solve(sc.sc, dest.empty() ? nullptr : dest.c_str(), &res.r);
        if (st != DROPLET_OK) {
            std::printf("%s: FAILED (%s)\n", path.filename().string().c_str(),
                        droplet_last_error());
            worst = std::max(worst, (int)st);
            continue;
        }
        std::printf("%s: ok, %d slice(s)%s%s\n", path.filename().string().c_str(),
                    droplet_result_slice_count(res.r), dest.empty() ? "" : " -> ",
                    dest.c_str());
    }
    return worst;
}

int run_converge(const std::string& config, const std::string& out_dir,
                 const std::vector<std::string>& sets,
                 const std::vector<int>& cells) {
    ScenarioHandle sc;
    droplet_status st = droplet_scenario_load(config.c_str(), &sc.sc);
    if (st != DROPLET_OK) return fail(st, config);
    if (int rc = apply_overrides(sc.sc, sets, "")) return rc;
    ResultHandle res;
    st = droplet_converge(sc.sc, cells.data(), (int)cells.size(),
                          out_dir.empty() ? nullptr : out_dir.c_str(), &res.r);
    if (st != DROPLET_OK) return fail(st, "converge");
    int n = droplet_result_convergence_count(res.r);
    std::printf("%8s  %s\n", "cells", "distance");
    for (int i = 0; i < n; ++i) {
        int count = 0;
        double d = 0;
        droplet_result_convergence(res.r, i, &count, &d);
        if (i == 0)
            std::printf("%8d  -\n", count);
        else
            std::printf("%8d  %.6e\n", count, d);
    }
    return 0;
}

int run_verify(const std::string& config, const std::vector<std::string>& sets,
               double tol_scale) {
    ScenarioHandle sc;
    droplet_status st = droplet_scenario_load(config.c_str(), &sc.sc);
    if (st != DROPLET_OK) return fail(st, config);
    if (int rc = apply_overrides(sc.sc, sets, "")) return rc;
    ResultHandle res;
    st = droplet_verify(sc.sc, tol_scale, &res.r);
    if (st != DROPLET_OK && st != DROPLET_CHECK_FAILURE) return fail(st, "verify");
    int n = droplet_result_check_count(res.r);
    for (int i = 0; i < n; ++i) {
        char name[128] = {0};
        int passed = 0;
        double value = 0, bound = 0;
        droplet_result_check(res.r, i, name, sizeof name, &passed, &value, &bound);
        std::printf("%s  %-32s  %.6e <= %.6e\n", passed ? "pass" : "FAIL", name,
                    value, bound);
    }
    std::printf("%d check(s), %s\n", n,
                droplet_result_passed(res.r) ? "all passed" : "FAILURES");
    return (int)st;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"damped pressureless gas solver"};
    app.require_subcommand(1);

    std::string config, out_dir, slices, cells_text, config_dir;
    std::vector<std::string> sets;
    double tol_scale = 1.0;

    CLI::App* solve = app.add_subcommand("solve", "solve one scenario");
    solve->add_option("--config", config, "scenario config file")->required();
    solve->add_option("--out-dir", out_dir, "directory for CSV artifacts");
    solve->add_option("--slices", slices, "override the slice time list");
    solve->add_option("--set", sets, "override a config key (key=value)");

    CLI::App* batch = app.add_subcommand("batch", "solve every .cfg in a directory");
    batch->add_option("--config-dir", config_dir, "directory of scenario configs")
        ->required();
    batch->add_option("--out-dir", out_dir, "artifact root (one subdir per scenario)");
    batch->add_option("--set", sets, "override a config key in every scenario");

    CLI::App* conv = app.add_subcommand("converge", "rerun across resolutions");
    conv->add_option("--config", config, "scenario config file")->required();
    conv->add_option("--cells", cells_text, "comma-separated cell counts")->required();
    conv->add_option("--out-dir", out_dir, "directory for convergence.csv");
    conv->add_option("--set", sets, "override a config key (key=value)");

    CLI::App* verify = app.add_subcommand("verify", "solve and audit one scenario");
    verify->add_option("--config", config, "scenario config file")->required();
    verify->add_option("--tol-scale", tol_scale, "scale every audit tolerance");
    verify->add_option("--set", sets, "override a config key (key=value)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (solve->parsed()) return run_solve(config, out_dir, sets, slices);
    if (batch->parsed()) return run_batch(config_dir, out_dir, sets);
    if (conv->parsed()) {
        std::vector<int> cells;
        std::stringstream ss(cells_text);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            try {
                cells.push_back(std::stoi(piece));
            } catch (const std::exception&) {
                std::fprintf(stderr, "droplet: bad cell count '%s'\n", piece.c_str());
                return 2;
            }
        }
        return run_converge(config, out_dir, sets, cells);
    }
    if (verify->parsed()) return run_verify(config, sets, tol_scale);
    return 2;
}
