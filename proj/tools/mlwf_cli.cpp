// Batch runner for the meshless local weak-form option pricers: single
// pricing runs, convergence studies and the spectral stability diagnostic,
// driven by a plain key=value config file.

#include <cctype>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlwf/analysis.hpp"
#include "mlwf/experiment.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::string scheme_override;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file (key=value lines)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory (default: current directory)");
    cmd->add_option("--scheme", args.scheme_override, "override the configured scheme")
        ->check(CLI::IsMember({"LBIE", "LRPI", "both"}, CLI::ignore_case));
    cmd->add_flag("--quiet", args.quiet, "suppress console tables; files are still written");
}

mlwf::ExperimentConfig load_config(const CommonArgs& args) {
    mlwf::ExperimentConfig cfg = mlwf::parse_config(args.config_path);
    if (!args.scheme_override.empty()) {
        std::string s = args.scheme_override;
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        cfg.scheme = s == "lbie"   ? mlwf::ExperimentConfig::SchemeChoice::lbie
                     : s == "lrpi" ? mlwf::ExperimentConfig::SchemeChoice::lrpi
                                   : mlwf::ExperimentConfig::SchemeChoice::both;
    }
    return cfg;
}

void print_warnings(const mlwf::ExperimentConfig& cfg) {
    for (const std::string& w : cfg.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

void print_report(const mlwf::ExperimentReport& rep, bool prices_only) {
    for (const auto& sr : rep.schemes) {
        std::printf("\n[%s]\n", mlwf::scheme_name(sr.scheme));
        if (prices_only) {
            for (const auto& row : sr.rows) {
                if (row.failed) {
                    std::printf("  N=%d M=%d failed: %s\n", row.n, row.m, row.error.c_str());
                    continue;
                }
                std::printf("  N=%d M=%d (%.3f s, solver iterations %d)\n", row.n, row.m,
                            row.cpu_seconds, row.solver_iterations);
                std::printf("%10s  %14s  %14s  %12s\n", "s", "price", "reference", "error");
                for (std::size_t i = 0; i < rep.sample_points.size(); ++i)
                    std::printf("%10.4f  %14.8f  %14.8f  %12.3e\n", rep.sample_points[i],
                                row.prices[i], rep.reference_values[i],
                                row.prices[i] - rep.reference_values[i]);
            }
            continue;
        }
        std::printf("%6s %6s %14s %14s %8s %10s\n", "N", "M", "RMSError", "MaxError", "Ratio",
                    "CPUTime");
        for (const auto& row : sr.rows) {
            if (row.failed) {
                std::printf("%6d %6d   failed: %s\n", row.n, row.m, row.error.c_str());
                continue;
            }
            if (row.ratio)
                std::printf("%6d %6d %14.6e %14.6e %8.2f %10.4f\n", row.n, row.m, row.rms, row.max,
                            *row.ratio, row.cpu_seconds);
            else
                std::printf("%6d %6d %14.6e %14.6e %8s %10.4f\n", row.n, row.m, row.rms, row.max,
                            "-", row.cpu_seconds);
        }
        std::printf("csv: %s\n", sr.csv_path.c_str());
    }
}

int run_price(const CommonArgs& args) {
    mlwf::ExperimentConfig cfg = load_config(args);
    if (cfg.grid_sizes.size() != 1)
        throw mlwf::ConfigError("price: config must list exactly one grid size");
    print_warnings(cfg);
    const mlwf::ExperimentReport rep = mlwf::run_experiment(cfg, args.out_dir);
    if (!args.quiet) print_report(rep, true);
    return 0;
}

int run_converge(const CommonArgs& args, int jobs) {
    mlwf::ExperimentConfig cfg = load_config(args);
    print_warnings(cfg);
    const mlwf::ExperimentReport rep = mlwf::run_experiment(cfg, args.out_dir, {}, jobs);
    if (!args.quiet) print_report(rep, false);
    return 0;
}

int run_stability(const CommonArgs& args) {
    mlwf::ExperimentConfig cfg = load_config(args);
    cfg.validate();
    print_warnings(cfg);
    std::filesystem::create_directories(args.out_dir);
    const std::string path =
        (std::filesystem::path(args.out_dir) / (cfg.output_path + "_stability.csv")).string();
    std::ofstream csv(path);
    csv << "Scheme,N,M,Dim,MaxRealPart,AmplificationBound,Stable\n";
    if (!args.quiet)
        std::printf("%6s %6s %6s %6s %14s %20s %7s\n", "Scheme", "N", "M", "Dim", "MaxRe",
                    "Amplification", "Stable");
    std::vector<mlwf::Scheme> schemes;
    if (cfg.scheme != mlwf::ExperimentConfig::SchemeChoice::lrpi)
        schemes.push_back(mlwf::Scheme::lbie);
    if (cfg.scheme != mlwf::ExperimentConfig::SchemeChoice::lbie)
        schemes.push_back(mlwf::Scheme::lrpi);
    for (mlwf::Scheme sc : schemes) {
        for (std::size_t i = 0; i < cfg.grid_sizes.size(); ++i) {
            const int n = cfg.grid_sizes[i];
            const int m = cfg.steps_for(i);
            const mlwf::StabilityReport rep = mlwf::stability_diagnostic(sc, cfg.model(), n, m);
            char line[160];
            std::snprintf(line, sizeof(line), "%s,%d,%d,%d,%.6e,%.12f,%d", mlwf::scheme_name(sc), n,
                          m, rep.upsilon_dim, rep.max_real_part, rep.amplification_bound,
                          rep.stable() ? 1 : 0);
            csv << line << "\n";
            if (!args.quiet)
                std::printf("%6s %6d %6d %6d %14.3e %20.12f %7s\n", mlwf::scheme_name(sc), n, m,
                            rep.upsilon_dim, rep.max_real_part, rep.amplification_bound,
                            rep.stable() ? "yes" : "NO");
        }
    }
    if (!args.quiet) std::printf("csv: %s\n", path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"meshless local weak-form option pricing (LBIE / LRPI)"};
    app.require_subcommand(1);

    CommonArgs price_args, converge_args, stability_args;
    int jobs = 1;

    CLI::App* price = app.add_subcommand("price", "price at the configured grid and report values");
    add_common(price, price_args);

    CLI::App* converge = app.add_subcommand("converge", "run the configured convergence study");
    add_common(converge, converge_args);
    converge->add_option("--jobs", jobs, "parallel row workers (default 1)")
        ->check(CLI::PositiveNumber);

    CLI::App* stability = app.add_subcommand("stability", "spectral stability diagnostic");
    add_common(stability, stability_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (price->parsed()) return run_price(price_args);
        if (converge->parsed()) return run_converge(converge_args, jobs);
        if (stability->parsed()) return run_stability(stability_args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
