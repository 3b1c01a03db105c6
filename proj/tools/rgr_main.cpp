#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rgr/io.hpp"
#include "rgr/parallel.hpp"
#include "rgr/runner.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool quiet = false;
};

rgr::Runner make_runner(const Options& opt) {
    rgr::Runner r;
    r.cfg = rgr::load_config(opt.config);
    r.out_dir = opt.out.empty() ? r.cfg.output_dir : opt.out;
    if (opt.seed_set) r.cfg.registration.seed = opt.seed;
    r.threads = rgr::resolve_threads(opt.threads);
    r.quiet = opt.quiet;
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"registration-based low-rank reduction of transport-dominated snapshots"};
    app.require_subcommand(1);

    Options opt;
    std::string matrix_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "experiment config (JSON)")->required();
        sub->add_option("--out", opt.out, "output directory (overrides config)");
        sub->add_option("--seed", opt.seed, "RNG seed (overrides config)")
            ->each([&](const std::string&) { opt.seed_set = true; });
        sub->add_option("--threads", opt.threads, "worker threads, 0 = auto");
        sub->add_flag("--quiet", opt.quiet, "suppress progress output");
    };

    CLI::App* generate = app.add_subcommand("generate", "generate snapshots from the config");
    CLI::App* train = app.add_subcommand("train", "fit the low-rank moving grid");
    CLI::App* evaluate = app.add_subcommand("evaluate", "compute metrics for a trained grid");
    CLI::App* forecast = app.add_subcommand("forecast", "train on a split and forecast the rest");
    CLI::App* run = app.add_subcommand("run", "generate, train, evaluate, and forecast");
    for (CLI::App* sub : {generate, train, evaluate, forecast, run}) add_common(sub);

    CLI::App* export_csv = app.add_subcommand("export-csv", "print a matrix file as CSV");
    export_csv->add_option("matrixfile", matrix_path, "matrix file to print")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (export_csv->parsed()) {
            rgr::write_matrix_csv(std::cout, rgr::read_matrix(matrix_path));
            return 0;
        }
        const rgr::Runner r = make_runner(opt);
        if (generate->parsed()) r.generate();
        else if (train->parsed()) r.train();
        else if (evaluate->parsed()) r.evaluate();
        else if (forecast->parsed()) r.forecast();
        else r.run_all();
        return 0;
    } catch (const rgr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const rgr::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
