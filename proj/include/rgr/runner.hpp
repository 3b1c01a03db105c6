#pragma once

#include <chrono>

#include "rgr/config.hpp"
#include "rgr/forecast.hpp"

namespace rgr {

// Orchestrates the experiment pipeline around an output directory:
//   generate -> train -> evaluate -> forecast
// Each stage reads the artifacts of the previous one from disk, so the CLI
// subcommands can also be run individually.
struct Runner {
    ExperimentConfig cfg;
    std::string out_dir;
    int threads = 0;
    bool quiet = false;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void generate() const;
    void train() const;
    void evaluate() const;
    void forecast() const;
    void run_all() const;

    Dataset load_dataset() const;
    MovingGrid load_grid(const Dataset& ds) const;
};

}  // namespace rgr
