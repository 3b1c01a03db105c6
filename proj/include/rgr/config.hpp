#pragma once

#include <optional>
#include <string>

#include "rgr/datagen.hpp"
#include "rgr/registration.hpp"

namespace rgr {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DatasetConfig {
    std::string generator;  // burgers | wave | rotated_glyph | advecting_gaussian | file
    PdeRunConfig pde;
    // rotated_glyph
    int glyph_size = 50;
    double total_degrees = 90.0;
    double increment_degrees = 3.0;
    std::string glyph = "A";
    // advecting_gaussian
    double speed = 1.0;
    int num_steps = 0;
    // file ingestion (externally produced snapshots)
    std::string path;
    int grid_dim = 1;
    std::vector<int> grid_shape;
    std::vector<std::pair<double, double>> grid_bounds;
};

struct RegistrationConfig {
    int grid_rank = 1;
    int latent_rank = 1;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double v_min = 0.0;
    bool boundary_pinned = true;
    std::vector<int> control_counts;
    int control_steps = 0;
    int interp_degree = 1;
    int max_iters = 100;
    double perturb_scale = 1e-3;
    std::uint64_t seed = 0;
};

struct ForecastConfig {
    double split_fraction = 0.6;
    int ar_order = 2;
    double ridge = 1e-8;
    int horizon = 0;  // 0 = everything past the split
};

struct ExperimentConfig {
    std::string name;
    DatasetConfig dataset;
    RegistrationConfig registration;
    std::optional<ForecastConfig> forecast;
    std::string output_dir = "out";
};

// Parses and validates; throws ConfigError with the offending field (or a
// line anchor for syntax errors).
ExperimentConfig load_config(const std::string& path);

Dataset generate_dataset(const DatasetConfig& cfg);

RegistrationProblem make_problem(const ExperimentConfig& cfg, const Dataset& ds, int columns = 0);

}  // namespace rgr
