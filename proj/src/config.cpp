#include "rgr/config.hpp"

#include <fstream>

#include <json.hpp>

#include "rgr/io.hpp"

namespace rgr {

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& scope, const std::string& key) {
    if (!j.contains(key)) throw ConfigError(scope + ": missing required field '" + key + "'");
    if (!j[key].is_number()) throw ConfigError(scope + "." + key + ": expected a number");
    return j[key].get<double>();
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j[key].get<T>();
}

PdeRunConfig parse_pde(const json& j, const std::string& scope, bool needs_re) {
    PdeRunConfig p;
    if (j.contains("domain")) {
        const auto& d = j["domain"];
        if (!d.is_array() || d.size() != 2) throw ConfigError(scope + ".domain: expected [min, max]");
        p.x_min = d[0].get<double>();
        p.x_max = d[1].get<double>();
    }
    p.final_time = require_number(j, scope, "final_time");
    p.dx = require_number(j, scope, "dx");
    p.dt = j.contains("dt") ? require_number(j, scope, "dt") : p.dt;
    if (needs_re) p.reynolds = get_or(j, "reynolds", 1000.0);
    p.snapshot_stride = get_or(j, "snapshot_stride", 1);
    if (j.contains("initial_condition")) {
        const auto& ic = j["initial_condition"];
        p.ic_shape = get_or<std::string>(ic, "shape", "gaussian");
        p.ic_mode = get_or(ic, "mode", 1);
        p.ic_offset = get_or(ic, "offset", 0.0);
        p.ic_amplitude = get_or(ic, "amplitude", 1.0);
        p.ic_center = get_or(ic, "center", 0.5);
        p.ic_width = get_or(ic, "width", 0.1);
    }
    if (!(p.dx > 0)) throw ConfigError(scope + ".dx: must be positive");
    if (!(p.dt > 0)) throw ConfigError(scope + ".dt: must be positive");
    if (!(p.final_time > 0)) throw ConfigError(scope + ".final_time: must be positive");
    if (!(p.x_max > p.x_min)) throw ConfigError(scope + ".domain: max must exceed min");
    return p;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        // nlohmann reports byte offsets; recover the line number for the message
        std::ifstream is2(path);
        std::string text((std::istreambuf_iterator<char>(is2)), std::istreambuf_iterator<char>());
        size_t line = 1;
        for (size_t i = 0; i < std::min(text.size(), e.byte); ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError(path + ":" + std::to_string(line) + ": " + e.what());
    }

    ExperimentConfig cfg;
    cfg.name = get_or<std::string>(j, "experiment", "experiment");
    cfg.output_dir = get_or<std::string>(j, "output_dir", "out");

    if (!j.contains("dataset")) throw ConfigError("missing required section 'dataset'");
    const auto& d = j["dataset"];
    auto& ds = cfg.dataset;
    ds.generator = get_or<std::string>(d, "generator", "");
    if (ds.generator == "burgers" || ds.generator == "wave") {
        ds.pde = parse_pde(d, "dataset", ds.generator == "burgers");
    } else if (ds.generator == "rotated_glyph") {
        ds.glyph_size = get_or(d, "size", 50);
        ds.total_degrees = get_or(d, "total_degrees", 90.0);
        ds.increment_degrees = get_or(d, "increment_degrees", 3.0);
        ds.glyph = get_or<std::string>(d, "glyph", "A");
        if (ds.glyph_size < 8) throw ConfigError("dataset.size: must be >= 8");
    } else if (ds.generator == "advecting_gaussian") {
        ds.pde = parse_pde(d, "dataset", false);
        ds.speed = require_number(d, "dataset", "speed");
        ds.num_steps = static_cast<int>(require_number(d, "dataset", "num_steps"));
    } else if (ds.generator == "file") {
        ds.path = get_or<std::string>(d, "path", "");
        if (ds.path.empty()) throw ConfigError("dataset.path: required for the file generator");
        if (!d.contains("grid")) throw ConfigError("dataset.grid: required for the file generator");
        const auto& g = d["grid"];
        ds.grid_dim = get_or(g, "dim", 1);
        if (ds.grid_dim < 1 || ds.grid_dim > 2) throw ConfigError("dataset.grid.dim: must be 1 or 2");
        ds.grid_shape = g["shape"].get<std::vector<int>>();
        for (const auto& b : g["bounds"])
            ds.grid_bounds.emplace_back(b[0].get<double>(), b[1].get<double>());
        if (static_cast<int>(ds.grid_shape.size()) != ds.grid_dim ||
            static_cast<int>(ds.grid_bounds.size()) != ds.grid_dim)
            throw ConfigError("dataset.grid: shape/bounds must have one entry per axis");
    } else {
        throw ConfigError("dataset.generator: expected one of burgers, wave, rotated_glyph, "
                          "advecting_gaussian, file");
    }

    if (j.contains("registration")) {
        const auto& r = j["registration"];
        auto& rc = cfg.registration;
        rc.grid_rank = get_or(r, "grid_rank", 1);
        rc.latent_rank = get_or(r, "latent_rank", 1);
        rc.gamma1 = get_or(r, "gamma1", 0.0);
        rc.gamma2 = get_or(r, "gamma2", 0.0);
        rc.v_min = get_or(r, "v_min", 0.0);
        rc.boundary_pinned = get_or(r, "boundary_pinned", true);
        rc.control_counts = get_or(r, "control_counts", std::vector<int>{});
        rc.control_steps = get_or(r, "control_steps", 0);
        rc.interp_degree = get_or(r, "interp_degree", 1);
        rc.max_iters = get_or(r, "max_iters", 100);
        rc.perturb_scale = get_or(r, "perturb_scale", 1e-3);
        rc.seed = get_or<std::uint64_t>(r, "seed", 0);
        if (rc.grid_rank < 1) throw ConfigError("registration.grid_rank: must be >= 1");
        if (rc.latent_rank < 1) throw ConfigError("registration.latent_rank: must be >= 1");
        if (rc.v_min < 0) throw ConfigError("registration.v_min: must be >= 0");
        if (rc.interp_degree != 1 && rc.interp_degree != 3)
            throw ConfigError("registration.interp_degree: must be 1 or 3");
        if (rc.max_iters < 0) throw ConfigError("registration.max_iters: must be >= 0");
    }

    if (j.contains("forecast") && !j["forecast"].is_null()) {
        const auto& f = j["forecast"];
        ForecastConfig fc;
        fc.split_fraction = get_or(f, "split_fraction", 0.6);
        fc.ar_order = get_or(f, "ar_order", 2);
        fc.ridge = get_or(f, "ridge", 1e-8);
        fc.horizon = get_or(f, "horizon", 0);
        if (!(fc.split_fraction > 0.0 && fc.split_fraction < 1.0))
            throw ConfigError("forecast.split_fraction: must be in (0, 1)");
        if (fc.ar_order < 1) throw ConfigError("forecast.ar_order: must be >= 1");
        if (fc.ridge < 0) throw ConfigError("forecast.ridge: must be >= 0");
        cfg.forecast = fc;
    }
    return cfg;
}

Dataset generate_dataset(const DatasetConfig& cfg) {
    if (cfg.generator == "burgers") return burgers_solve(cfg.pde);
    if (cfg.generator == "wave") return wave_solve(cfg.pde);
    if (cfg.generator == "rotated_glyph")
        return rotated_glyph(cfg.glyph_size, cfg.total_degrees, cfg.increment_degrees, cfg.glyph);
    if (cfg.generator == "advecting_gaussian")
        return advecting_gaussian(cfg.speed, cfg.pde, cfg.num_steps).data;
    if (cfg.generator == "file") {
        Dataset ds;
        ds.snapshots = read_matrix(cfg.path);
        std::vector<Vector> axes;
        Eigen::Index n = 1;
        for (int a = 0; a < cfg.grid_dim; ++a) {
            axes.push_back(Vector::LinSpaced(cfg.grid_shape[a], cfg.grid_bounds[a].first,
                                             cfg.grid_bounds[a].second));
            n *= cfg.grid_shape[a];
        }
        if (n != ds.snapshots.rows())
            throw ConfigError("dataset.grid.shape: product does not match snapshot rows");
        ds.reference = ReferenceGrid::from_axes(std::move(axes));
        ds.times = Vector::LinSpaced(ds.snapshots.cols(), 0.0, ds.snapshots.cols() - 1.0);
        return ds;
    }
    throw ConfigError("dataset.generator: unknown generator " + cfg.generator);
}

RegistrationProblem make_problem(const ExperimentConfig& cfg, const Dataset& ds, int columns) {
    RegistrationProblem p;
    p.snapshots = columns > 0 ? Matrix(ds.snapshots.leftCols(columns)) : ds.snapshots;
    p.reference = ds.reference;
    const auto& rc = cfg.registration;
    p.grid_rank = rc.grid_rank;
    p.latent_rank = rc.latent_rank;
    p.gamma1 = rc.gamma1;
    p.gamma2 = rc.gamma2;
    p.v_min = rc.v_min;
    p.boundary_pinned = rc.boundary_pinned;
    p.control_counts = rc.control_counts;
    p.control_steps = rc.control_steps;
    p.interp.degree = rc.interp_degree;
    p.max_iters = rc.max_iters;
    p.perturb_scale = rc.perturb_scale;
    p.seed = rc.seed;
    return p;
}

}  // namespace rgr
