#include "rgr/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "rgr/io.hpp"

namespace rgr {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string path_join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_json(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidDataError("missing artifact: " + path);
    json j;
    is >> j;
    return j;
}

std::vector<double> spectrum_list(const Vector& s, size_t cap = 64) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < s.size() && out.size() < cap; ++i) out.push_back(s[i]);
    return out;
}

void save_grid(const std::string& dir, const MovingGrid& g) {
    json meta;
    meta["dim"] = g.reference.dim;
    meta["rank"] = g.rank;
    meta["num_steps"] = g.num_steps;
    meta["upsample_degree"] = g.upsample_degree;
    meta["boundary_pinned"] = g.boundary_pinned;
    std::vector<std::vector<double>> ctrl_axes;
    for (const auto& ax : g.control_axis)
        ctrl_axes.emplace_back(ax.data(), ax.data() + ax.size());
    meta["control_axis"] = ctrl_axes;
    meta["control_steps"] = std::vector<double>(g.control_steps.data(),
                                               g.control_steps.data() + g.control_steps.size());
    write_json(path_join(dir, "grid.json"), meta);
    for (int c = 0; c < g.reference.dim; ++c) {
        write_matrix(path_join(dir, "grid_basis" + std::to_string(c) + ".rgr"), g.basis[c]);
        write_matrix(path_join(dir, "grid_coeffs" + std::to_string(c) + ".rgr"), g.coeffs[c]);
    }
}

double mse_per_entry(const Matrix& a, const Matrix& b) {
    return (a - b).squaredNorm() / static_cast<double>(a.size());
}

}  // namespace

Dataset Runner::load_dataset() const {
    Dataset ds;
    ds.snapshots = read_matrix(path_join(out_dir, "snapshots.rgr"));
    const Matrix t = read_matrix(path_join(out_dir, "times.rgr"));
    ds.times = t.transpose().col(0);
    std::vector<Vector> axes;
    for (int a = 0;; ++a) {
        const std::string p = path_join(out_dir, "axis" + std::to_string(a) + ".rgr");
        if (!fs::exists(p)) break;
        const Matrix ax = read_matrix(p);
        axes.push_back(ax.transpose().col(0));
    }
    ds.reference = ReferenceGrid::from_axes(std::move(axes));
    return ds;
}

MovingGrid Runner::load_grid(const Dataset& ds) const {
    const json meta = read_json(path_join(out_dir, "grid.json"));
    MovingGrid g;
    g.reference = ds.reference;
    g.rank = meta["rank"].get<int>();
    g.num_steps = meta["num_steps"].get<int>();
    g.upsample_degree = meta["upsample_degree"].get<int>();
    g.boundary_pinned = meta["boundary_pinned"].get<bool>();
    for (const auto& ax : meta["control_axis"].get<std::vector<std::vector<double>>>())
        g.control_axis.push_back(Eigen::Map<const Vector>(ax.data(), ax.size()));
    const auto cs = meta["control_steps"].get<std::vector<double>>();
    g.control_steps = Eigen::Map<const Vector>(cs.data(), cs.size());
    for (int c = 0; c < g.reference.dim; ++c) {
        g.basis.push_back(read_matrix(path_join(out_dir, "grid_basis" + std::to_string(c) + ".rgr")));
        g.coeffs.push_back(read_matrix(path_join(out_dir, "grid_coeffs" + std::to_string(c) + ".rgr")));
    }
    g.rebuild_upsample();
    return g;
}

void Runner::generate() const {
    fs::create_directories(out_dir);
    const Dataset ds = generate_dataset(cfg.dataset);
    write_matrix(path_join(out_dir, "snapshots.rgr"), ds.snapshots);
    write_matrix(path_join(out_dir, "times.rgr"), ds.times.transpose());
    for (int a = 0; a < ds.reference.dim; ++a)
        write_matrix(path_join(out_dir, "axis" + std::to_string(a) + ".rgr"),
                     ds.reference.axis[a].transpose());
    if (!quiet)
        std::cout << "generated " << ds.snapshots.rows() << "x" << ds.snapshots.cols()
                  << " snapshot matrix\n";
}

void Runner::train() const {
    const Dataset ds = load_dataset();
    RegistrationProblem p = make_problem(cfg, ds);
    p.threads = threads;
    const RegistrationResult res = rgr::train(p);

    save_grid(out_dir, res.grid);
    write_matrix(path_join(out_dir, "latent_left.rgr"), res.latent.left);
    write_matrix(path_join(out_dir, "latent_right.rgr"), res.latent.right);

    std::ofstream trace(path_join(out_dir, "trace.csv"));
    trace << "iteration,total,data,reg1,reg2,penalty,min_volume\n";
    char buf[192];
    for (size_t i = 0; i < res.trace.size(); ++i) {
        const auto& t = res.trace[i];
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, t.total,
                      t.data, t.reg1, t.reg2, t.penalty, t.min_volume);
        trace << buf;
    }

    json tj;
    tj["iterations"] = res.iterations;
    tj["converged"] = res.converged;
    tj["data_error_abs"] = res.data_error;
    tj["data_error_rel"] = res.data_error_rel;
    tj["min_cell_volume"] = res.volumes.global_min;
    write_json(path_join(out_dir, "train.json"), tj);
    if (!quiet)
        std::cout << "trained: data error " << res.data_error_rel << " (rel), "
                  << res.iterations << " iterations\n";
}

void Runner::evaluate() const {
    const Dataset ds = load_dataset();
    const MovingGrid g = load_grid(ds);
    const json tj = read_json(path_join(out_dir, "train.json"));

    const InterpConfig interp{cfg.registration.interp_degree};
    const int kr = cfg.registration.latent_rank;
    const Matrix mapped = map_forward(ds.snapshots, g, interp);
    const LowRankFactors f = truncated_svd(mapped, kr);
    const Matrix back = map_inverse(reconstruct(f), g, interp);
    const double err = (ds.snapshots - back).norm();
    const double nrm = ds.snapshots.norm();

    const LowRankFactors pod = truncated_svd(ds.snapshots, kr);
    const double pod_err = (ds.snapshots - reconstruct(pod)).norm();
    const Vector spec_m = singular_values(ds.snapshots);
    const Vector spec_gm = singular_values(mapped);
    const VolumeReport vols = validate_diffeomorphism(g, cfg.registration.v_min);

    json m;
    m["experiment"] = cfg.name;
    m["grid_rank"] = cfg.registration.grid_rank;
    m["latent_rank"] = kr;
    m["data_error_abs"] = err;
    m["data_error_rel"] = nrm > 0 ? err / nrm : err;
    m["pod_error_abs"] = pod_err;
    m["pod_error_rel"] = nrm > 0 ? pod_err / nrm : pod_err;
    m["singular_values_snapshots"] = spectrum_list(spec_m);
    m["singular_values_mapped"] = spectrum_list(spec_gm);
    m["min_cell_volume"] = vols.global_min;
    m["v_min"] = cfg.registration.v_min;
    m["volume_feasible"] = vols.passed;
    m["iterations"] = tj["iterations"];
    m["converged"] = tj["converged"];
    const auto t1 = std::chrono::steady_clock::now();
    m["wall_time_s"] = std::chrono::duration<double>(t1 - start).count();
    write_json(path_join(out_dir, "metrics.json"), m);

    // Plot data: singular spectra and error-vs-rank series.
    {
        std::ofstream os(path_join(out_dir, "plot_singular_values.csv"));
        os << "index,sigma_snapshots,sigma_mapped\n";
        const Eigen::Index n = std::min(spec_m.size(), spec_gm.size());
        char buf[96];
        for (Eigen::Index i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", static_cast<long>(i + 1), spec_m[i],
                          spec_gm[i]);
            os << buf;
        }
    }
    {
        std::ofstream os(path_join(out_dir, "plot_error_vs_rank.csv"));
        os << "rank,pod_rel_error,mapped_rel_error\n";
        const double total_m = spec_m.squaredNorm(), total_gm = spec_gm.squaredNorm();
        double tail_m = total_m, tail_gm = total_gm;
        char buf[96];
        for (Eigen::Index k = 1; k <= std::min<Eigen::Index>(spec_m.size(), 16); ++k) {
            tail_m -= spec_m[k - 1] * spec_m[k - 1];
            tail_gm -= spec_gm[k - 1] * spec_gm[k - 1];
            std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", static_cast<long>(k),
                          std::sqrt(std::max(0.0, tail_m) / total_m),
                          std::sqrt(std::max(0.0, tail_gm) / total_gm));
            os << buf;
        }
    }
    if (!quiet) std::cout << "metrics written to " << path_join(out_dir, "metrics.json") << "\n";
}

void Runner::forecast() const {
    if (!cfg.forecast) throw ConfigError("forecast: section not present in config");
    const ForecastConfig& fc = *cfg.forecast;
    const Dataset ds = load_dataset();
    const int total = static_cast<int>(ds.snapshots.cols());
    const int n_train = static_cast<int>(fc.split_fraction * total);
    int horizon = total - n_train;
    if (fc.horizon > 0) horizon = std::min(fc.horizon, horizon);
    if (n_train < 4 || horizon < 1)
        throw ConfigError("forecast.split_fraction: split leaves too few columns");

    RegistrationProblem p = make_problem(cfg, ds, n_train);
    p.threads = threads;
    const RegistrationResult res = rgr::train(p);
    const MovingGrid g_ext = extend_grid(res.grid, horizon, cfg.registration.v_min);
    const InterpConfig interp{cfg.registration.interp_degree};

    LatentSeries series{res.latent.right, ds.times.head(n_train)};
    const ArModel model = fit_ar(series, fc.ar_order, fc.ridge);
    const LatentSeries pred = predict(model, series, horizon);
    const Matrix rec = reconstruct_prediction(g_ext, res.latent.left, pred, n_train, interp);

    const Matrix train_rec = map_inverse(reconstruct(res.latent), res.grid, interp);
    const Matrix test = ds.snapshots.middleCols(n_train, horizon);

    // POD baseline with identical latent rank, AR order, and ridge.
    const LowRankFactors pod = truncated_svd(p.snapshots, p.latent_rank);
    LatentSeries pod_series{pod.right, ds.times.head(n_train)};
    const ArModel pod_model = fit_ar(pod_series, fc.ar_order, fc.ridge);
    const LatentSeries pod_pred = predict(pod_model, pod_series, horizon);
    const Matrix pod_rec = pod.left * pod_pred.coords;

    json s;
    s["split_index"] = n_train;
    s["horizon"] = horizon;
    s["ar_order"] = fc.ar_order;
    s["ridge"] = fc.ridge;
    s["mse_normalization"] = "per-entry";
    s["train_mse"] = mse_per_entry(p.snapshots, train_rec);
    s["test_mse"] = mse_per_entry(test, rec);
    s["pod_train_mse"] = mse_per_entry(p.snapshots, reconstruct(pod));
    s["pod_test_mse"] = mse_per_entry(test, pod_rec);
    std::vector<double> per_step, pod_per_step;
    for (int h = 0; h < horizon; ++h) {
        per_step.push_back(mse_per_entry(test.col(h), rec.col(h)));
        pod_per_step.push_back(mse_per_entry(test.col(h), pod_rec.col(h)));
    }
    s["per_step_mse"] = per_step;
    s["pod_per_step_mse"] = pod_per_step;
    write_json(path_join(out_dir, "forecast_summary.json"), s);
    write_matrix(path_join(out_dir, "prediction.rgr"), rec);

    std::ofstream os(path_join(out_dir, "plot_forecast_mse.csv"));
    os << "step,time,mse_registered,mse_pod\n";
    char buf[128];
    for (int h = 0; h < horizon; ++h) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", n_train + h,
                      ds.times[n_train + h], per_step[h], pod_per_step[h]);
        os << buf;
    }
    if (!quiet)
        std::cout << "forecast test MSE " << s["test_mse"].get<double>() << " (POD "
                  << s["pod_test_mse"].get<double>() << ")\n";
}

void Runner::run_all() const {
    generate();
    train();
    evaluate();
    if (cfg.forecast) forecast();
}

}  // namespace rgr
