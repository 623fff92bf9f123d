// ubmlab: simulate unitary Brownian motion, evaluate the limiting spectral
// measure, and run statistical verification suites against it.

#include <CLI11.hpp>

#include <complex>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ubmlab/biane.hpp"
#include "ubmlab/characteristics.hpp"
#include "ubmlab/eigen_config.hpp"
#include "ubmlab/errors.hpp"
#include "ubmlab/io.hpp"
#include "ubmlab/parallel.hpp"
#include "ubmlab/polar.hpp"
#include "ubmlab/sim.hpp"
#include "ubmlab/stats.hpp"
#include "ubmlab/verify.hpp"
#include "ubmlab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ubmlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitThreshold = 4;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("UBMLAB_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw CLI::ValidationError("UBMLAB_SEED", "not a valid unsigned integer");
        }
    }
    return 1;
}

struct ManifestScope {
    io::RunManifest manifest;
    std::string out_dir;

    ManifestScope(const std::string& command, const std::string& dir, std::uint64_t seed)
        : out_dir(dir) {
        manifest.command = command;
        manifest.tool_version = kVersion;
        manifest.master_seed = seed;
        manifest.started_utc = io::iso_timestamp_utc();
        fs::create_directories(dir);
    }

    void put(const std::string& key, const std::string& value) { manifest.config[key] = value; }
    void put(const std::string& key, double value) { manifest.config[key] = io::fmt17(value); }
    void put(const std::string& key, std::uint64_t value) {
        manifest.config[key] = std::to_string(value);
    }

    void emit(const std::string& name, const std::string& content) {
        io::write_text_file((fs::path(out_dir) / name).string(), content);
        manifest.add_output(out_dir, name);
    }

    void finish() {
        manifest.finished_utc = io::iso_timestamp_utc();
        manifest.write((fs::path(out_dir) / "manifest.json").string());
    }
};

std::vector<sim::Trajectory> run_trials(const sim::SimConfig& base, std::size_t trials,
                                        unsigned jobs) {
    std::vector<sim::Trajectory> out(trials);
    parallel_trials(trials, jobs, [&](std::size_t k) {
        sim::SimConfig cfg = base;
        cfg.trial = k;
        out[k] = sim::simulate(cfg);
    });
    return out;
}

std::vector<EigenAngleConfig> final_snapshots(const std::vector<sim::Trajectory>& trajs) {
    std::vector<EigenAngleConfig> out;
    out.reserve(trajs.size());
    for (const auto& t : trajs) out.push_back(t.final_snapshot());
    return out;
}

// ---------------------------------------------------------------- density ---

struct DensityArgs {
    double t = 1.0;
    std::size_t n = 2048;
    std::size_t quantile_n = 0;
    std::string out = "out";
};

int cmd_density(const DensityArgs& args) {
    ManifestScope scope("density", args.out, 0);
    scope.put("t", args.t);
    scope.put("n", static_cast<std::uint64_t>(args.n));
    scope.put("quantiles", static_cast<std::uint64_t>(args.quantile_n));

    const auto curve = biane::density_curve(args.t, args.n);
    std::ostringstream csv;
    csv << "theta,rho\n";
    for (std::size_t i = 0; i < curve.theta.size(); ++i)
        csv << io::fmt17(curve.theta[i]) << ',' << io::fmt17(curve.rho[i]) << '\n';
    scope.emit("density.csv", csv.str());

    json meta;
    meta["schema"] = "ubm-density-meta/1";
    meta["t"] = args.t;
    meta["theta_edge"] = curve.edge;
    meta["gap"] = curve.gap;
    meta["grid_size"] = args.n;
    meta["solver_tolerance"] = 1e-13;
    meta["trapezoid_mass"] = curve.trapezoid_mass();
    if (args.t >= 4.0) meta["rho_at_pi"] = biane::density(std::numbers::pi, args.t);
    scope.emit("meta.json", meta.dump(2) + "\n");

    if (args.quantile_n > 0) {
        const auto table = biane::quantiles(args.t, args.quantile_n);
        std::ostringstream qcsv;
        qcsv << "i,gamma\n";
        for (std::size_t i = 1; i <= table.size(); ++i)
            qcsv << i << ',' << io::fmt17(table.gamma(static_cast<std::ptrdiff_t>(i))) << '\n';
        scope.emit("quantiles.csv", qcsv.str());
    }
    scope.finish();

    std::cout << "t=" << args.t << " Theta_t=" << io::fmt17(curve.edge)
              << " Delta_t=" << io::fmt17(curve.gap)
              << " mass=" << io::fmt17(curve.trapezoid_mass());
    if (args.t >= 4.0)
        std::cout << " rho(pi)=" << io::fmt17(biane::density(std::numbers::pi, args.t));
    std::cout << "\n";
    return kExitOk;
}

// --------------------------------------------------------------- simulate ---

struct SimulateArgs {
    std::size_t n = 32;
    double t = 1.0;
    double dt = 1e-3;
    double beta = 2.0;
    std::string mode = "matrix";
    std::uint64_t seed = 1;
    std::size_t trials = 1;
    std::vector<double> snapshots;
    unsigned jobs = 0;
    bool no_tracking = false;
    std::string out = "out";
};

int cmd_simulate(const SimulateArgs& args) {
    sim::SimConfig cfg;
    cfg.n = args.n;
    cfg.t_final = args.t;
    cfg.dt = args.dt;
    cfg.beta = args.beta;
    cfg.seed = args.seed;
    cfg.mode = args.mode == "particles" ? sim::Mode::particles : sim::Mode::matrix;
    cfg.snapshot_times = args.snapshots;
    cfg.track_winding = !args.no_tracking;
    cfg.validate();

    ManifestScope scope("simulate", args.out, args.seed);
    scope.put("n", static_cast<std::uint64_t>(args.n));
    scope.put("t", args.t);
    scope.put("dt", args.dt);
    scope.put("beta", args.beta);
    scope.put("mode", args.mode);
    scope.put("seed", args.seed);
    scope.put("trials", static_cast<std::uint64_t>(args.trials));
    scope.put("no_tracking", args.no_tracking ? "true" : "false");
    {
        std::ostringstream snap;
        for (std::size_t i = 0; i < args.snapshots.size(); ++i)
            snap << (i ? "," : "") << io::fmt17(args.snapshots[i]);
        scope.put("snapshots", snap.str());
    }

    const auto trajs = run_trials(cfg, args.trials, args.jobs);
    json runs = json::array();
    for (std::size_t k = 0; k < trajs.size(); ++k) {
        std::ostringstream csv;
        write_configs_csv(csv, trajs[k].snapshots);
        const std::string name = "trajectory_" + std::to_string(k) + ".csv";
        scope.emit(name, csv.str());
        json r;
        r["trial"] = k;
        r["stream_id"] = trajs[k].stream_id;
        r["max_unitarity_defect"] = trajs[k].max_unitarity_defect;
        r["substep_halvings"] = trajs[k].substep_halvings;
        r["com_trace_final"] = trajs[k].com_trace.back();
        runs.push_back(r);
    }
    json summary;
    summary["schema"] = "ubm-run/1";
    summary["runs"] = runs;
    scope.emit("runs.json", summary.dump(2) + "\n");
    scope.finish();
    std::cout << "wrote " << trajs.size() << " trajectories to " << args.out << "\n";
    return kExitOk;
}

// ------------------------------------------------------- characteristics ---

struct CharArgs {
    double z_r = 1.2;
    double z_theta = 0.3;
    double t = 1.0;
    std::size_t m = 64;
    bool cusp_check = false;
    std::string out = "out";
};

int cmd_characteristics(const CharArgs& args) {
    if (args.z_r <= 1.0)
        throw CLI::ValidationError("--z-r", "CLI accepts exterior endpoints only (|z| > 1)");
    ManifestScope scope("characteristics", args.out, 0);
    scope.put("z_r", args.z_r);
    scope.put("z_theta", args.z_theta);
    scope.put("t", args.t);
    scope.put("m", static_cast<std::uint64_t>(args.m));
    scope.put("cusp_check", args.cusp_check ? "true" : "false");

    const PolarPoint z(args.z_r, args.z_theta);
    const auto path = chars::characteristic_path(z, args.t, args.m);
    std::ostringstream csv;
    path.write_csv(csv);
    scope.emit("path.csv", csv.str());

    json diag;
    diag["schema"] = "ubm-path-diag/1";
    diag["t"] = args.t;
    diag["max_f_drift_rel"] = path.max_f_drift_rel();
    diag["max_radial_residual"] = path.max_radial_residual();
    diag["max_abs_point"] = path.max_abs_point();
    bool im_sign_constant = true;
    const double sign0 = path.points.front().imag() >= 0.0 ? 1.0 : -1.0;
    for (const auto& p : path.points)
        if (p.imag() * sign0 < 0.0) im_sign_constant = false;
    diag["im_sign_constant"] = im_sign_constant;
    if (args.cusp_check) {
        const auto rep = chars::cusp_angular_decay_check(z, args.t, args.m);
        diag["cusp_check"]["applicable"] = rep.applicable;
        diag["cusp_check"]["status"] = rep.status;
        diag["cusp_check"]["fitted_slope"] = rep.fitted_slope;
        diag["cusp_check"]["fit_r2"] = rep.fit_r2;
        diag["cusp_check"]["kappa_monotone"] = rep.kappa_monotone;
        diag["cusp_check"]["window_samples"] = rep.window_samples;
    }
    scope.emit("diagnostics.json", diag.dump(2) + "\n");
    scope.finish();
    std::cout << "f drift " << io::fmt17(path.max_f_drift_rel()) << ", radial residual "
              << io::fmt17(path.max_radial_residual()) << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ verify ---

struct VerifyArgs {
    std::string suite = "all";
    std::size_t n = 256;
    double t = 1.0;
    double dt = 1e-3;
    std::size_t trials = 200;
    double eps = 0.3;
    double delta = 0.1;
    double frak_c = 0.05;
    double required = 0.95;
    std::uint64_t seed = 1;
    unsigned jobs = 0;
    std::string mode = "particles";
    std::vector<std::string> inputs;
    std::string interval = "0,1";
    bool quick = false;
    std::string out = "out";
};

std::vector<EigenAngleConfig> verify_ensemble(const VerifyArgs& args, std::size_t n,
                                              double t, std::size_t trials) {
    if (!args.inputs.empty()) {
        std::vector<EigenAngleConfig> configs;
        for (const auto& path : args.inputs) {
            for (auto& c : read_configs_csv_file(path)) {
                if (std::abs(c.t() - t) > 1e-9)
                    throw std::runtime_error("input snapshot at t=" + std::to_string(c.t()) +
                                             " does not match requested t");
                configs.push_back(std::move(c));
            }
        }
        if (configs.empty()) throw std::runtime_error("no usable snapshots in --input files");
        return configs;
    }
    sim::SimConfig cfg;
    cfg.n = n;
    cfg.t_final = t;
    cfg.dt = args.dt;
    cfg.beta = 2.0;
    cfg.seed = args.seed;
    cfg.mode = args.mode == "matrix" ? sim::Mode::matrix : sim::Mode::particles;
    cfg.track_winding = cfg.mode == sim::Mode::matrix;
    return final_snapshots(run_trials(cfg, trials, args.jobs));
}

int cmd_verify(const VerifyArgs& args_in) {
    VerifyArgs args = args_in;
    if (args.quick) {
        args.trials = std::min<std::size_t>(args.trials, 20);
        args.n = std::min<std::size_t>(args.n, 128);
    }
    ManifestScope scope("verify", args.out, args.seed);
    scope.put("suite", args.suite);
    scope.put("n", static_cast<std::uint64_t>(args.n));
    scope.put("t", args.t);
    scope.put("dt", args.dt);
    scope.put("trials", static_cast<std::uint64_t>(args.trials));
    scope.put("eps", args.eps);
    scope.put("delta", args.delta);
    scope.put("frak_c", args.frak_c);
    scope.put("required", args.required);
    scope.put("seed", args.seed);
    scope.put("mode", args.mode);
    scope.put("quick", args.quick ? "true" : "false");
    scope.put("interval", args.interval);

    bool all_pass = true;
    json combined;
    combined["schema"] = "ubm-report/1";
    combined["suites"] = json::array();

    auto add_report = [&](const verify::RigidityReport& rep) {
        all_pass = all_pass && rep.pass;
        combined["suites"].push_back(json::parse(rep.to_json()));
        std::ostringstream csv;
        rep.write_csv(csv);
        scope.emit("report_" + rep.suite + ".csv", csv.str());
        std::cout << rep.suite << ": pass_fraction=" << rep.pass_fraction
                  << (rep.pass ? " PASS" : " FAIL") << "\n";
    };

    const bool want_all = args.suite == "all";
    if (want_all || args.suite == "edge") {
        const auto configs = verify_ensemble(args, args.n, args.t, args.trials);
        add_report(verify::edge_rigidity_check(configs, args.t, args.eps, args.required));
    }
    if (want_all || args.suite == "quantile") {
        const auto configs = verify_ensemble(args, args.n, args.t, args.trials);
        add_report(verify::quantile_rigidity_check(configs, args.t, args.eps, args.required));
    }
    if (want_all || args.suite == "cusp") {
        const double tc = args.suite == "cusp" && args.t > 2.0 && args.t < 4.0 ? args.t : 3.7;
        const std::size_t nc = args.suite == "cusp" ? args.n : std::min<std::size_t>(args.n, 256);
        const auto configs = verify_ensemble(args, nc, tc, args.trials);
        add_report(verify::cusp_rigidity_check(configs, tc, args.eps,
                                               std::min(args.required, 0.9)));
    }
    if (want_all || args.suite == "local-law") {
        const std::size_t trials = args.quick ? std::min<std::size_t>(args.trials, 5) : args.trials;
        const auto configs = verify_ensemble(args, args.n, args.t, trials);
        std::size_t good = 0;
        verify::RigidityReport rep;
        rep.suite = "local-law";
        rep.t = args.t;
        rep.n_particles = args.n;
        rep.eps = args.eps;
        rep.trials = configs.size();
        rep.required_fraction = args.required;
        for (const auto& c : configs) {
            const auto grid = verify::local_law_check(c, args.t, args.delta, args.frak_c, args.eps);
            if (grid.empty) throw std::runtime_error("local law grid empty after B_t filtering");
            rep.per_trial_stat.push_back(grid.pass_fraction);
            if (grid.pass_fraction >= 0.99) ++good;
        }
        rep.pass_fraction = static_cast<double>(good) / static_cast<double>(configs.size());
        rep.pass = rep.pass_fraction >= args.required;
        rep.extra["grid_pass_threshold"] = 0.99;
        add_report(rep);
    }
    if (want_all || args.suite == "count") {
        double a = 0.0, b = 1.0;
        {
            std::istringstream iv(args.interval);
            char comma = ',';
            if (!(iv >> a >> comma >> b))
                throw CLI::ValidationError("--interval", "expected two comma-separated angles");
        }
        const auto configs = verify_ensemble(args, args.n, args.t, args.trials);
        verify::RigidityReport rep;
        rep.suite = "count";
        rep.t = args.t;
        rep.n_particles = args.n;
        rep.eps = args.eps;
        rep.trials = configs.size();
        rep.required_fraction = args.required;
        const double bound = std::pow(static_cast<double>(args.n), args.eps);
        std::size_t ok = 0;
        double worst = 0.0;
        for (const auto& c : configs) {
            const auto ic = verify::interval_count_check(c, args.t, a, b);
            rep.per_trial_stat.push_back(ic.discrepancy);
            worst = std::max(worst, ic.discrepancy);
            if (ic.discrepancy <= bound) ++ok;
        }
        rep.pass_fraction = static_cast<double>(ok) / static_cast<double>(rep.trials);
        rep.pass = rep.pass_fraction >= args.required;
        rep.extra["max_discrepancy"] = worst;
        rep.extra["bound"] = bound;
        std::cout << "count interval (" << a << "," << b << "]: max discrepancy " << worst
                  << " vs bound " << bound << "\n";
        add_report(rep);
    }

    combined["pass"] = all_pass;
    scope.emit("report.json", combined.dump(2) + "\n");
    scope.finish();
    return all_pass ? kExitOk : kExitThreshold;
}

// ------------------------------------------------------------------ replay ---

int cmd_replay(const std::string& manifest_path, std::string out_dir) {
    const auto manifest = io::RunManifest::from_json_file(manifest_path);
    if (out_dir.empty()) out_dir = fs::path(manifest_path).parent_path().string() + "_replay";
    auto get = [&](const std::string& key) {
        auto it = manifest.config.find(key);
        if (it == manifest.config.end())
            throw std::runtime_error("manifest missing config key " + key);
        return it->second;
    };

    int rc = kExitOk;
    if (manifest.command == "density") {
        DensityArgs a;
        a.t = std::stod(get("t"));
        a.n = std::stoull(get("n"));
        a.quantile_n = std::stoull(get("quantiles"));
        a.out = out_dir;
        rc = cmd_density(a);
    } else if (manifest.command == "simulate") {
        SimulateArgs a;
        a.n = std::stoull(get("n"));
        a.t = std::stod(get("t"));
        a.dt = std::stod(get("dt"));
        a.beta = std::stod(get("beta"));
        a.mode = get("mode");
        a.seed = std::stoull(get("seed"));
        a.trials = std::stoull(get("trials"));
        a.no_tracking = get("no_tracking") == "true";
        if (const std::string s = get("snapshots"); !s.empty()) {
            std::istringstream ss(s);
            std::string tok;
            while (std::getline(ss, tok, ',')) a.snapshots.push_back(std::stod(tok));
        }
        a.out = out_dir;
        rc = cmd_simulate(a);
    } else if (manifest.command == "characteristics") {
        CharArgs a;
        a.z_r = std::stod(get("z_r"));
        a.z_theta = std::stod(get("z_theta"));
        a.t = std::stod(get("t"));
        a.m = std::stoull(get("m"));
        a.cusp_check = get("cusp_check") == "true";
        a.out = out_dir;
        rc = cmd_characteristics(a);
    } else if (manifest.command == "verify") {
        VerifyArgs a;
        a.suite = get("suite");
        a.n = std::stoull(get("n"));
        a.t = std::stod(get("t"));
        a.dt = std::stod(get("dt"));
        a.trials = std::stoull(get("trials"));
        a.eps = std::stod(get("eps"));
        a.delta = std::stod(get("delta"));
        a.frak_c = std::stod(get("frak_c"));
        a.required = std::stod(get("required"));
        a.seed = std::stoull(get("seed"));
        a.mode = get("mode");
        a.quick = get("quick") == "true";
        a.interval = get("interval");
        a.out = out_dir;
        rc = cmd_verify(a);
    } else {
        throw std::runtime_error("manifest command '" + manifest.command + "' not replayable");
    }

    const auto replayed =
        io::RunManifest::from_json_file((fs::path(out_dir) / "manifest.json").string());
    bool identical = manifest.outputs.size() == replayed.outputs.size();
    for (const auto& [name, hash] : manifest.outputs) {
        auto it = replayed.outputs.find(name);
        if (it == replayed.outputs.end() || it->second != hash) {
            identical = false;
            std::cerr << "replay mismatch: " << name << "\n";
        }
    }
    std::cout << (identical ? "replay reproduced all output hashes\n"
                            : "replay FAILED to reproduce output hashes\n");
    if (!identical) return kExitThreshold;
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"unitary Brownian motion laboratory"};
    app.set_config("--config", "",
                   "flat key = value configuration file (keys scoped as <subcommand>.<flag>)");
    app.require_subcommand(1);

    DensityArgs density_args;
    auto* density = app.add_subcommand("density", "limiting spectral density and quantiles");
    density->add_option("--t", density_args.t, "diffusion time (> 0)")
        ->required()
        ->check(CLI::PositiveNumber);
    density->add_option("--n", density_args.n, "curve sample budget")->check(CLI::Range(16, 1 << 22));
    density->add_option("--quantiles", density_args.quantile_n, "emit an N-point quantile table");
    density->add_option("--out", density_args.out, "output directory");

    SimulateArgs sim_args;
    sim_args.seed = default_seed();
    auto* simulate = app.add_subcommand("simulate", "run the matrix or particle dynamics");
    simulate->add_option("--n", sim_args.n, "matrix dimension / particle count")->required();
    simulate->add_option("--t", sim_args.t, "final time")->required()->check(CLI::NonNegativeNumber);
    simulate->add_option("--dt", sim_args.dt, "time step")->check(CLI::PositiveNumber);
    simulate->add_option("--beta", sim_args.beta, "inverse temperature (particle mode, >= 1)");
    simulate->add_option("--mode", sim_args.mode, "matrix | particles")
        ->check(CLI::IsMember({"matrix", "particles"}));
    simulate->add_option("--seed", sim_args.seed, "master seed (env UBMLAB_SEED overrides default)");
    simulate->add_option("--trials", sim_args.trials, "independent trials (derived seeds)");
    simulate->add_option("--snapshots", sim_args.snapshots, "extra snapshot times")->delimiter(',');
    simulate->add_option("--jobs", sim_args.jobs, "worker threads (default: logical cores)");
    simulate->add_flag("--no-tracking", sim_args.no_tracking,
                       "matrix mode: skip winding tracking, report principal angles");
    simulate->add_option("--out", sim_args.out, "output directory");

    CharArgs char_args;
    auto* chars_cmd = app.add_subcommand("characteristics", "characteristic path diagnostics");
    chars_cmd->add_option("--z-r", char_args.z_r, "endpoint radius (> 1)")->required();
    chars_cmd->add_option("--z-theta", char_args.z_theta, "endpoint angle")->required();
    chars_cmd->add_option("--t", char_args.t, "terminal time")->required()->check(CLI::PositiveNumber);
    chars_cmd->add_option("--m", char_args.m, "path samples");
    chars_cmd->add_flag("--cusp-check", char_args.cusp_check, "emit cusp angular decay report");
    chars_cmd->add_option("--out", char_args.out, "output directory");

    VerifyArgs verify_args;
    verify_args.seed = default_seed();
    auto* verify_cmd = app.add_subcommand("verify", "statistical verification suites");
    verify_cmd->add_option("suite", verify_args.suite, "local-law | edge | cusp | quantile | count | all")
        ->check(CLI::IsMember({"local-law", "edge", "cusp", "quantile", "count", "all"}));
    verify_cmd->add_option("--n", verify_args.n, "particle count");
    verify_cmd->add_option("--t", verify_args.t, "time")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--dt", verify_args.dt, "time step");
    verify_cmd->add_option("--trials", verify_args.trials, "trials");
    verify_cmd->add_option("--eps", verify_args.eps, "exponent epsilon");
    verify_cmd->add_option("--delta", verify_args.delta, "local-law exponent delta");
    verify_cmd->add_option("--frak-c", verify_args.frak_c, "local-law exponent c");
    verify_cmd->add_option("--required", verify_args.required, "required pass fraction");
    verify_cmd->add_option("--seed", verify_args.seed, "master seed");
    verify_cmd->add_option("--jobs", verify_args.jobs, "worker threads");
    verify_cmd->add_option("--mode", verify_args.mode, "simulation mode for inline ensembles")
        ->check(CLI::IsMember({"matrix", "particles"}));
    verify_cmd->add_option("--input", verify_args.inputs, "trajectory CSV files instead of inline sims");
    verify_cmd->add_option("--interval", verify_args.interval, "count suite arc a,b");
    verify_cmd->add_flag("--quick", verify_args.quick, "bounded smoke profile");
    verify_cmd->add_option("--out", verify_args.out, "output directory");

    std::string replay_manifest;
    std::string replay_out;
    auto* replay = app.add_subcommand("replay", "re-run a manifest and compare output hashes");
    replay->add_option("manifest", replay_manifest, "manifest.json path")->required();
    replay->add_option("--out", replay_out, "output directory for the replay");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (density->parsed()) return cmd_density(density_args);
        if (simulate->parsed()) return cmd_simulate(sim_args);
        if (chars_cmd->parsed()) return cmd_characteristics(char_args);
        if (verify_cmd->parsed()) return cmd_verify(verify_args);
        if (replay->parsed()) return cmd_replay(replay_manifest, replay_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const QuadratureError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
