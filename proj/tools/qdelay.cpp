// Command-line front end: synthesis, delay sweeps, detector-angle
// optimization, linear-plus-sinusoid fits and Monte Carlo validation,
// with deterministic CSV artifacts.
//
// Exit codes: 0 success, 1 usage/input error, 2 assumption-check failure,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdelay/delayperf.hpp"
#include "qdelay/linalg.hpp"
#include "qdelay/mcsim.hpp"
#include "qdelay/smith.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace qdelay;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAssumption = 2;
constexpr int kExitNumerical = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AssumptionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string preset;             // damped-cavity | harmonic | ""
    double gamma = 0.5, delta = 1.0;
    double mass = 1.0, omega = 1.0;
    std::string plant_file;         // PlantSpec JSON
    std::string model_file;         // SynthesisModel JSON (generic path)
    std::vector<double> phi;
    double h_min = 0.0, h_max = 10.0, h_step = 0.1;
    double delay = 0.0;
    double dt = 1e-3;
    int traj = 64;
    double burn = 20.0, avg = 80.0;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string method = "gramian";
    bool emit_plot = false;
    bool per_traj = false;
};

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "."
                                                      : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path.string());
    out << text;
}

PenaltyMethod parse_method(const std::string& name) {
    if (name == "gramian") return PenaltyMethod::Gramian;
    if (name == "quadrature") return PenaltyMethod::Quadrature;
    throw InputError("unknown method: " + name);
}

// Plant resolution: exactly one source among preset, plant file, model file.
int plant_source_count(const RunConfig& cfg) {
    return (cfg.preset.empty() ? 0 : 1) + (cfg.plant_file.empty() ? 0 : 1) +
           (cfg.model_file.empty() ? 0 : 1);
}

PlantSpec resolve_plant(const RunConfig& cfg) {
    if (cfg.preset == "damped-cavity")
        return preset_damped_cavity(cfg.gamma, cfg.delta);
    if (cfg.preset == "harmonic") return preset_harmonic(cfg.mass, cfg.omega);
    if (!cfg.preset.empty()) throw InputError("unknown preset: " + cfg.preset);
    if (!cfg.plant_file.empty())
        return plant_from_json(read_file(cfg.plant_file));
    throw InputError("no plant source given");
}

// Build a model either from physical plant data or the generic matrix path.
SynthesisModel resolve_model(const RunConfig& cfg, double phi, double h) {
    if (!cfg.model_file.empty()) {
        SynthesisModel m = model_from_json(read_file(cfg.model_file));
        m.h = h;
        return m;
    }
    return build_synthesis_model(resolve_plant(cfg), phi, h);
}

std::vector<double> phis_or_default(const RunConfig& cfg) {
    if (!cfg.phi.empty()) return cfg.phi;
    return {0.0};
}

void require_assumptions(const SynthesisModel& m) {
    AssumptionReport rep = check_assumptions(m);
    if (!rep.pass())
        throw AssumptionFailure("assumption check failed: " + rep.details);
}

json report_to_json(const AssumptionReport& rep) {
    return json{{"stabilizable", rep.stabilizable},
                {"detectable", rep.detectable},
                {"no_imaginary_axis_zeros_12", rep.no_imaginary_axis_zeros_12},
                {"no_imaginary_axis_zeros_21", rep.no_imaginary_axis_zeros_21},
                {"E1_nonsingular", rep.e1_nonsingular},
                {"E2_nonsingular", rep.e2_nonsingular},
                {"pass", rep.pass()}};
}

json mat_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

// ------------------------------------------------------------------ check

int cmd_check(const RunConfig& cfg) {
    double phi = phis_or_default(cfg).front();
    SynthesisModel m = resolve_model(cfg, phi, cfg.delay);
    AssumptionReport rep = check_assumptions(m);

    auto line = [](const char* name, bool v) {
        std::printf("  %-28s %s\n", name, v ? "pass" : "FAIL");
    };
    std::printf("assumption report (phi=%s, h=%s)\n", fmt12(m.phi).c_str(),
                fmt12(m.h).c_str());
    line("stabilizable", rep.stabilizable);
    line("detectable", rep.detectable);
    line("no imaginary-axis zeros (12)", rep.no_imaginary_axis_zeros_12);
    line("no imaginary-axis zeros (21)", rep.no_imaginary_axis_zeros_21);
    line("E1 nonsingular", rep.e1_nonsingular);
    line("E2 nonsingular", rep.e2_nonsingular);
    std::printf("%s\n", report_to_json(rep).dump(2).c_str());
    return rep.pass() ? kExitOk : kExitAssumption;
}

// ------------------------------------------------------------------ synth

int cmd_synth(const RunConfig& cfg) {
    for (double phi : phis_or_default(cfg)) {
        SynthesisModel m = resolve_model(cfg, phi, cfg.delay);
        require_assumptions(m);
        GainSet g = synthesize(m);
        json j;
        j["phi"] = m.phi;
        j["h"] = m.h;
        j["stability"] = to_string(classify_stability(m.a));
        j["X"] = mat_json(g.x);
        j["Y"] = mat_json(g.y);
        j["F"] = mat_json(g.f);
        j["L"] = mat_json(g.l);
        j["J0"] = g.j0;
        if (std::isfinite(g.j_unc)) j["J_unc"] = g.j_unc;
        std::printf("%s\n", j.dump(2).c_str());
        if (cfg.out != "-")
            write_file(fs::path(cfg.out) / ("synth_phi" + fmt12(phi) + ".json"),
                       j.dump(2) + "\n");
    }
    return kExitOk;
}

// ------------------------------------------------------------------ sweep

int cmd_sweep(const RunConfig& cfg) {
    if (!(cfg.h_step > 0.0) || cfg.h_max < cfg.h_min)
        throw InputError("empty or invalid h grid");
    std::vector<double> grid = make_grid(cfg.h_min, cfg.h_max, cfg.h_step);
    PenaltyMethod method = parse_method(cfg.method);

    std::vector<std::string> files;
    for (double phi : phis_or_default(cfg)) {
        SynthesisModel m = resolve_model(cfg, phi, 0.0);
        require_assumptions(m);
        GainSet g = synthesize(m);
        PerformanceCurve curve = sweep_delay(m, g, grid, method);

        bool have_unc = std::isfinite(g.j_unc);
        std::ostringstream csv;
        csv << (have_unc ? "h,J_opt,J_unc\n" : "h,J_opt\n");
        for (size_t i = 0; i < curve.h_grid.size(); ++i) {
            csv << fmt12(curve.h_grid[i]) << "," << fmt12(curve.j_values[i]);
            if (have_unc) csv << "," << fmt12(g.j_unc);
            csv << "\n";
        }
        std::string name = "sweep_phi" + fmt12(phi) + ".csv";
        write_file(fs::path(cfg.out) / name, csv.str());
        files.push_back(name);
        std::printf("wrote %s (%zu points)\n", name.c_str(),
                    curve.h_grid.size());
    }

    if (cfg.emit_plot) {
        std::ostringstream gp;
        gp << "set datafile separator ','\n"
           << "set xlabel 'h'\nset ylabel 'J'\nset key left top\nplot \\\n";
        for (size_t i = 0; i < files.size(); ++i)
            gp << "  '" << files[i] << "' using 1:2 with lines title '"
               << files[i] << (i + 1 < files.size() ? "', \\" : "'") << "\n";
        write_file(fs::path(cfg.out) / "plot_sweep.gp", gp.str());
        std::printf("wrote plot_sweep.gp\n");
    }
    return kExitOk;
}

// ----------------------------------------------------------- optimize-phi

int cmd_optimize_phi(const RunConfig& cfg) {
    if (!cfg.model_file.empty())
        throw InputError("optimize-phi needs a physical plant, not a model");
    PlantSpec plant = resolve_plant(cfg);
    {
        // pre-check at a representative angle before the scan
        SynthesisModel probe = build_synthesis_model(plant, 0.1, 0.0);
        require_assumptions(probe);
    }
    std::vector<double> grid = make_grid(cfg.h_min, cfg.h_max, cfg.h_step);
    std::ostringstream csv;
    csv << "h,phi_opt,J_opt\n";
    for (double h : grid) {
        PhiOptimum opt = optimize_phi(plant, default_c1(), default_d12(), h);
        csv << fmt12(h) << "," << fmt12(opt.phi) << "," << fmt12(opt.j)
            << "\n";
    }
    write_file(fs::path(cfg.out) / "optimize_phi.csv", csv.str());
    std::printf("wrote optimize_phi.csv (%zu rows)\n", grid.size());
    return kExitOk;
}

// -------------------------------------------------------------------- fit

int cmd_fit(const RunConfig& cfg) {
    PenaltyMethod method = parse_method(cfg.method);
    std::vector<double> grid = make_grid(cfg.h_min, cfg.h_max, cfg.h_step);
    for (double phi : phis_or_default(cfg)) {
        SynthesisModel m = resolve_model(cfg, phi, 0.0);
        require_assumptions(m);
        double freq = ripple_frequency(m.a);  // throws unless marginal
        GainSet g = synthesize(m);
        PerformanceCurve curve = sweep_delay(m, g, grid, method);
        FitResult fit = fit_linear_sinusoid(curve, freq);
        json j;
        j["phi"] = phi;
        j["frequency"] = freq;
        j["offset"] = fit.offset;
        j["slope_A"] = fit.slope_a;
        j["amplitude_B"] = fit.amplitude_b;
        j["phase_theta"] = fit.phase_theta;
        j["rms_residual"] = fit.rms_residual;
        std::printf("%s\n", j.dump(2).c_str());
        if (cfg.out != "-")
            write_file(fs::path(cfg.out) / ("fit_phi" + fmt12(phi) + ".json"),
                       j.dump(2) + "\n");
    }
    return kExitOk;
}

// --------------------------------------------------------------- simulate

int cmd_simulate(const RunConfig& cfg) {
    if (cfg.traj < 1) throw InputError("--traj must be at least 1");
    double phi = phis_or_default(cfg).front();
    SynthesisModel m = resolve_model(cfg, phi, cfg.delay);
    require_assumptions(m);
    GainSet g = synthesize(m);
    double j_formula = optimal_cost(m, g, cfg.delay);

    SimConfig sim;
    sim.dt = cfg.dt;
    sim.t_burn = cfg.burn;
    sim.t_avg = cfg.avg;
    sim.n_traj = cfg.traj;
    sim.seed = cfg.seed;
    SimEstimate est = estimate_cost(m, g, cfg.delay, sim);

    std::ostringstream csv;
    csv << "J_hat,stderr,J_formula,n_traj,dt\n"
        << fmt12(est.j_hat) << "," << fmt12(est.stderr_) << ","
        << fmt12(j_formula) << "," << est.n_effective << "," << fmt12(cfg.dt)
        << "\n";
    write_file(fs::path(cfg.out) / "simulate.csv", csv.str());

    if (cfg.per_traj) {
        std::ostringstream per;
        per << "traj,J\n";
        for (int i = 0; i < cfg.traj; ++i) {
            DelayController ctrl(m, g, cfg.delay, sim.dt);
            per << i << "," << fmt12(simulate_closed_loop(m, ctrl, sim, i))
                << "\n";
        }
        write_file(fs::path(cfg.out) / "simulate_trajectories.csv", per.str());
    }

    bool agree = std::abs(est.j_hat - j_formula) <=
                 std::max(3.0 * est.stderr_, 0.03 * j_formula);
    std::printf("J_hat=%s stderr=%s J_formula=%s diverged=%d agree=%s\n",
                fmt12(est.j_hat).c_str(), fmt12(est.stderr_).c_str(),
                fmt12(j_formula).c_str(), est.diverged,
                agree ? "yes" : "no");
    if (est.diverged > 0) return kExitNumerical;
    return kExitOk;
}

// ------------------------------------------------------------------ main

void apply_config_file(const std::string& path, CLI::App& app,
                       RunConfig& cfg) {
    json j = json::parse(read_file(path));
    auto set_if_unset = [&](const char* flag, auto member,
                            const char* key) {
        if (j.contains(key) && app.count(flag) == 0)
            cfg.*member = j.at(key).template get<
                std::remove_reference_t<decltype(cfg.*member)>>();
    };
    set_if_unset("--preset", &RunConfig::preset, "preset");
    set_if_unset("--gamma", &RunConfig::gamma, "gamma");
    set_if_unset("--delta", &RunConfig::delta, "delta");
    set_if_unset("--mass", &RunConfig::mass, "mass");
    set_if_unset("--omega", &RunConfig::omega, "omega");
    set_if_unset("--plant", &RunConfig::plant_file, "plant");
    set_if_unset("--model", &RunConfig::model_file, "model");
    set_if_unset("--h-min", &RunConfig::h_min, "h_min");
    set_if_unset("--h-max", &RunConfig::h_max, "h_max");
    set_if_unset("--h-step", &RunConfig::h_step, "h_step");
    set_if_unset("--delay", &RunConfig::delay, "delay");
    set_if_unset("--dt", &RunConfig::dt, "dt");
    set_if_unset("--traj", &RunConfig::traj, "traj");
    set_if_unset("--burn", &RunConfig::burn, "burn");
    set_if_unset("--avg", &RunConfig::avg, "avg");
    set_if_unset("--seed", &RunConfig::seed, "seed");
    set_if_unset("--out", &RunConfig::out, "out");
    set_if_unset("--method", &RunConfig::method, "method");
    if (j.contains("phi") && app.count("--phi") == 0)
        cfg.phi = j.at("phi").get<std::vector<double>>();
    if (j.contains("emit_plot") && app.count("--emit-plot") == 0)
        cfg.emit_plot = j.at("emit_plot").get<bool>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delayed-LQG analysis of linear quantum systems"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_file;

    app.add_option("--config", config_file, "JSON config file (flags win)");
    app.add_option("--preset", cfg.preset,
                   "plant preset: damped-cavity | harmonic");
    app.add_option("--gamma", cfg.gamma, "cavity damping rate");
    app.add_option("--delta", cfg.delta, "cavity coupling strength");
    app.add_option("--mass", cfg.mass, "oscillator mass");
    app.add_option("--omega", cfg.omega, "oscillator frequency");
    app.add_option("--plant", cfg.plant_file, "plant JSON file");
    app.add_option("--model", cfg.model_file,
                   "synthesis-model JSON file (generic matrix path)");
    app.add_option("--phi", cfg.phi, "detector angle(s), repeatable");
    app.add_option("--h-min", cfg.h_min, "delay grid start");
    app.add_option("--h-max", cfg.h_max, "delay grid end");
    app.add_option("--h-step", cfg.h_step, "delay grid step");
    app.add_option("--delay", cfg.delay, "single delay value h");
    app.add_option("--dt", cfg.dt, "simulation step");
    app.add_option("--traj", cfg.traj, "trajectory count");
    app.add_option("--burn", cfg.burn, "burn-in horizon");
    app.add_option("--avg", cfg.avg, "averaging horizon");
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--out", cfg.out, "output directory ('-' = stdout only)");
    app.add_option("--method", cfg.method,
                   "penalty method: gramian | quadrature");
    app.add_flag("--emit-plot", cfg.emit_plot, "emit a gnuplot script");
    app.add_flag("--per-traj", cfg.per_traj,
                 "also write per-trajectory averages (simulate)");

    auto* c_check = app.add_subcommand("check", "assumption report");
    auto* c_synth = app.add_subcommand("synth", "controller synthesis");
    auto* c_sweep = app.add_subcommand("sweep", "cost vs delay curves");
    auto* c_opt = app.add_subcommand("optimize-phi",
                                     "optimal detector angle per delay");
    auto* c_fit = app.add_subcommand("fit", "linear-plus-sinusoid fit");
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo validation");
    for (auto* sub : {c_check, c_synth, c_sweep, c_opt, c_fit, c_sim})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!config_file.empty()) apply_config_file(config_file, app, cfg);
        if (plant_source_count(cfg) != 1)
            throw InputError(
                "exactly one plant source required "
                "(--preset, --plant or --model)");

        if (c_check->parsed()) return cmd_check(cfg);
        if (c_synth->parsed()) return cmd_synth(cfg);
        if (c_sweep->parsed()) return cmd_sweep(cfg);
        if (c_opt->parsed()) return cmd_optimize_phi(cfg);
        if (c_fit->parsed()) return cmd_fit(cfg);
        if (c_sim->parsed()) return cmd_simulate(cfg);
        return kExitUsage;
    } catch (const AssumptionFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitAssumption;
    } catch (const SynthesisError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const DivergingCostError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const OptimizationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const ResonanceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
}
