// Command-line driver: builds the 60f spin-orbital model, optimizes and
// verifies coding pulse sequences, simulates protection cycles, and runs the
// projection kinetics. All outputs are deterministic for a fixed seed;
// wall-clock metadata goes to a sidecar file only.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "zenoprot/io.hpp"

namespace {

using namespace zenoprot;

constexpr int kExitOk = 0;
constexpr int kExitNonConvergence = 2;
constexpr int kExitConfigError = 3;
constexpr int kExitIoError = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
};

struct ModelBundle {
    LevelSpace space;
    Operator zeeman, raman_a, raman_b, h0;
    Operator ham_a, ham_b;
    ErrorModel errors;
};

RunConfig load(const CommonArgs& args) {
    RunConfig cfg = args.config_path.empty() ? RunConfig{} : load_config(args.config_path);
    if (args.seed_override) cfg.master_seed = *args.seed_override;
    return cfg;
}

ModelBundle build_model(const RunConfig& cfg) {
    ModelBundle m{build_space(HalfInt::whole(3), HalfInt::from_twice(1), 6),
                  {}, {}, {}, {}, {}, {}, {}};
    m.zeeman = zeeman_hamiltonian(m.space, cfg.fields.b_field);
    m.raman_a = raman_hamiltonian(m.space, cfg.fields, PulseType::A);
    m.raman_b = raman_hamiltonian(m.space, cfg.fields, PulseType::B);
    m.h0 = fine_structure_h0(m.space, cfg.fine_structure);
    m.ham_a = m.zeeman + m.raman_a;
    m.ham_b = m.zeeman + m.raman_b;
    m.errors = error_generators(m.space);
    m.errors.amplitudes = cfg.error_amplitudes;
    m.errors.correlation_time = cfg.correlation_time;
    m.errors.seed = cfg.master_seed;
    return m;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    std::filesystem::create_directories(args.out_dir);
    return (std::filesystem::path(args.out_dir) / name).string();
}

void write_sidecar(const CommonArgs& args, const RunConfig& cfg, const std::string& command) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    Json meta{{"command", command},
              {"config", args.config_path.empty() ? "<defaults>" : args.config_path},
              {"master_seed", cfg.master_seed},
              {"unix_time_ms", std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
    write_file(out_path(args, "run_meta.json"), meta.dump(2) + "\n");
}

int cmd_model(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    const ModelBundle m = build_model(cfg);
    Json ops = Json::array();
    ops.push_back(operator_to_json("zeeman", m.zeeman));
    ops.push_back(operator_to_json("raman_a", m.raman_a));
    ops.push_back(operator_to_json("raman_b", m.raman_b));
    ops.push_back(operator_to_json("h0", m.h0));
    for (std::size_t i = 0; i < m.errors.generators.size(); ++i)
        ops.push_back(operator_to_json("error_" + std::to_string(i + 1), m.errors.generators[i]));
    Json out{{"dimension", m.space.dimension},
             {"code_indices", {m.space.code_indices.first, m.space.code_indices.second}},
             {"ancilla_dim", m.space.ancilla_dim},
             {"ancilla_bound_satisfied", m.space.bound_satisfied},
             {"operators", ops}};
    write_file(out_path(args, "model.json"), out.dump(2) + "\n");
    write_sidecar(args, cfg, "model");
    std::cout << "model: wrote " << ops.size() << " operators (dim " << m.space.dimension << ")\n";
    return kExitOk;
}

int cmd_optimize(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    const ModelBundle m = build_model(cfg);
    OptimizerSettings opts = cfg.optimizer;
    opts.seed = cfg.master_seed;
    const OptimizeResult res =
        optimize_timings(m.ham_a, m.ham_b, m.errors, m.space, cfg.n_pulses, opts);

    Json out = timings_to_json(res.sequence);
    out["report"] = coding_report_to_json(res.report);
    out["converged"] = res.converged;
    out["restarts_used"] = res.restarts_used;
    out["iterations_total"] = res.iterations_total;
    write_file(out_path(args, "timings.json"), out.dump(2) + "\n");
    write_sidecar(args, cfg, "optimize");
    std::cout << "optimize: residual " << res.report.residual << " after " << res.restarts_used
              << " restart(s), " << res.iterations_total << " iterations\n";
    if (!res.converged) {
        std::cerr << "optimize: did not reach tolerance " << opts.tolerance << " (best residual "
                  << res.report.residual << ")\n";
        return kExitNonConvergence;
    }
    return kExitOk;
}

int cmd_verify(const CommonArgs& args, const std::string& timings_path) {
    const RunConfig cfg = load(args);
    const ModelBundle m = build_model(cfg);
    std::ifstream in(timings_path);
    if (!in) throw std::ios_base::failure("cannot open timings file: " + timings_path);
    Json root;
    try {
        root = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("timings: JSON parse error in " + timings_path + ": " + e.what());
    }
    const PulseSequence seq = timings_from_json(root);
    const Operator U = sequence_propagator(seq, m.ham_a, m.ham_b);
    const CodingReport report = coding_residual(U, m.errors, m.space);
    write_file(out_path(args, "coding_report.json"), coding_report_to_json(report).dump(2) + "\n");
    write_sidecar(args, cfg, "verify");
    std::cout << "verify: " << seq.size() << " pulses, residual " << report.residual
              << ", unitarity defect " << report.unitarity_defect << "\n";
    return kExitOk;
}

int cmd_simulate(const CommonArgs& args, const std::string& timings_path) {
    const RunConfig cfg = load(args);
    const ModelBundle m = build_model(cfg);

    PulseSequence seq;
    if (!timings_path.empty()) {
        std::ifstream in(timings_path);
        if (!in) throw std::ios_base::failure("cannot open timings file: " + timings_path);
        seq = timings_from_json(Json::parse(in));
    } else if (cfg.cycle.protected_mode || cfg.sweep) {
        OptimizerSettings opts = cfg.optimizer;
        opts.seed = cfg.master_seed;
        const OptimizeResult res =
            optimize_timings(m.ham_a, m.ham_b, m.errors, m.space, cfg.n_pulses, opts);
        if (!res.converged) {
            std::cerr << "simulate: coding optimization did not converge (residual "
                      << res.report.residual << "); supply --timings or relax tolerance\n";
            return kExitNonConvergence;
        }
        seq = res.sequence;
    }

    const Eigen::Vector2cd qubit(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    CycleConfig cycle = cfg.cycle;
    cycle.fine_structure = cfg.fine_structure;
    cycle.seed = cfg.master_seed;
    const FidelityTrace trace = run_cycles(qubit, seq, m.ham_a, m.ham_b, m.errors, m.space, cycle);
    write_file(out_path(args, "trace.csv"), trace_to_csv(trace));
    std::cout << "simulate: " << trace.cycles.size() << " cycle(s), final fidelity "
              << trace.cycles.back().fidelity << "\n";

    if (cfg.sweep) {
        const auto points = zeno_interval_sweep(qubit, seq, m.ham_a, m.ham_b, m.errors, m.space,
                                                cycle, cfg.sweep->intervals, cfg.sweep->trajectories);
        Json out = sweep_to_json(points);
        try {
            const ScalingFit fit = scaling_fit(points);
            out["fit"] = Json{{"slope", fit.slope},
                              {"intercept", fit.intercept},
                              {"rms_log_residual", fit.rms_log_residual},
                              {"n_points", fit.n_points}};
        } catch (const std::domain_error& e) {
            out["fit_refused"] = e.what();
        }
        write_file(out_path(args, "sweep.json"), out.dump(2) + "\n");
        std::cout << "simulate: sweep over " << points.size() << " interval(s) written\n";
    }
    write_sidecar(args, cfg, "simulate");
    return kExitOk;
}

int cmd_project(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    const RateRatio ratio = cg_rate_ratio();
    const double gamma2 = three_photon_rate(cfg.kinetics.params);
    const double gamma1 = ratio.value * gamma2;
    const double eta = transfer_efficiency(gamma1, gamma2);
    const DominanceReport dom =
        rate_dominance_check(cfg.kinetics.params, cfg.kinetics.dominance_threshold);

    write_file(out_path(args, "kinetics.csv"),
               kinetics_to_csv(gamma1, gamma2, cfg.kinetics.initial, cfg.kinetics.duration,
                               cfg.kinetics.samples));
    std::ostringstream ratio_str;
    ratio_str << ratio.ratio;
    Json out{{"rate_ratio_exact", ratio_str.str()},
             {"rate_ratio", ratio.value},
             {"gamma_1", gamma1},
             {"gamma_2", gamma2},
             {"eta", eta},
             {"one_minus_eta", 1.0 - eta},
             {"dominance",
              {{"pi_photon_margin", dom.pi_photon_margin},
               {"lifetime_60f_margin", dom.lifetime_60f_margin},
               {"decay_5d_margin", dom.decay_5d_margin},
               {"decay_5p_margin", dom.decay_5p_margin},
               {"threshold", dom.threshold},
               {"all_pass", dom.all_pass}}}};
    write_file(out_path(args, "eta.json"), out.dump(2) + "\n");
    write_sidecar(args, cfg, "project");
    std::cout << "project: rate ratio " << ratio_str.str() << ", eta " << eta << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zeno-style coherence protection of a spin qubit in a Rydberg 60f manifold"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string timings_path;
    for (auto* sub : {app.add_subcommand("model", "dump the control and error operators"),
                      app.add_subcommand("optimize", "optimize the coding pulse timings"),
                      app.add_subcommand("verify", "check the coding conditions for given timings"),
                      app.add_subcommand("simulate", "run protection cycles and interval sweeps"),
                      app.add_subcommand("project", "three-photon projection kinetics and eta")}) {
        sub->add_option("--config", args.config_path, "JSON configuration file");
        sub->add_option("--seed", args.seed_override, "override the master seed");
        sub->add_option("--out", args.out_dir, "output directory");
    }
    app.get_subcommand("verify")->add_option("--timings", timings_path, "timings JSON file")
        ->required();
    app.get_subcommand("simulate")
        ->add_option("--timings", timings_path, "coding timings JSON file (optimizes when absent)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("model")) return cmd_model(args);
        if (app.got_subcommand("optimize")) return cmd_optimize(args);
        if (app.got_subcommand("verify")) return cmd_verify(args, timings_path);
        if (app.got_subcommand("simulate")) return cmd_simulate(args, timings_path);
        if (app.got_subcommand("project")) return cmd_project(args);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}
