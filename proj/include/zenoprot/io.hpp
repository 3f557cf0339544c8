#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zenoprot/control.hpp"
#include "zenoprot/kinetics.hpp"
#include "zenoprot/system_model.hpp"
#include "zenoprot/zeno_cycle.hpp"

namespace zenoprot {

using Json = nlohmann::json;

/// Thrown on schema violations; the CLI maps it to the config-error exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form of a double; keeps emitted CSV/JSON
/// byte-stable across runs.
inline std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("fmt_double: conversion failed");
    return std::string(buf, ptr);
}

struct SweepConfig {
    std::vector<double> intervals;  // ns
    int trajectories = 20;
};

struct KineticsRunConfig {
    KineticsParams params;
    KineticsState initial{0.5, 0.5, 0.0, 0.0, {0.5, 0.0}, {0.0, 0.0}};
    double duration = 10.0;  // in 1/rate units of the arbitrary-unit system
    int samples = 200;
    double dominance_threshold = 10.0;
};

/// Full experiment configuration: field values, error process, protection
/// cycle, optimizer settings and projection kinetics, all unit-annotated in
/// the JSON file and converted once at ingestion.
struct RunConfig {
    std::uint64_t master_seed = 1;
    FieldConfig fields;
    std::vector<double> error_amplitudes = std::vector<double>(6, 0.005);  // rad/ns
    double correlation_time = 1e6;                                         // ns
    FineStructure fine_structure;
    OptimizerSettings optimizer;
    int n_pulses = 34;
    CycleConfig cycle;
    std::optional<SweepConfig> sweep;
    KineticsRunConfig kinetics;
};

namespace detail {

inline void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
}

inline std::string get_string(const Json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("config: missing key '" + std::string(key) + "' in " + where);
    if (!obj.at(key).is_string())
        throw ConfigError("config: key '" + std::string(key) + "' in " + where +
                          " must be a unit-annotated string");
    return obj.at(key).get<std::string>();
}

template <typename Parse>
double quantity_or(const Json& obj, const char* key, const std::string& where, Parse parse,
                   double fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return parse(get_string(obj, key, where));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config: " + where + "." + key + ": " + e.what());
    }
}

inline LaserPair parse_laser(const Json& obj, const std::string& where, const LaserPair& defaults) {
    reject_unknown_keys(obj, {"e_x", "e_y", "phase_y", "e_x_prime", "e_y_prime", "phase_y_prime"},
                        where);
    LaserPair lp = defaults;
    lp.e_x = quantity_or(obj, "e_x", where, parse_field_V_per_m, lp.e_x);
    lp.e_y = quantity_or(obj, "e_y", where, parse_field_V_per_m, lp.e_y);
    lp.phase_y = quantity_or(obj, "phase_y", where, parse_angle_rad, lp.phase_y);
    lp.e_x_prime = quantity_or(obj, "e_x_prime", where, parse_field_V_per_m, lp.e_x_prime);
    lp.e_y_prime = quantity_or(obj, "e_y_prime", where, parse_field_V_per_m, lp.e_y_prime);
    lp.phase_y_prime = quantity_or(obj, "phase_y_prime", where, parse_angle_rad, lp.phase_y_prime);
    return lp;
}

}  // namespace detail

inline RunConfig parse_config(const Json& root) {
    using detail::quantity_or;
    using detail::reject_unknown_keys;
    RunConfig cfg;
    reject_unknown_keys(root,
                        {"master_seed", "fields", "errors", "fine_structure", "optimizer",
                         "cycle", "sweep", "kinetics"},
                        "top level");

    if (root.contains("master_seed")) {
        if (!root["master_seed"].is_number_unsigned())
            throw ConfigError("config: master_seed must be a non-negative integer");
        cfg.master_seed = root["master_seed"].get<std::uint64_t>();
    }

    if (root.contains("fields")) {
        const Json& f = root["fields"];
        reject_unknown_keys(f,
                            {"b_field", "laser_a", "laser_b", "omega_r", "omega_r_prime", "delta",
                             "delta_prime", "raman_scale", "raman_scale_prime"},
                            "fields");
        if (f.contains("b_field")) {
            const Json& b = f["b_field"];
            if (!b.is_array() || b.size() != 3)
                throw ConfigError("config: fields.b_field must be an array of 3 quantities");
            for (int k = 0; k < 3; ++k) {
                if (!b[k].is_string())
                    throw ConfigError("config: fields.b_field entries must be unit-annotated strings");
                try {
                    cfg.fields.b_field[k] = parse_field_tesla(b[k].get<std::string>());
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(std::string("config: fields.b_field: ") + e.what());
                }
            }
        }
        if (f.contains("laser_a"))
            cfg.fields.laser_a = detail::parse_laser(f["laser_a"], "fields.laser_a", cfg.fields.laser_a);
        if (f.contains("laser_b"))
            cfg.fields.laser_b = detail::parse_laser(f["laser_b"], "fields.laser_b", cfg.fields.laser_b);
        cfg.fields.omega_r = quantity_or(f, "omega_r", "fields", parse_energy_rad_per_ns, cfg.fields.omega_r);
        cfg.fields.omega_r_prime =
            quantity_or(f, "omega_r_prime", "fields", parse_energy_rad_per_ns, cfg.fields.omega_r_prime);
        cfg.fields.delta = quantity_or(f, "delta", "fields", parse_energy_rad_per_ns, cfg.fields.delta);
        cfg.fields.delta_prime =
            quantity_or(f, "delta_prime", "fields", parse_energy_rad_per_ns, cfg.fields.delta_prime);
        cfg.fields.raman_scale =
            quantity_or(f, "raman_scale", "fields", parse_dimensionless, cfg.fields.raman_scale);
        cfg.fields.raman_scale_prime = quantity_or(f, "raman_scale_prime", "fields",
                                                   parse_dimensionless, cfg.fields.raman_scale_prime);
        if (cfg.fields.delta == 0.0 || cfg.fields.delta_prime == 0.0)
            throw ConfigError("config: fields.delta and fields.delta_prime must be nonzero");
    }

    if (root.contains("errors")) {
        const Json& e = root["errors"];
        reject_unknown_keys(e, {"amplitudes", "correlation_time"}, "errors");
        if (e.contains("amplitudes")) {
            const Json& a = e["amplitudes"];
            if (!a.is_array() || a.size() != 6)
                throw ConfigError("config: errors.amplitudes must list 6 quantities");
            cfg.error_amplitudes.clear();
            for (const auto& item : a) {
                if (!item.is_string())
                    throw ConfigError("config: errors.amplitudes entries must be unit-annotated strings");
                try {
                    cfg.error_amplitudes.push_back(parse_rate_rad_per_ns(item.get<std::string>()));
                } catch (const std::invalid_argument& ex) {
                    throw ConfigError(std::string("config: errors.amplitudes: ") + ex.what());
                }
            }
        }
        cfg.correlation_time =
            quantity_or(e, "correlation_time", "errors", parse_time_ns, cfg.correlation_time);
        if (!(cfg.correlation_time > 0.0))
            throw ConfigError("config: errors.correlation_time must be positive");
    }

    if (root.contains("fine_structure")) {
        const Json& fs = root["fine_structure"];
        reject_unknown_keys(fs, {"splitting"}, "fine_structure");
        cfg.fine_structure.splitting_cm =
            quantity_or(fs, "splitting", "fine_structure", parse_wavenumber_cm, 0.0);
        if (cfg.fine_structure.splitting_cm < 0.0)
            throw ConfigError("config: fine_structure.splitting must be >= 0");
    }

    if (root.contains("optimizer")) {
        const Json& o = root["optimizer"];
        reject_unknown_keys(
            o, {"n_pulses", "tolerance", "max_restarts", "max_iterations", "min_duration", "max_duration"},
            "optimizer");
        if (o.contains("n_pulses")) cfg.n_pulses = o["n_pulses"].get<int>();
        if (o.contains("tolerance")) cfg.optimizer.tolerance = o["tolerance"].get<double>();
        if (o.contains("max_restarts")) cfg.optimizer.max_restarts = o["max_restarts"].get<int>();
        if (o.contains("max_iterations")) cfg.optimizer.max_iterations = o["max_iterations"].get<int>();
        cfg.optimizer.min_duration =
            quantity_or(o, "min_duration", "optimizer", parse_time_ns, cfg.optimizer.min_duration);
        cfg.optimizer.max_duration =
            quantity_or(o, "max_duration", "optimizer", parse_time_ns, cfg.optimizer.max_duration);
        if (cfg.n_pulses < 1) throw ConfigError("config: optimizer.n_pulses must be >= 1");
        if (!(cfg.optimizer.min_duration > 0.0) ||
            cfg.optimizer.max_duration <= cfg.optimizer.min_duration)
            throw ConfigError("config: optimizer duration bounds must satisfy 0 < min < max");
    }

    if (root.contains("cycle")) {
        const Json& c = root["cycle"];
        reject_unknown_keys(c, {"zeno_interval", "n_cycles", "eta", "protected"}, "cycle");
        cfg.cycle.zeno_interval =
            quantity_or(c, "zeno_interval", "cycle", parse_time_ns, cfg.cycle.zeno_interval);
        if (c.contains("n_cycles")) cfg.cycle.n_cycles = c["n_cycles"].get<int>();
        if (c.contains("eta")) cfg.cycle.eta = c["eta"].get<double>();
        if (c.contains("protected")) cfg.cycle.protected_mode = c["protected"].get<bool>();
        if (!(cfg.cycle.zeno_interval > 0.0)) throw ConfigError("config: cycle.zeno_interval must be > 0");
        if (!(cfg.cycle.eta > 0.0 && cfg.cycle.eta <= 1.0))
            throw ConfigError("config: cycle.eta must be in (0, 1]");
        if (cfg.cycle.n_cycles < 1) throw ConfigError("config: cycle.n_cycles must be >= 1");
    }

    if (root.contains("sweep")) {
        const Json& s = root["sweep"];
        reject_unknown_keys(s, {"intervals", "trajectories"}, "sweep");
        SweepConfig sweep;
        if (!s.contains("intervals") || !s["intervals"].is_array())
            throw ConfigError("config: sweep.intervals must be an array of quantities");
        for (const auto& item : s["intervals"]) {
            if (!item.is_string())
                throw ConfigError("config: sweep.intervals entries must be unit-annotated strings");
            sweep.intervals.push_back(parse_time_ns(item.get<std::string>()));
        }
        if (s.contains("trajectories")) sweep.trajectories = s["trajectories"].get<int>();
        if (sweep.trajectories < 1) throw ConfigError("config: sweep.trajectories must be >= 1");
        cfg.sweep = sweep;
    }

    if (root.contains("kinetics")) {
        const Json& k = root["kinetics"];
        reject_unknown_keys(k,
                            {"d_gamma_lambda", "d_lambda_mu", "d_mu_nu", "e1", "e2", "delta1",
                             "delta2", "cavity_enhancement", "gamma_5p", "tau_60f", "tau_5d",
                             "tau_5p", "duration", "samples", "dominance_threshold"},
                            "kinetics");
        auto& p = cfg.kinetics.params;
        auto num = [&](const char* key, double fallback) {
            if (!k.contains(key)) return fallback;
            if (!k.at(key).is_number())
                throw ConfigError("config: kinetics." + std::string(key) + " must be a number");
            return k.at(key).get<double>();
        };
        p.d_gamma_lambda = num("d_gamma_lambda", p.d_gamma_lambda);
        p.d_lambda_mu = num("d_lambda_mu", p.d_lambda_mu);
        p.d_mu_nu = num("d_mu_nu", p.d_mu_nu);
        p.e1 = num("e1", p.e1);
        p.e2 = num("e2", p.e2);
        p.delta1 = num("delta1", p.delta1);
        p.delta2 = num("delta2", p.delta2);
        p.cavity_enhancement = num("cavity_enhancement", p.cavity_enhancement);
        p.gamma_5p = num("gamma_5p", p.gamma_5p);
        p.tau_60f = quantity_or(k, "tau_60f", "kinetics", parse_time_ns, p.tau_60f);
        p.tau_5d = quantity_or(k, "tau_5d", "kinetics", parse_time_ns, p.tau_5d);
        p.tau_5p = quantity_or(k, "tau_5p", "kinetics", parse_time_ns, p.tau_5p);
        cfg.kinetics.duration = num("duration", cfg.kinetics.duration);
        if (k.contains("samples")) cfg.kinetics.samples = k["samples"].get<int>();
        cfg.kinetics.dominance_threshold = num("dominance_threshold", cfg.kinetics.dominance_threshold);
        try {
            p.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: kinetics: ") + e.what());
        }
        if (cfg.kinetics.samples < 2) throw ConfigError("config: kinetics.samples must be >= 2");
    }

    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file: " + path);
    Json root;
    try {
        root = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config: JSON parse error in " + path + ": " + e.what());
    }
    return parse_config(root);
}

/// Complex matrix as nested arrays of [re, im] pairs.
inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(row);
    }
    return rows;
}

inline Matrix matrix_from_json(const Json& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = Complex(rows[i][j][0].get<double>(), rows[i][j][1].get<double>());
    return m;
}

inline Json operator_to_json(const std::string& name, const Operator& op) {
    return Json{{"name", name},
                {"basis", op.basis},
                {"dimension", op.dim()},
                {"hermitian", op.is_hermitian(1e-12)},
                {"hermiticity_defect", op.hermiticity_defect()},
                {"spectral_norm", op.spectral_norm()},
                {"matrix", matrix_to_json(op.mat)}};
}

inline Json timings_to_json(const PulseSequence& seq) {
    Json t = Json::array();
    for (const auto& p : seq.pulses) t.push_back(p.duration);
    return Json{{"timings_ns", t}};
}

/// Timing vectors accepted either as a bare JSON array or {"timings_ns": [...]}.
inline PulseSequence timings_from_json(const Json& root) {
    const Json* arr = nullptr;
    if (root.is_array())
        arr = &root;
    else if (root.is_object() && root.contains("timings_ns"))
        arr = &root.at("timings_ns");
    else
        throw ConfigError("timings: expected a JSON array or an object with 'timings_ns'");
    if (arr->empty()) throw ConfigError("timings: empty timing list rejected");
    std::vector<double> t;
    for (const auto& item : *arr) {
        if (!item.is_number()) throw ConfigError("timings: entries must be numbers (ns)");
        t.push_back(item.get<double>());
    }
    try {
        return PulseSequence::alternating(t);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("timings: ") + e.what());
    }
}

inline Json coding_report_to_json(const CodingReport& report, bool include_matrix = false) {
    Json norms = Json::array();
    for (double n : report.condition_matrix_norms) norms.push_back(n);
    Json out{{"residual", report.residual},
             {"condition_matrix_norms", norms},
             {"unitarity_defect", report.unitarity_defect}};
    if (include_matrix) out["coding_matrix"] = matrix_to_json(report.coding_matrix.mat);
    return out;
}

inline std::string trace_to_csv(const FidelityTrace& trace) {
    std::ostringstream out;
    out << "cycle,fidelity,survival_prob,cumulative_success\n";
    for (const auto& rec : trace.cycles)
        out << rec.cycle << ',' << fmt_double(rec.fidelity) << ',' << fmt_double(rec.survival_prob)
            << ',' << fmt_double(rec.cumulative_success) << '\n';
    return out.str();
}

inline Json sweep_to_json(const std::vector<SweepPoint>& points) {
    Json arr = Json::array();
    for (const auto& p : points)
        arr.push_back(Json{{"zeno_interval_ns", p.zeno_interval},
                           {"mean_infidelity", p.mean_infidelity},
                           {"mean_survival", p.mean_survival}});
    return Json{{"points", arr}};
}

inline std::string kinetics_to_csv(double g1, double g2, const KineticsState& rho0, double duration,
                                   int samples) {
    std::ostringstream out;
    out << "t,pop_g1,pop_g2,pop_n1,pop_n2,coh_g_re,coh_g_im,coh_n_re,coh_n_im\n";
    for (int i = 0; i < samples; ++i) {
        const double t = duration * i / (samples - 1);
        const KineticsState s = rate_ode_solve(g1, g2, rho0, t);
        out << fmt_double(t) << ',' << fmt_double(s.pop_g1) << ',' << fmt_double(s.pop_g2) << ','
            << fmt_double(s.pop_n1) << ',' << fmt_double(s.pop_n2) << ','
            << fmt_double(s.coh_g.real()) << ',' << fmt_double(s.coh_g.imag()) << ','
            << fmt_double(s.coh_n.real()) << ',' << fmt_double(s.coh_n.imag()) << '\n';
    }
    return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open output file: " + path);
    out << content;
    if (!out) throw std::ios_base::failure("write failed: " + path);
}

}  // namespace zenoprot
