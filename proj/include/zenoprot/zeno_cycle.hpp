#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "zenoprot/control.hpp"
#include "zenoprot/system_model.hpp"

namespace zenoprot {

/// One protection-cycle measurement: recovered-qubit fidelity, projection
/// success probability of this cycle, and the running product of successes.
struct CycleRecord {
    int cycle = 0;
    double fidelity = 0.0;
    double survival_prob = 1.0;
    double cumulative_success = 1.0;
};

struct FidelityTrace {
    std::vector<CycleRecord> cycles;
};

struct CycleConfig {
    double zeno_interval = 10.0;  // ns, free-evolution time per cycle
    int n_cycles = 1;
    double eta = 1.0;  // coherence-transfer efficiency of projection/repump
    FineStructure fine_structure;
    std::uint64_t seed = 0;
    bool protected_mode = true;
};

/// Ideal pumping isometry: alpha|nu_1> + beta|nu_2> -> alpha|gamma_1> + beta|gamma_2>.
inline Vector pump(const Eigen::Vector2cd& qubit, const LevelSpace& space) {
    if (std::abs(qubit.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("pump: input state must be normalized");
    return space.code_isometry() * qubit;
}

/// Pumping at the density-matrix level, with the code coherence damped by
/// eta to model the Clebsch-Gordan mismatch of the transfer.
inline Matrix pump_density(const Eigen::Matrix2cd& rho_qubit, const LevelSpace& space,
                           double eta = 1.0) {
    Eigen::Matrix2cd damped = rho_qubit;
    damped(0, 1) *= eta;
    damped(1, 0) *= eta;
    const Matrix G = space.code_isometry();
    return G * damped * G.adjoint();
}

/// Unitary accumulated over one free-evolution interval under
/// H(t) = H0 + sum_m f_m(t) E_m, with each f_m piecewise constant over
/// correlation_time subintervals and drawn i.i.d. uniform in
/// [-amplitude_m, amplitude_m] from the supplied stream.
inline Matrix error_interval_unitary(const ErrorModel& errors, const Matrix& h0, double dt,
                                     std::mt19937_64& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("error_interval_unitary: dt must be positive");
    const Eigen::Index dim = h0.rows();
    Matrix U = Matrix::Identity(dim, dim);
    double remaining = dt;
    const double step = errors.correlation_time > 0.0 ? errors.correlation_time : dt;
    while (remaining > 1e-15) {
        const double sub = std::min(step, remaining);
        Matrix H = h0;
        for (std::size_t m = 0; m < errors.generators.size(); ++m) {
            const double amp = errors.amplitudes[m];
            std::uniform_real_distribution<double> coupling(-amp, amp);
            const double f = amp > 0.0 ? coupling(rng) : 0.0;
            if (f != 0.0) H += f * errors.generators[m].mat;
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(H);
        const Vector phases =
            (Complex(0, -sub) * es.eigenvalues().cast<Complex>()).array().exp().matrix();
        U = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * U;
        remaining -= sub;
    }
    return U;
}

inline Vector error_evolution(const Vector& state, const ErrorModel& errors, const Matrix& h0,
                              double dt, std::mt19937_64& rng) {
    return error_interval_unitary(errors, h0, dt, rng) * state;
}

/// Sampled projection onto the code subspace: success with probability
/// ||P state||^2; on success the projected state is renormalized and the
/// logical coherence is damped by eta.
struct ProjectionOutcome {
    bool success = false;
    double success_prob = 0.0;
    Vector projected_state;           // renormalized, only valid on success
    Eigen::Matrix2cd logical_density; // eta-damped code block, valid on success
};

inline ProjectionOutcome project_code(const Vector& state, const LevelSpace& space, double eta,
                                      std::mt19937_64& rng) {
    if (std::abs(state.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("project_code: state must be normalized");
    ProjectionOutcome out;
    const Matrix G = space.code_isometry();
    const Eigen::Vector2cd amps = G.adjoint() * state;
    out.success_prob = amps.squaredNorm();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    out.success = u(rng) < out.success_prob;
    if (out.success && out.success_prob > 0.0) {
        out.projected_state = (G * amps) / amps.norm();
        out.logical_density = amps * amps.adjoint() / out.success_prob;
        out.logical_density(0, 1) *= eta;
        out.logical_density(1, 0) *= eta;
    }
    return out;
}

/// Full protection run: pump once, then per cycle code -> free error
/// evolution -> decode -> project -> repump, tracking the conditional
/// (post-selected) state as a density matrix. Unprotected mode skips
/// code/decode/projection for the baseline. Deterministic given cfg.seed.
inline FidelityTrace run_cycles(const Eigen::Vector2cd& initial_qubit, const PulseSequence& seq,
                                const Operator& Ha, const Operator& Hb, const ErrorModel& errors,
                                const LevelSpace& space, const CycleConfig& cfg) {
    if (!(cfg.zeno_interval > 0.0)) throw std::invalid_argument("run_cycles: zeno_interval <= 0");
    if (!(cfg.eta > 0.0 && cfg.eta <= 1.0)) throw std::invalid_argument("run_cycles: eta out of (0,1]");

    const Matrix h0 = fine_structure_h0(space, cfg.fine_structure).mat;
    const Matrix G = space.code_isometry();

    Matrix u_code, u_decode;
    if (cfg.protected_mode) {
        if (seq.size() == 0) throw std::invalid_argument("run_cycles: no coding sequence supplied");
        u_code = sequence_propagator(seq, Ha, Hb).mat;
        u_decode = decoded_propagator(decode_sequence(seq), Ha, Hb).mat;
    }

    Matrix rho = pump_density(initial_qubit * initial_qubit.adjoint(), space);
    const Eigen::Vector2cd ideal = initial_qubit;

    FidelityTrace trace;
    double cumulative = 1.0;
    for (int cycle = 0; cycle < cfg.n_cycles; ++cycle) {
        std::mt19937_64 rng(detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(cycle)));
        CycleRecord rec;
        rec.cycle = cycle + 1;

        if (cfg.protected_mode) rho = u_code * rho * u_code.adjoint();
        const Matrix u_err = error_interval_unitary(errors, h0, cfg.zeno_interval, rng);
        rho = u_err * rho * u_err.adjoint();
        if (cfg.protected_mode) {
            rho = u_decode * rho * u_decode.adjoint();
            Eigen::Matrix2cd logical = G.adjoint() * rho * G;
            const double p = std::real(logical.trace());
            rec.survival_prob = p;
            cumulative *= p;
            if (p <= 0.0) {
                rec.fidelity = 0.0;
                rec.cumulative_success = cumulative;
                trace.cycles.push_back(rec);
                break;
            }
            logical /= p;
            // projection and repump each damp the code coherence by eta
            logical(0, 1) *= cfg.eta * cfg.eta;
            logical(1, 0) *= cfg.eta * cfg.eta;
            rho = G * logical * G.adjoint();
            rec.fidelity = std::real((ideal.adjoint() * logical * ideal)(0, 0));
        } else {
            const double norm = std::real(rho.trace());
            const Eigen::Matrix2cd logical = G.adjoint() * rho * G / norm;
            rec.survival_prob = 1.0;
            rec.fidelity = std::real((ideal.adjoint() * logical * ideal)(0, 0));
        }
        rec.cumulative_success = cumulative;
        trace.cycles.push_back(rec);
    }
    return trace;
}

/// One sweep point: mean conditional infidelity after the first cycle over
/// n_trajectories independent noise realizations.
struct SweepPoint {
    double zeno_interval = 0.0;
    double mean_infidelity = 0.0;
    double mean_survival = 0.0;
};

inline std::vector<SweepPoint> zeno_interval_sweep(
    const Eigen::Vector2cd& initial_qubit, const PulseSequence& seq, const Operator& Ha,
    const Operator& Hb, const ErrorModel& errors, const LevelSpace& space, CycleConfig cfg,
    const std::vector<double>& intervals, int n_trajectories) {
    std::vector<SweepPoint> points;
    cfg.n_cycles = 1;
    const std::uint64_t master = cfg.seed;
    for (double dt : intervals) {
        SweepPoint pt;
        pt.zeno_interval = dt;
        for (int traj = 0; traj < n_trajectories; ++traj) {
            cfg.zeno_interval = dt;
            cfg.seed = detail::mix_seed(master, 1000003ull * static_cast<std::uint64_t>(traj) + 17);
            const auto trace =
                run_cycles(initial_qubit, seq, Ha, Hb, errors, space, cfg);
            pt.mean_infidelity += 1.0 - trace.cycles.front().fidelity;
            pt.mean_survival += trace.cycles.front().survival_prob;
        }
        pt.mean_infidelity /= n_trajectories;
        pt.mean_survival /= n_trajectories;
        points.push_back(pt);
    }
    return points;
}

/// Least-squares slope of log(1-F) against log(zeno_interval).
/// Refuses fits outside the perturbative window or with too little leverage.
struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_log_residual = 0.0;
    int n_points = 0;
};

inline ScalingFit scaling_fit(const std::vector<SweepPoint>& points) {
    if (points.size() < 5)
        throw std::domain_error("scaling_fit: need at least 5 interval values");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& p : points) {
        if (p.mean_infidelity < 1e-14)
            throw std::domain_error("scaling_fit: infidelity below numerical floor 1e-14");
        if (p.mean_infidelity > 0.1)
            throw std::domain_error("scaling_fit: infidelity above perturbative bound 0.1");
        lo = std::min(lo, p.zeno_interval);
        hi = std::max(hi, p.zeno_interval);
    }
    if (hi / lo < 10.0 - 1e-9)
        throw std::domain_error("scaling_fit: intervals must span at least one decade");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(points.size());
    for (const auto& p : points) {
        const double x = std::log(p.zeno_interval), y = std::log(p.mean_infidelity);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    ScalingFit fit;
    fit.n_points = n;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0;
    for (const auto& p : points) {
        const double res = std::log(p.mean_infidelity) -
                           (fit.intercept + fit.slope * std::log(p.zeno_interval));
        ss += res * res;
    }
    fit.rms_log_residual = std::sqrt(ss / n);
    return fit;
}

}  // namespace zenoprot
