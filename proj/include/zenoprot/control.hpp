#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "zenoprot/propagator.hpp"
#include "zenoprot/system_model.hpp"

namespace zenoprot {

struct Pulse {
    PulseType tag = PulseType::A;
    double duration = 0.0;  // ns
};

/// Ordered list of control pulses, strictly alternating between the two
/// Hamiltonian tags. The 60f coding problem uses 34 pulses starting with A.
struct PulseSequence {
    std::vector<Pulse> pulses;

    static PulseSequence alternating(const std::vector<double>& timings,
                                     PulseType first = PulseType::A) {
        PulseSequence seq;
        PulseType tag = first;
        for (double t : timings) {
            seq.pulses.push_back({tag, t});
            tag = (tag == PulseType::A) ? PulseType::B : PulseType::A;
        }
        seq.validate();
        return seq;
    }

    void validate() const {
        for (std::size_t i = 0; i < pulses.size(); ++i) {
            if (!(pulses[i].duration > 0.0))
                throw std::invalid_argument("PulseSequence: durations must be positive");
            if (i > 0 && pulses[i].tag == pulses[i - 1].tag)
                throw std::invalid_argument("PulseSequence: tags must alternate");
        }
    }

    std::vector<double> timings() const {
        std::vector<double> t;
        t.reserve(pulses.size());
        for (const auto& p : pulses) t.push_back(p.duration);
        return t;
    }

    std::size_t size() const { return pulses.size(); }
};

/// Reference 34-pulse coding timing set (ns) for the 60f configuration.
inline const std::vector<double>& reference_timings_34() {
    static const std::vector<double> t = {
        3.9763, 6.4748, 4.2274, 3.6259, 2.8717, 3.6281, 7.2263, 6.4260, 4.8070,
        5.0394, 6.5242, 4.8890, 4.2400, 7.3834, 4.8653, 5.4799, 4.5341, 4.3099,
        6.2959, 3.7346, 6.5293, 6.8586, 6.0749, 5.1213, 4.6806, 3.4985, 3.9909,
        4.6701, 4.5168, 6.4702, 4.7787, 5.3476, 3.4567, 3.8009};
    return t;
}

/// Ordered propagator product over a pulse sequence: the last pulse is the
/// leftmost factor, U = exp(-i H_tag_n tau_n) ... exp(-i H_tag_1 tau_1).
inline Operator sequence_propagator(const PulseSequence& seq, const HermitianExp& plant_a,
                                    const HermitianExp& plant_b) {
    if (plant_a.basis != plant_b.basis)
        throw std::invalid_argument("sequence_propagator: basis mismatch between Ha and Hb");
    seq.validate();
    const Eigen::Index dim = plant_a.vectors.rows();
    Matrix U = Matrix::Identity(dim, dim);
    for (const auto& p : seq.pulses)
        U = (p.tag == PulseType::A ? plant_a.exp_mat(p.duration) : plant_b.exp_mat(p.duration)) * U;
    return {U, plant_a.basis};
}

inline Operator sequence_propagator(const PulseSequence& seq, const Operator& Ha,
                                    const Operator& Hb) {
    Ha.require_same_basis(Hb);
    return sequence_propagator(seq, HermitianExp(Ha), HermitianExp(Hb));
}

/// Per-error diagnostics of the correction conditions: with P the projector
/// onto C, each decoded block G_m = P U^-1 E_m U P restricted to C must be a
/// multiple of the identity. residual = sum_m ||G_m - (tr G_m/2) I||_F^2.
struct CodingReport {
    double residual = 0.0;
    std::vector<double> condition_matrix_norms;  // ||G_m - (tr/2) I||_F per error
    double unitarity_defect = 0.0;
    Operator coding_matrix;
};

inline CodingReport coding_residual(const Operator& U, const ErrorModel& errors,
                                    const LevelSpace& space) {
    const Matrix G = space.code_isometry();
    const Matrix V = U.mat * G;
    CodingReport report;
    report.coding_matrix = U;
    report.unitarity_defect = U.unitarity_defect();
    for (const auto& E : errors.generators) {
        const Eigen::Matrix2cd block = V.adjoint() * E.mat * V;
        const Eigen::Matrix2cd dev =
            block - 0.5 * block.trace() * Eigen::Matrix2cd::Identity();
        const double norm = dev.norm();
        report.condition_matrix_norms.push_back(norm);
        report.residual += norm * norm;
    }
    return report;
}

namespace detail {

/// Forward/adjoint machinery for the coding objective: residual vector
/// (3 real components per error) and its Jacobian with respect to the pulse
/// timings. Shares the cached eigendecompositions of Ha and Hb.
class CodingObjective {
public:
    CodingObjective(const Operator& Ha, const Operator& Hb, const ErrorModel& errors,
                    const LevelSpace& space)
        : plant_a_(Ha), plant_b_(Hb), ham_a_(Ha.mat), ham_b_(Hb.mat),
          code_(space.code_isometry()) {
        Ha.require_same_basis(Hb);
        for (const auto& E : errors.generators) errors_.push_back(E.mat);
        dim_ = Ha.dim();
    }

    int n_residuals() const { return 3 * static_cast<int>(errors_.size()); }
    Eigen::Index dim() const { return dim_; }
    const HermitianExp& plant_a() const { return plant_a_; }
    const HermitianExp& plant_b() const { return plant_b_; }

    static PulseType tag_of(int k) { return k % 2 == 0 ? PulseType::A : PulseType::B; }

    /// Residual vector only (squared norm equals the coding residual).
    Eigen::VectorXd residual(const std::vector<double>& timings) const {
        Matrix V = code_;
        for (std::size_t k = 0; k < timings.size(); ++k) {
            const auto& plant = tag_of(static_cast<int>(k)) == PulseType::A ? plant_a_ : plant_b_;
            V = plant.exp_mat(timings[k]) * V;
        }
        return residual_from_code_image(V);
    }

    /// Residual vector and Jacobian d r_i / d tau_k.
    void residual_jacobian(const std::vector<double>& timings, Eigen::VectorXd& r,
                           Eigen::MatrixXd& jac) const {
        const int n = static_cast<int>(timings.size());
        std::vector<Matrix> factors(n);
        for (int k = 0; k < n; ++k) {
            const auto& plant = tag_of(k) == PulseType::A ? plant_a_ : plant_b_;
            factors[k] = plant.exp_mat(timings[k]);
        }
        // prefix images R_k = F_k ... F_1 Gamma and suffix products S_k = F_n ... F_k
        std::vector<Matrix> prefix(n + 1);
        prefix[0] = code_;
        for (int k = 0; k < n; ++k) prefix[k + 1] = factors[k] * prefix[k];
        std::vector<Matrix> suffix(n + 2);
        suffix[n + 1] = Matrix::Identity(dim_, dim_);
        for (int k = n; k >= 1; --k) suffix[k] = suffix[k + 1] * factors[k - 1];

        const Matrix& V = prefix[n];
        r = residual_from_code_image(V);

        const int m_count = static_cast<int>(errors_.size());
        std::vector<Matrix> error_images(m_count);  // E_m V
        for (int m = 0; m < m_count; ++m) error_images[m] = errors_[m] * V;

        jac.resize(n_residuals(), n);
        const Complex minus_i(0, -1);
        for (int k = 0; k < n; ++k) {
            const Matrix& H = tag_of(k) == PulseType::A ? ham_a_ : ham_b_;
            const Matrix dV = suffix[k + 2] * (minus_i * (H * prefix[k + 1]));
            for (int m = 0; m < m_count; ++m) {
                const Eigen::Matrix2cd dG =
                    dV.adjoint() * error_images[m] + error_images[m].adjoint() * dV;
                const double d00 = 0.5 * std::real(dG(0, 0) - dG(1, 1));
                jac(3 * m + 0, k) = std::sqrt(2.0) * d00;
                jac(3 * m + 1, k) = std::sqrt(2.0) * std::real(dG(0, 1));
                jac(3 * m + 2, k) = std::sqrt(2.0) * std::imag(dG(0, 1));
            }
        }
    }

    /// Scalar residual and its analytic timing-gradient.
    double residual_gradient(const std::vector<double>& timings, Eigen::VectorXd& grad) const {
        Eigen::VectorXd r;
        Eigen::MatrixXd jac;
        residual_jacobian(timings, r, jac);
        grad = 2.0 * jac.transpose() * r;
        return r.squaredNorm();
    }

private:
    Eigen::VectorXd residual_from_code_image(const Matrix& V) const {
        Eigen::VectorXd r(n_residuals());
        for (std::size_t m = 0; m < errors_.size(); ++m) {
            const Eigen::Matrix2cd G = V.adjoint() * (errors_[m] * V);
            const Eigen::Matrix2cd D = G - 0.5 * G.trace() * Eigen::Matrix2cd::Identity();
            r(3 * m + 0) = std::sqrt(2.0) * std::real(D(0, 0));
            r(3 * m + 1) = std::sqrt(2.0) * std::real(D(0, 1));
            r(3 * m + 2) = std::sqrt(2.0) * std::imag(D(0, 1));
        }
        return r;
    }

    HermitianExp plant_a_, plant_b_;
    Matrix ham_a_, ham_b_;
    Matrix code_;
    std::vector<Matrix> errors_;
    Eigen::Index dim_ = 0;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 step on seed + stream
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Scalar coding residual and analytic gradient with respect to the timings.
inline double coding_residual_gradient(const std::vector<double>& timings, const Operator& Ha,
                                       const Operator& Hb, const ErrorModel& errors,
                                       const LevelSpace& space, Eigen::VectorXd& grad) {
    detail::CodingObjective obj(Ha, Hb, errors, space);
    return obj.residual_gradient(timings, grad);
}

struct OptimizerSettings {
    double tolerance = 1e-6;
    int max_restarts = 500;
    int max_iterations = 300;  // Levenberg-Marquardt steps per restart
    std::uint64_t seed = 1;
    double min_duration = 1.0;   // ns
    double max_duration = 10.0;  // ns
};

struct OptimizeResult {
    PulseSequence sequence;
    CodingReport report;
    bool converged = false;
    int restarts_used = 0;
    long iterations_total = 0;
};

/// Multi-start timing optimization of the coding conditions. Each restart
/// runs Levenberg-Marquardt on the residual vector, with timings kept inside
/// [min_duration, max_duration] through a logistic reparametrization.
/// Restarts draw from seeded independent streams; results merge by best
/// residual so reruns with the same seed are reproducible.
inline OptimizeResult optimize_timings(const Operator& Ha, const Operator& Hb,
                                       const ErrorModel& errors, const LevelSpace& space,
                                       int n_pulses, const OptimizerSettings& opts = {}) {
    if (n_pulses < 1) throw std::invalid_argument("optimize_timings: n_pulses < 1");
    detail::CodingObjective obj(Ha, Hb, errors, space);

    const double lo = opts.min_duration, hi = opts.max_duration;
    auto to_tau = [&](const Eigen::VectorXd& x) {
        std::vector<double> tau(x.size());
        for (int i = 0; i < x.size(); ++i) tau[i] = lo + (hi - lo) / (1.0 + std::exp(-x(i)));
        return tau;
    };
    auto chain = [&](const std::vector<double>& tau) {
        Eigen::VectorXd d(tau.size());
        for (std::size_t i = 0; i < tau.size(); ++i)
            d(i) = (tau[i] - lo) * (hi - tau[i]) / (hi - lo);
        return d;
    };

    OptimizeResult best;
    double best_value = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < opts.max_restarts; ++restart) {
        std::mt19937_64 rng(detail::mix_seed(opts.seed, restart));
        std::uniform_real_distribution<double> init(-1.5, 1.5);
        Eigen::VectorXd x(n_pulses);
        for (int i = 0; i < n_pulses; ++i) x(i) = init(rng);

        Eigen::VectorXd r;
        Eigen::MatrixXd jac;
        std::vector<double> tau = to_tau(x);
        obj.residual_jacobian(tau, r, jac);
        double value = r.squaredNorm();
        double lambda = 1e-3;

        for (int iter = 0; iter < opts.max_iterations && value >= opts.tolerance; ++iter) {
            ++best.iterations_total;
            const Eigen::MatrixXd jx = jac * chain(tau).asDiagonal();  // d r / d x
            const Eigen::MatrixXd normal = jx.transpose() * jx;
            const Eigen::VectorXd rhs = -jx.transpose() * r;

            bool stepped = false;
            for (int attempt = 0; attempt < 12; ++attempt) {
                Eigen::MatrixXd damped = normal;
                damped.diagonal().array() += lambda;
                const Eigen::VectorXd dx = damped.ldlt().solve(rhs);
                const Eigen::VectorXd x_try = x + dx;
                const std::vector<double> tau_try = to_tau(x_try);
                const double value_try = obj.residual(tau_try).squaredNorm();
                if (value_try < value) {
                    x = x_try;
                    tau = tau_try;
                    value = value_try;
                    lambda = std::max(lambda * 0.3, 1e-12);
                    stepped = true;
                    break;
                }
                lambda *= 2.5;
            }
            if (!stepped) break;  // line search stalled
            obj.residual_jacobian(tau, r, jac);
            value = r.squaredNorm();
        }

        if (value < best_value) {
            best_value = value;
            best.sequence = PulseSequence::alternating(tau);
            best.restarts_used = restart + 1;
        }
        if (best_value < opts.tolerance) break;
    }

    if (best.sequence.size() == 0)
        best.sequence = PulseSequence::alternating(
            std::vector<double>(n_pulses, 0.5 * (lo + hi)));
    const Operator U = sequence_propagator(best.sequence, obj.plant_a(), obj.plant_b());
    best.report = coding_residual(U, errors, space);
    best.converged = best.report.residual < opts.tolerance;
    return best;
}

/// Decoding recipe: same timings applied backwards with the control
/// Hamiltonians negated (reversed magnetic field and detunings). The tag of
/// each timing is preserved, so sequence_propagator(decoded, -Ha, -Hb)
/// is exactly the adjoint of the coding propagator.
struct DecodedSequence {
    PulseSequence sequence;
    bool negate_hamiltonians = true;
};

inline DecodedSequence decode_sequence(const PulseSequence& seq) {
    seq.validate();
    DecodedSequence decoded;
    decoded.sequence.pulses.assign(seq.pulses.rbegin(), seq.pulses.rend());
    return decoded;
}

/// Propagator realized by a decoded sequence given the coding Hamiltonians.
inline Operator decoded_propagator(const DecodedSequence& decoded, const Operator& Ha,
                                   const Operator& Hb) {
    const Operator ha = decoded.negate_hamiltonians ? -1.0 * Ha : Ha;
    const Operator hb = decoded.negate_hamiltonians ? -1.0 * Hb : Hb;
    return sequence_propagator(decoded.sequence, ha, hb);
}

}  // namespace zenoprot
