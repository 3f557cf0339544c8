#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "zenoprot/clebsch_gordan.hpp"

namespace zenoprot {

/// Inputs of the three-photon decay-rate formula, hbar = 1 units. Dipole
/// scales are arbitrary units; cavity_enhancement is the scalar stand-in for
/// the direction-averaged cavity density-of-states factor.
struct KineticsParams {
    double d_gamma_lambda = 1.0;
    double d_lambda_mu = 1.0;
    double d_mu_nu = 1.0;
    double e1 = 1.0;
    double e2 = 1.0;
    double delta1 = 1.0;  // angular frequency
    double delta2 = 1.0;
    double cavity_enhancement = 1.0;  // >= 1
    double gamma_5p = 1.0;  // decay rate of the 5p branch

    // lifetimes for the dominance margins, same time unit as 1/rates
    double tau_60f = 0.115e6;  // ns
    double tau_5d = 240.0;     // ns
    double tau_5p = 26.0;      // ns

    void validate() const {
        if (delta1 == 0.0 || delta1 + delta2 == 0.0)
            throw std::invalid_argument("kinetics: detuning denominators must be nonzero");
        if (cavity_enhancement < 1.0)
            throw std::invalid_argument("kinetics: cavity_enhancement must be >= 1");
    }
};

/// Two-photon prefactor |d E1/Delta1|^2 |d E2/(Delta1+Delta2)|^2.
inline double two_photon_prefactor(const KineticsParams& p) {
    p.validate();
    const double a = p.d_gamma_lambda * p.e1 / p.delta1;
    const double b = p.d_lambda_mu * p.e2 / (p.delta1 + p.delta2);
    return a * a * b * b;
}

/// Decay rate of the three-photon transition |gamma_i> -> |nu_i>:
/// Gamma = 2 pi |d E1/Delta1|^2 |d E2/(Delta1+Delta2)|^2 * (cavity-averaged
/// spontaneous factor), the last collapsed into cavity_enhancement * d_mu_nu^2.
inline double three_photon_rate(const KineticsParams& p) {
    return 2.0 * std::numbers::pi * two_photon_prefactor(p) * p.cavity_enhancement *
           p.d_mu_nu * p.d_mu_nu;
}

/// Density-matrix elements tracked by the projection kinetics.
struct KineticsState {
    double pop_g1 = 0.0, pop_g2 = 0.0;  // rho_gamma_i gamma_i
    double pop_n1 = 0.0, pop_n2 = 0.0;  // rho_nu_i nu_i
    std::complex<double> coh_g{0.0, 0.0};  // rho_gamma_1 gamma_2
    std::complex<double> coh_n{0.0, 0.0};  // rho_nu_1 nu_2

    double population_sum() const { return pop_g1 + pop_g2 + pop_n1 + pop_n2; }
};

/// Closed-form solution of the rate system
///   d/dt rho_gg = -Gamma_i rho_gg,   d/dt rho_nn = +Gamma_i rho_gg,
///   d/dt rho_g1g2 = -(Gamma_1+Gamma_2)/2 rho_g1g2,
///   d/dt rho_n1n2 = sqrt(Gamma_1 Gamma_2) rho_g1g2.
inline KineticsState rate_closed_form(double g1, double g2, const KineticsState& rho0, double t) {
    KineticsState s;
    s.pop_g1 = rho0.pop_g1 * std::exp(-g1 * t);
    s.pop_g2 = rho0.pop_g2 * std::exp(-g2 * t);
    s.pop_n1 = rho0.pop_n1 + rho0.pop_g1 * (1.0 - std::exp(-g1 * t));
    s.pop_n2 = rho0.pop_n2 + rho0.pop_g2 * (1.0 - std::exp(-g2 * t));
    const double half_sum = 0.5 * (g1 + g2);
    s.coh_g = rho0.coh_g * std::exp(-half_sum * t);
    if (half_sum > 0.0) {
        const double eta = std::sqrt(g1 * g2) / half_sum;
        s.coh_n = rho0.coh_n + eta * rho0.coh_g * (1.0 - std::exp(-half_sum * t));
    } else {
        s.coh_n = rho0.coh_n;
    }
    return s;
}

namespace detail {

/// Dormand-Prince 5(4) adaptive integrator on a fixed-size state.
template <std::size_t N>
std::array<double, N> rk45(const std::function<std::array<double, N>(const std::array<double, N>&)>& f,
                           std::array<double, N> y, double t_end, double rtol, double atol) {
    if (t_end <= 0.0) return y;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    auto axpy = [](std::array<double, N> base, std::initializer_list<std::pair<double, const std::array<double, N>*>> terms,
                   double h) {
        for (const auto& [coeff, k] : terms)
            for (std::size_t i = 0; i < N; ++i) base[i] += h * coeff * (*k)[i];
        return base;
    };

    double t = 0.0, h = t_end / 100.0;
    std::array<double, N> k1 = f(y);
    int guard = 0;
    while (t < t_end) {
        if (++guard > 2000000) throw std::runtime_error("rk45: step count exceeded");
        h = std::min(h, t_end - t);
        const auto k2 = f(axpy(y, {{a21, &k1}}, h));
        const auto k3 = f(axpy(y, {{a31, &k1}, {a32, &k2}}, h));
        const auto k4 = f(axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h));
        const auto k5 = f(axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h));
        const auto k6 = f(axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h));
        const auto y5 = axpy(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
        const auto k7 = f(y5);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
            const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(e) / scale);
        }
        if (err <= 1.0) {
            t += h;
            y = y5;
            k1 = k7;  // FSAL
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
    return y;
}

}  // namespace detail

/// Numerical integration of the projection rate system, relative tolerance
/// 1e-10. The closed form above is the cross-validation oracle.
inline KineticsState rate_ode_solve(double g1, double g2, const KineticsState& rho0, double t,
                                    double rtol = 1e-10) {
    if (g1 < 0.0 || g2 < 0.0) throw std::invalid_argument("rate_ode_solve: negative rate");
    const double cross = std::sqrt(g1 * g2);
    auto f = [&](const std::array<double, 8>& y) -> std::array<double, 8> {
        return {-g1 * y[0], -g2 * y[1], g1 * y[0], g2 * y[1],
                -0.5 * (g1 + g2) * y[4], -0.5 * (g1 + g2) * y[5],
                cross * y[4], cross * y[5]};
    };
    std::array<double, 8> y{rho0.pop_g1, rho0.pop_g2, rho0.pop_n1, rho0.pop_n2,
                            rho0.coh_g.real(), rho0.coh_g.imag(),
                            rho0.coh_n.real(), rho0.coh_n.imag()};
    y = detail::rk45<8>(f, y, t, rtol, 1e-14);
    KineticsState s;
    s.pop_g1 = y[0];
    s.pop_g2 = y[1];
    s.pop_n1 = y[2];
    s.pop_n2 = y[3];
    s.coh_g = {y[4], y[5]};
    s.coh_n = {y[6], y[7]};
    return s;
}

/// Maximum coherence-transfer efficiency eta = 2 sqrt(G1 G2)/(G1+G2).
inline double transfer_efficiency(double g1, double g2) {
    if (!(g1 > 0.0) || !(g2 > 0.0))
        throw std::invalid_argument("transfer_efficiency: rates must be positive");
    return 2.0 * std::sqrt(g1 * g2) / (g1 + g2);
}

/// Exact rate ratio Gamma_1/Gamma_2 of the two three-photon paths: squared
/// ratio of the two Clebsch-Gordan coefficient products, kept as an exact
/// rational from the big-integer CG arithmetic.
struct RateRatio {
    BigRational ratio;  // Gamma_1 / Gamma_2
    double value = 0.0;
};

inline RateRatio cg_rate_ratio() {
    using H = HalfInt;
    auto cg = [](int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
        return clebsch_gordan_exact(H::from_twice(tj1), H::from_twice(tm1), H::from_twice(tj2),
                                    H::from_twice(tm2), H::from_twice(tJ), H::from_twice(tM));
    };
    // path gamma_1 -> nu_1: C(3/2 -1/2, 1 -1 | 5/2 -3/2) C(3/2 1/2, 1 -1 | 3/2 -1/2)
    //                       C(1/2 -1/2, 1 1 | 3/2 1/2)
    const SignedSqrtRational num =
        cg(3, -1, 2, -2, 5, -3) * cg(3, 1, 2, -2, 3, -1) * cg(1, -1, 2, 2, 3, 1);
    // path gamma_2 -> nu_2: C(3/2 1/2, 1 -1 | 5/2 -1/2) C(3/2 3/2, 1 -1 | 3/2 1/2)
    //                       C(1/2 1/2, 1 1 | 3/2 3/2)
    const SignedSqrtRational den =
        cg(3, 1, 2, -2, 5, -1) * cg(3, 3, 2, -2, 3, 1) * cg(1, 1, 2, 2, 3, 3);
    if (den.sign == 0) throw std::logic_error("cg_rate_ratio: vanishing denominator path");
    RateRatio r;
    r.ratio = num.square / den.square;  // squares of the products, signs drop
    r.value = static_cast<double>(r.ratio);
    return r;
}

/// Margins of the rate-dominance inequalities required for a clean
/// projection: the spontaneous three-photon channel must beat the pi-photon
/// branch and the decays of the intermediate levels.
struct DominanceReport {
    double pi_photon_margin = 0.0;  // Gamma / (two-photon prefactor * gamma_5p)
    double lifetime_60f_margin = 0.0;  // Gamma * tau_60f
    double decay_5d_margin = 0.0;  // Gamma / (|d E1/Delta1|^2 / tau_5d)
    double decay_5p_margin = 0.0;  // Gamma / (two-photon prefactor / tau_5p)
    double threshold = 10.0;
    bool all_pass = false;
};

inline DominanceReport rate_dominance_check(const KineticsParams& p, double threshold = 10.0) {
    const double gamma = three_photon_rate(p);
    const double q = two_photon_prefactor(p);
    const double one_photon = std::pow(p.d_gamma_lambda * p.e1 / p.delta1, 2);
    DominanceReport r;
    r.threshold = threshold;
    r.pi_photon_margin = gamma / (q * p.gamma_5p);
    r.lifetime_60f_margin = gamma * p.tau_60f;
    r.decay_5d_margin = gamma / (one_photon / p.tau_5d);
    r.decay_5p_margin = gamma / (q / p.tau_5p);
    r.all_pass = r.pi_photon_margin > threshold && r.lifetime_60f_margin > threshold &&
                 r.decay_5d_margin > threshold && r.decay_5p_margin > threshold;
    return r;
}

}  // namespace zenoprot
