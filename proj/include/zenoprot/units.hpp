#pragma once

#include <cmath>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace zenoprot {

/// Internal unit system: hbar = 1, time in ns, energies as angular
/// frequencies in rad/ns. Magnetic fields stay in tesla and electric fields
/// in V/m; the model constructors apply the conversion constants below.
namespace constants {

// CODATA 2018
inline constexpr double hbar_J_s = 1.054571817e-34;
inline constexpr double bohr_magneton_J_per_T = 9.2740100783e-24;
inline constexpr double eV_J = 1.602176634e-19;
inline constexpr double c_cm_per_s = 2.99792458e10;
inline constexpr double bohr_radius_m = 5.29177210903e-11;
inline constexpr double elementary_charge_C = 1.602176634e-19;

/// mu_B/hbar = 8.794e10 rad s^-1 T^-1, expressed per ns.
inline constexpr double mu_B_over_hbar_rad_per_ns_T = bohr_magneton_J_per_T / hbar_J_s * 1e-9;

/// 1 eV as an angular frequency in rad/ns.
inline constexpr double eV_rad_per_ns = eV_J / hbar_J_s * 1e-9;

/// 1 cm^-1 as an angular frequency in rad/ns (2*pi*c*sigma).
inline constexpr double wavenumber_rad_per_ns = 2.0 * 3.14159265358979323846 * c_cm_per_s * 1e-9;

/// c in cm/ns, for tau_f = 1/(c * splitting[cm^-1]).
inline constexpr double c_cm_per_ns = c_cm_per_s * 1e-9;

/// One atomic-unit dipole over hbar, in (rad/s)/(V/m).
inline constexpr double ea0_over_hbar = elementary_charge_C * bohr_radius_m / hbar_J_s;

}  // namespace constants

/// "7e-3 T" -> {7e-3, "T"}; a bare number parses with an empty unit.
struct Quantity {
    double value = 0.0;
    std::string unit;
};

inline Quantity parse_quantity(const std::string& text) {
    std::istringstream in(text);
    Quantity q;
    if (!(in >> q.value)) throw std::invalid_argument("quantity: cannot parse number in '" + text + "'");
    in >> q.unit;
    std::string trailing;
    if (in >> trailing) throw std::invalid_argument("quantity: trailing content in '" + text + "'");
    return q;
}

/// Converts a unit-annotated quantity using an accepted-unit table
/// {unit -> factor to internal}. Throws when the unit is not in the table.
inline double convert_quantity(const Quantity& q,
                               std::initializer_list<std::pair<const char*, double>> accepted) {
    for (const auto& [unit, factor] : accepted)
        if (q.unit == unit) return q.value * factor;
    throw std::invalid_argument("quantity: unit '" + q.unit + "' not accepted here");
}

inline double parse_field_tesla(const std::string& s) {
    return convert_quantity(parse_quantity(s), {{"T", 1.0}, {"mT", 1e-3}});
}
inline double parse_field_V_per_m(const std::string& s) {
    return convert_quantity(parse_quantity(s), {{"V/m", 1.0}, {"V.m^-1", 1.0}});
}
inline double parse_energy_rad_per_ns(const std::string& s) {
    return convert_quantity(parse_quantity(s), {{"rad/ns", 1.0},
                                                {"eV", constants::eV_rad_per_ns},
                                                {"cm^-1", constants::wavenumber_rad_per_ns}});
}
inline double parse_time_ns(const std::string& s) {
    return convert_quantity(parse_quantity(s),
                            {{"ns", 1.0}, {"us", 1e3}, {"ms", 1e6}, {"s", 1e9}});
}
inline double parse_angle_rad(const std::string& s) {
    return convert_quantity(parse_quantity(s), {{"rad", 1.0}, {"", 1.0}});
}
inline double parse_dimensionless(const std::string& s) {
    return convert_quantity(parse_quantity(s), {{"", 1.0}});
}
inline double parse_wavenumber_cm(const std::string& s) {
    return convert_quantity(parse_quantity(s), {{"cm^-1", 1.0}});
}
inline double parse_rate_rad_per_ns(const std::string& s) {
    return convert_quantity(parse_quantity(s), {{"rad/ns", 1.0}, {"rad/us", 1e-3}});
}

}  // namespace zenoprot
