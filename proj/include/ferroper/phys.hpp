#pragma once

#include <array>
#include <cmath>

#include "ferroper/chi_law.hpp"
#include "ferroper/errors.hpp"

namespace ferroper {

/// Material and body-force constants. `tau_star` is the sup of the boundary
/// temperature data and is derived from the heating profile at configuration
/// time; `poincare` is the domain constant used by the decay-rate diagnostic.
struct PhysParams {
    double rho0 = 1.0;        ///< reference density
    double mu = 1.0;          ///< dynamic viscosity
    double eta = 1.0;         ///< thermal conductivity
    double cp = 1.0;          ///< specific heat
    double mu0 = 1.0;         ///< vacuum permeability
    double saturation = 1.0;  ///< saturation magnetization
    double alpha = 0.0;       ///< thermal expansion coefficient
    double g_mag = 0.0;       ///< gravity magnitude
    double tau_star = 1.0;    ///< sup of the boundary heating data
    double poincare = 0.0;    ///< Poincare constant; 0 means "derive max(Lx,d)/pi"

    void validate() const {
        auto pos = [](double v, const char* name) {
            if (!(v > 0.0)) throw ConfigError(std::string("params: ") + name + " must be positive");
        };
        pos(rho0, "rho0"); pos(mu, "mu"); pos(eta, "eta"); pos(cp, "cp");
        pos(mu0, "mu0"); pos(saturation, "saturation");
        if (alpha < 0.0) throw ConfigError("params: alpha must be nonnegative");
        if (g_mag < 0.0) throw ConfigError("params: g_mag must be nonnegative");
        if (tau_star < 0.0) throw ConfigError("params: tau_star must be nonnegative");
    }
};

/// Round-off guard below which a slightly negative thermal factor is clamped.
inline double clamp_tolerance(double tau_star) { return 1e-10 * tau_star; }

/// Thermal saturation factor b = tau_star - zeta - tau_tilde, clamped at zero
/// within the round-off guard. A value below -tol signals that the maximum
/// principle was violated upstream.
inline double thermal_factor(double tau_star, double zeta_value, double tau_tilde_value,
                             double tol = -1.0) {
    if (tol < 0.0) tol = clamp_tolerance(tau_star);
    double b = tau_star - zeta_value - tau_tilde_value;
    if (b >= 0.0) return b;
    if (b >= -tol) return 0.0;
    throw MaxPrincipleError("thermal factor negative beyond the round-off guard: b = " + std::to_string(b));
}

/// Magnetization M = M_S (tau_star - tau) a(H): collinear with H, bounded by
/// M_S tau_star chi0.
template <std::size_t N>
std::array<double, N> magnetization(const ChiLaw& law, double saturation, double tau_star,
                                    double tau, const std::array<double, N>& H) {
    double tol = clamp_tolerance(tau_star);
    if (tau < -tol || tau > tau_star + tol)
        throw SolverError("magnetization: temperature outside [0, tau_star]");
    double factor = thermal_factor(tau_star, 0.0, tau, tol);
    std::array<double, N> a = law.flux(H);
    for (double& c : a) c *= saturation * factor;
    return a;
}

} // namespace ferroper
