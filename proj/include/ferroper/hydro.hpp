#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "ferroper/field_ops.hpp"
#include "ferroper/linsolve.hpp"
#include "ferroper/magnetostatics.hpp"

namespace ferroper {

/// Normalized truncated-Gaussian smoothing kernel on the grid: standard
/// deviation epsilon/2, cut at radius epsilon, weights nonnegative with unit
/// sum. Convolution extends fields by zero outside the domain.
struct Mollifier {
    double epsilon = 0.0;
    int rx = 0, rz = 0;               ///< support half-widths in cells
    std::vector<double> weights;      ///< (2rx+1) x (2rz+1), row-major in x

    static Mollifier make(const Grid& g, double epsilon) {
        if (!(epsilon >= 2.0 * std::max(g.dx, g.dz)))
            throw ConfigError("mollifier: radius must span at least two cells");
        Mollifier m;
        m.epsilon = epsilon;
        m.rx = static_cast<int>(std::floor(epsilon / g.dx + 1e-12));
        m.rz = static_cast<int>(std::floor(epsilon / g.dz + 1e-12));
        const double sigma = 0.5 * epsilon;
        m.weights.assign(static_cast<std::size_t>(2 * m.rx + 1) * (2 * m.rz + 1), 0.0);
        double sum = 0.0;
        for (int kz = -m.rz; kz <= m.rz; ++kz)
            for (int kx = -m.rx; kx <= m.rx; ++kx) {
                double r2 = kx * g.dx * kx * g.dx + kz * g.dz * kz * g.dz;
                if (r2 > epsilon * epsilon * (1.0 + 1e-12)) continue;
                double wgt = std::exp(-r2 / (2.0 * sigma * sigma));
                m.weights[m.at(kx, kz)] = wgt;
                sum += wgt;
            }
        for (double& wgt : m.weights) wgt /= sum;
        return m;
    }

    std::size_t at(int kx, int kz) const {
        return static_cast<std::size_t>(kx + rx) + static_cast<std::size_t>(2 * rx + 1) * (kz + rz);
    }
};

/// Discrete convolution of a cell field with the kernel, zero extension
/// outside the domain. Linear, max-bounded by max|f|.
inline ScalarField mollify(const ScalarField& f, const Mollifier& m, const Grid& g) {
    ScalarField out(g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double acc = 0.0;
            for (int kz = -m.rz; kz <= m.rz; ++kz) {
                int jj = j - kz;
                if (jj < 0 || jj >= g.nz) continue;
                for (int kx = -m.rx; kx <= m.rx; ++kx) {
                    int ii = i - kx;
                    if (ii < 0 || ii >= g.nx) continue;
                    acc += m.weights[m.at(kx, kz)] * f(ii, jj);
                }
            }
            out(i, j) = acc;
        }
    return out;
}

enum class ForceForm {
    Pointwise,     ///< mu0 M_S b chi(|H|) grad|H| + buoyancy
    Conservative,  ///< mu0 M_S kappa(|H|) grad(tau_tilde + zeta) + buoyancy (gradient part in the pressure)
};

struct KelvinForceSpec {
    bool regularized = false;  ///< smooth |H| with the mollifier before differencing
    double epsilon = 0.0;      ///< mollifier radius when regularized
    ForceForm form = ForceForm::Pointwise;

    void validate(const Grid& g) const {
        if (regularized && !(epsilon >= 2.0 * std::max(g.dx, g.dz)))
            throw ConfigError("force: mollifier radius must span at least two cells");
    }
};

/// Magnetic body force plus buoyancy at faces. `gravity` is the acceleration
/// vector (gx, gz); the physical default is (0, -g_mag). Boundary-normal
/// faces carry no force (the wall velocity is pinned).
inline VectorField kelvin_force(const ScalarField& tau_tilde, const ScalarField& zeta_cells,
                                const VectorField& H, const ChiLaw& law, const PhysParams& params,
                                const KelvinForceSpec& spec, const Grid& g,
                                std::array<double, 2> gravity) {
    spec.validate(g);
    if (!tau_tilde.same_shape(zeta_cells) || H.nx() != g.nx || H.nz() != g.nz)
        throw SolverError("kelvin_force: field shapes do not match the grid");

    const double tolc = clamp_tolerance(params.tau_star);
    ScalarField b(g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            b(i, j) = thermal_factor(params.tau_star, zeta_cells(i, j), tau_tilde(i, j), tolc);

    ScalarField mag = field_magnitude_cells(H, g);
    if (spec.regularized) {
        Mollifier m = Mollifier::make(g, spec.epsilon);
        mag = mollify(mag, m, g);
    }

    VectorField S(g);
    const double c_mag = params.mu0 * params.saturation;
    if (spec.form == ForceForm::Pointwise) {
        ScalarField chi_mag(g);
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i)
                chi_mag(i, j) = law.chi(mag(i, j));
        for (int j = 0; j < g.nz; ++j)
            for (int i = 1; i < g.nx; ++i) {
                double grad = (mag(i, j) - mag(i - 1, j)) / g.dx;
                double bf = 0.5 * (b(i - 1, j) + b(i, j));
                double cf = 0.5 * (chi_mag(i - 1, j) + chi_mag(i, j));
                S.u(i, j) = c_mag * bf * cf * grad;
            }
        for (int j = 1; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double grad = (mag(i, j) - mag(i, j - 1)) / g.dz;
                double bf = 0.5 * (b(i, j - 1) + b(i, j));
                double cf = 0.5 * (chi_mag(i, j - 1) + chi_mag(i, j));
                S.w(i, j) = c_mag * bf * cf * grad;
            }
    } else {
        ScalarField kap(g), tau(g);
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i) {
                kap(i, j) = law.kappa(mag(i, j));
                tau(i, j) = tau_tilde(i, j) + zeta_cells(i, j);
            }
        for (int j = 0; j < g.nz; ++j)
            for (int i = 1; i < g.nx; ++i) {
                double grad = (tau(i, j) - tau(i - 1, j)) / g.dx;
                double kf = 0.5 * (kap(i - 1, j) + kap(i, j));
                S.u(i, j) = c_mag * kf * grad;
            }
        for (int j = 1; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double grad = (tau(i, j) - tau(i, j - 1)) / g.dz;
                double kf = 0.5 * (kap(i, j - 1) + kap(i, j));
                S.w(i, j) = c_mag * kf * grad;
            }
    }

    // Buoyancy rho0 (1 + alpha b) g on interior faces.
    for (int j = 0; j < g.nz; ++j)
        for (int i = 1; i < g.nx; ++i) {
            double bf = 0.5 * (b(i - 1, j) + b(i, j));
            S.u(i, j) += params.rho0 * (1.0 + params.alpha * bf) * gravity[0];
        }
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double bf = 0.5 * (b(i, j - 1) + b(i, j));
            S.w(i, j) += params.rho0 * (1.0 + params.alpha * bf) * gravity[1];
        }
    return S;
}

/// Magnetic pressure mu0 M_S (tau_star - tau) kappa(|H|) at cell centers.
inline ScalarField magnetic_pressure(const ScalarField& tau, const VectorField& H, const ChiLaw& law,
                                     const PhysParams& params, const Grid& g) {
    ScalarField mag = field_magnitude_cells(H, g);
    ScalarField out(g);
    const double tolc = clamp_tolerance(params.tau_star);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double factor = thermal_factor(params.tau_star, 0.0, tau(i, j), tolc);
            out(i, j) = params.mu0 * params.saturation * factor * law.kappa(mag(i, j));
        }
    return out;
}

struct VelocityStep {
    VectorField U;
    ScalarField p;  ///< projection multiplier
};

/// Remove the discrete-gradient part: solve the zero-mean Neumann problem
/// lap p = (rho0/dt) div(U) exactly and correct the interior faces. Boundary
/// normals are pinned at zero.
inline VelocityStep project_velocity(VectorField U, const PhysParams& params, const Grid& g,
                                     double dt, CosinePoisson& poisson) {
    U.zero_boundary_normal();
    ScalarField div = divergence_fc(U, g);
    const double scale = params.rho0 / dt;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            div(i, j) *= scale;
    ScalarField p = poisson.solve(div, g);
    const double c = dt / params.rho0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 1; i < g.nx; ++i)
            U.u(i, j) -= c * (p(i, j) - p(i - 1, j)) / g.dx;
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            U.w(i, j) -= c * (p(i, j) - p(i, j - 1)) / g.dz;
    return {std::move(U), std::move(p)};
}

namespace detail {

/// Donor-cell upwind advection of the u component (advective form over the
/// u control volume; wall fluxes vanish with the no-slip data).
inline void advect_u(const VectorField& U, const Grid& g, double dt, double cfl_limit,
                     std::vector<double>& out) {
    const double cx = dt / g.dx, cz = dt / g.dz;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 1; i < g.nx; ++i) {
            double c = U.u(i, j);
            // advecting speeds on the u-cell faces
            double aW = 0.5 * (U.u(i - 1, j) + U.u(i, j));
            double aE = 0.5 * (U.u(i, j) + U.u(i + 1, j));
            double aS = 0.5 * (U.w(i - 1, j) + U.w(i, j));
            double aN = 0.5 * (U.w(i - 1, j + 1) + U.w(i, j + 1));
            double acc = c, weight = 0.0;
            if (aE < 0.0) { acc -= cx * aE * (U.u(i + 1, j) - c); weight += -cx * aE; }
            if (aW > 0.0) { acc += cx * aW * (U.u(i - 1, j) - c); weight += cx * aW; }
            double north = (j + 1 < g.nz) ? U.u(i, j + 1) : -c;  // mirror across the wall
            double south = (j > 0) ? U.u(i, j - 1) : -c;
            if (aN < 0.0) { acc -= cz * aN * (north - c); weight += -cz * aN; }
            if (aS > 0.0) { acc += cz * aS * (south - c); weight += cz * aS; }
            if (weight > cfl_limit)
                throw CflError("momentum advection (u): inflow weight exceeds the limit");
            out[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx + 1) * j] = acc;
        }
}

inline void advect_w(const VectorField& U, const Grid& g, double dt, double cfl_limit,
                     std::vector<double>& out) {
    const double cx = dt / g.dx, cz = dt / g.dz;
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double c = U.w(i, j);
            double aS = 0.5 * (U.w(i, j - 1) + U.w(i, j));
            double aN = 0.5 * (U.w(i, j) + U.w(i, j + 1));
            double aW = 0.5 * (U.u(i, j - 1) + U.u(i, j));
            double aE = 0.5 * (U.u(i + 1, j - 1) + U.u(i + 1, j));
            double acc = c, weight = 0.0;
            if (aN < 0.0) { acc -= cz * aN * (U.w(i, j + 1) - c); weight += -cz * aN; }
            if (aS > 0.0) { acc += cz * aS * (U.w(i, j - 1) - c); weight += cz * aS; }
            double east = (i + 1 < g.nx) ? U.w(i + 1, j) : -c;
            double west = (i > 0) ? U.w(i - 1, j) : -c;
            if (aE < 0.0) { acc -= cx * aE * (east - c); weight += -cx * aE; }
            if (aW > 0.0) { acc += cx * aW * (west - c); weight += cx * aW; }
            if (weight > cfl_limit)
                throw CflError("momentum advection (w): inflow weight exceeds the limit");
            out[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j] = acc;
        }
}

/// (rho0/dt) I - mu lap with no-slip walls, u component. Interior faces are
/// the unknowns; tangential walls mirror with sign flip.
inline void helmholtz_u(const std::vector<double>& in, std::vector<double>& out, const Grid& g,
                        double sigma, double mu) {
    const double ix2 = 1.0 / (g.dx * g.dx), iz2 = 1.0 / (g.dz * g.dz);
    auto at = [&](int i, int j) { return static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx + 1) * j; };
    for (int j = 0; j < g.nz; ++j)
        for (int i = 1; i < g.nx; ++i) {
            double c = in[at(i, j)];
            double east = (i + 1 <= g.nx - 1) ? in[at(i + 1, j)] : 0.0;
            double west = (i - 1 >= 1) ? in[at(i - 1, j)] : 0.0;
            double north = (j + 1 < g.nz) ? in[at(i, j + 1)] : -c;
            double south = (j > 0) ? in[at(i, j - 1)] : -c;
            double lap = (east - 2.0 * c + west) * ix2 + (north - 2.0 * c + south) * iz2;
            out[at(i, j)] = sigma * c - mu * lap;
        }
}

inline void helmholtz_w(const std::vector<double>& in, std::vector<double>& out, const Grid& g,
                        double sigma, double mu) {
    const double ix2 = 1.0 / (g.dx * g.dx), iz2 = 1.0 / (g.dz * g.dz);
    auto at = [&](int i, int j) { return static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j; };
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double c = in[at(i, j)];
            double north = (j + 1 <= g.nz - 1) ? in[at(i, j + 1)] : 0.0;
            double south = (j - 1 >= 1) ? in[at(i, j - 1)] : 0.0;
            double east = (i + 1 < g.nx) ? in[at(i + 1, j)] : -c;
            double west = (i > 0) ? in[at(i - 1, j)] : -c;
            double lap = (east - 2.0 * c + west) * ix2 + (north - 2.0 * c + south) * iz2;
            out[at(i, j)] = sigma * c - mu * lap;
        }
}

} // namespace detail

/// One momentum step: donor-cell upwind advection, backward-Euler diffusion
/// with no-slip walls, explicit force, then exact pressure projection. The
/// force enters at the projection stage so discrete gradients are absorbed
/// into the multiplier without residue.
inline VelocityStep step_velocity(const VectorField& U, const VectorField& S, const PhysParams& params,
                                  const Grid& g, double dt, CosinePoisson& poisson,
                                  double cfl_limit = 0.95, double lin_tol = 1e-13) {
    if (!U.same_shape(S))
        throw SolverError("step_velocity: force shape mismatch");
    const double sigma = params.rho0 / dt;

    // Advect into flat component arrays (walls stay zero).
    std::vector<double> ua(U.raw_u().size(), 0.0), wa(U.raw_w().size(), 0.0);
    detail::advect_u(U, g, dt, cfl_limit, ua);
    detail::advect_w(U, g, dt, cfl_limit, wa);

    // Implicit diffusion per component.
    auto apply_u = [&](const std::vector<double>& in, std::vector<double>& out) {
        detail::helmholtz_u(in, out, g, sigma, params.mu);
    };
    auto apply_w = [&](const std::vector<double>& in, std::vector<double>& out) {
        detail::helmholtz_w(in, out, g, sigma, params.mu);
    };
    std::vector<double> bu(ua.size()), bw(wa.size());
    for (std::size_t k = 0; k < ua.size(); ++k) bu[k] = sigma * ua[k];
    for (std::size_t k = 0; k < wa.size(); ++k) bw[k] = sigma * wa[k];
    std::vector<double> xu = ua, xw = wa;
    CgReport ru = conjugate_gradient(apply_u, xu, bu, lin_tol, 100000);
    CgReport rw = conjugate_gradient(apply_w, xw, bw, lin_tol, 100000);
    if (!ru.converged || !rw.converged)
        throw SolverError("velocity diffusion solve did not converge");

    VectorField Ustar(g);
    const double cf = dt / params.rho0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 1; i < g.nx; ++i)
            Ustar.u(i, j) = xu[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx + 1) * j]
                          + cf * S.u(i, j);
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            Ustar.w(i, j) = xw[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j]
                          + cf * S.w(i, j);
    return project_velocity(std::move(Ustar), params, g, dt, poisson);
}

/// Midpoint-quadrature pairing of a force with a discretely divergence-free
/// test field vanishing on the boundary.
inline double weak_force_pairing(const VectorField& S, const VectorField& V, const Grid& g,
                                 double div_tol = 1e-10) {
    if (relative_divergence(V, g) > div_tol)
        throw SolverError("weak_force_pairing: test field is not divergence-free");
    for (int j = 0; j < g.nz; ++j)
        if (V.u(0, j) != 0.0 || V.u(g.nx, j) != 0.0)
            throw SolverError("weak_force_pairing: test field does not vanish on the boundary");
    for (int i = 0; i < g.nx; ++i)
        if (V.w(i, 0) != 0.0 || V.w(i, g.nz) != 0.0)
            throw SolverError("weak_force_pairing: test field does not vanish on the boundary");
    return face_inner(S, V, g);
}

} // namespace ferroper
