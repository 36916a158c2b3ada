#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "ferroper/chi_law.hpp"
#include "ferroper/field_ops.hpp"
#include "ferroper/linsolve.hpp"
#include "ferroper/phys.hpp"

namespace ferroper {

struct PotentialSolveOptions {
    double picard_tol = 1e-10;  ///< relative residual target (absolute when the source vanishes)
    int picard_max = 200;
    double inner_tol = 1e-12;   ///< linear-solve relative tolerance
    int inner_max = 20000;
    double theta = 1.0;         ///< damping of the outer update, in (0, 1]
};

/// One magnetostatic solve at a fixed time sample: find the zero-mean
/// potential with div(grad phi + M_S b a(grad phi)) = F and vanishing total
/// normal flux on the walls.
struct MagnetostaticProblem {
    const Grid* grid = nullptr;
    ChiLaw law = ChiLaw::langevin();
    double saturation = 1.0;  ///< M_S
    ScalarField b_field;      ///< thermal factor b >= 0 at cells
    ScalarField source;       ///< F at cells, zero mean

    void validate() const {
        double fmax = max_abs(source, *grid);
        double mean = cell_mean(source, *grid);
        if (std::abs(mean) > 1e-10 * std::max(fmax, 1e-300) && fmax > 0.0)
            throw CompatibilityError("magnetostatics: source mean exceeds the compatibility tolerance");
        const Grid& g = *grid;
        double bscale = std::max(max_abs(b_field, g), 1e-300);
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (b_field(i, j) < -1e-10 * bscale)
                    throw SolverError("magnetostatics: negative thermal factor");
    }
};

struct PotentialSolution {
    ScalarField phi;             ///< zero mean, ghosts filled for zero-flux walls
    int picard_iterations = 0;
    double residual = 0.0;       ///< relative (or absolute for F = 0) defect, recomputed from phi
    std::vector<double> energy_history;  ///< discrete functional per accepted iterate
};

namespace detail {

/// Full gradient vector of a ghost-filled cell field, evaluated at a u-face
/// (normal component two-point, transverse by four-cell averaging).
inline std::array<double, 2> grad_at_uface(const ScalarField& f, const Grid& g, int i, int j) {
    double gx = (f(i, j) - f(i - 1, j)) / g.dx;
    double gz = (f(i - 1, j + 1) + f(i, j + 1) - f(i - 1, j - 1) - f(i, j - 1)) / (4.0 * g.dz);
    return {gx, gz};
}

inline std::array<double, 2> grad_at_wface(const ScalarField& f, const Grid& g, int i, int j) {
    double gz = (f(i, j) - f(i, j - 1)) / g.dz;
    double gx = (f(i + 1, j - 1) + f(i + 1, j) - f(i - 1, j - 1) - f(i - 1, j)) / (4.0 * g.dx);
    return {gx, gz};
}

} // namespace detail

/// Nonlinear part of the wall-flux-free constitutive flux: M_S b a(grad phi)
/// at interior faces, zero at boundary faces. `phi` must have filled ghosts.
inline VectorField nonlinear_flux(const ScalarField& phi, const ScalarField& b, const ChiLaw& law,
                                  double saturation, const Grid& g) {
    VectorField out(g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 1; i < g.nx; ++i) {
            auto xi = detail::grad_at_uface(phi, g, i, j);
            auto a = law.flux(xi);
            double bf = 0.5 * (b(i - 1, j) + b(i, j));
            out.u(i, j) = saturation * bf * a[0];
        }
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            auto xi = detail::grad_at_wface(phi, g, i, j);
            auto a = law.flux(xi);
            double bf = 0.5 * (b(i, j - 1) + b(i, j));
            out.w(i, j) = saturation * bf * a[1];
        }
    return out;
}

/// Total flux grad phi + M_S b a(grad phi) with zero boundary-normal entries.
inline VectorField augmented_flux(const ScalarField& phi, const ScalarField& b, const ChiLaw& law,
                                  double saturation, const Grid& g) {
    VectorField out = nonlinear_flux(phi, b, law, saturation, g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 1; i < g.nx; ++i)
            out.u(i, j) += (phi(i, j) - phi(i - 1, j)) / g.dx;
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.w(i, j) += (phi(i, j) - phi(i, j - 1)) / g.dz;
    return out;
}

/// L2 defect of div(total flux) - F, relative to ||F|| when F is nonzero.
inline double potential_residual(const ScalarField& phi, const MagnetostaticProblem& p) {
    const Grid& g = *p.grid;
    VectorField flux = augmented_flux(phi, p.b_field, p.law, p.saturation, g);
    ScalarField r = divergence_fc(flux, g);
    double rn = 0.0, fn = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double d = r(i, j) - p.source(i, j);
            rn += d * d;
            fn += p.source(i, j) * p.source(i, j);
        }
    rn = std::sqrt(rn * g.cell_volume());
    fn = std::sqrt(fn * g.cell_volume());
    return fn > 0.0 ? rn / fn : rn;
}

/// Discrete functional int(|grad phi|^2/2 + M_S b kappa(|grad phi|)) + int(F phi);
/// convexity of the flux potential makes it a convergence monitor.
inline double potential_energy(const ScalarField& phi, const MagnetostaticProblem& p) {
    const Grid& g = *p.grid;
    double quad = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 1; i < g.nx; ++i) {
            double d = (phi(i, j) - phi(i - 1, j)) / g.dx;
            quad += 0.5 * d * d;
        }
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double d = (phi(i, j) - phi(i, j - 1)) / g.dz;
            quad += 0.5 * d * d;
        }
    double nl = 0.0, src = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double gx = 0.5 * ((phi(i + 1, j) - phi(i, j)) + (phi(i, j) - phi(i - 1, j))) / g.dx;
            double gz = 0.5 * ((phi(i, j + 1) - phi(i, j)) + (phi(i, j) - phi(i, j - 1))) / g.dz;
            double r = std::sqrt(gx * gx + gz * gz);
            nl += p.saturation * std::max(p.b_field(i, j), 0.0) * p.law.kappa(r);
            src += p.source(i, j) * phi(i, j);
        }
    return (quad + nl + src) * g.cell_volume();
}

/// Picard outer loop on the Laplacian splitting: each iterate solves the
/// linear zero-mean Neumann problem lap(psi) = F - div(M_S b a(grad phi)),
/// then phi <- (1-theta) phi + theta psi. The augmented flux is strongly
/// monotone with constant 1, so the splitting contracts whenever
/// M_S ||b||_inf chi1 < 1; theta < 1 extends the reach for stiffer data.
inline PotentialSolution solve_potential(const MagnetostaticProblem& p, const PotentialSolveOptions& opts,
                                         const ScalarField* warm_start = nullptr) {
    p.validate();
    const Grid& g = *p.grid;
    const int n = g.nx * g.nz;

    ScalarField Fz = zero_mean_project(p.source, g);
    ScalarField phi = warm_start ? *warm_start : ScalarField(g);
    phi = zero_mean_project(phi, g);
    fill_ghosts(phi, g, ScalarBc::Neumann);

    // Flat vectors for the inner CG over active cells.
    std::vector<double> x(static_cast<std::size_t>(n), 0.0), rhs(static_cast<std::size_t>(n), 0.0);
    ScalarField apply_in(g), apply_out(g);
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i)
                apply_in(i, j) = in[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j];
        fill_ghosts(apply_in, g, ScalarBc::Neumann);
        apply_laplacian_filled(apply_in, g, apply_out);
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i)
                out[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j] = apply_out(i, j);
    };

    PotentialSolution sol;
    sol.energy_history.push_back(potential_energy(phi, p));
    double res = potential_residual(phi, p);
    if (res <= opts.picard_tol) {
        sol.phi = phi;
        sol.residual = res;
        return sol;
    }

    for (int k = 1; k <= opts.picard_max; ++k) {
        VectorField nl = nonlinear_flux(phi, p.b_field, p.law, p.saturation, g);
        ScalarField divnl = divergence_fc(nl, g);
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i)
                rhs[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j] = Fz(i, j) - divnl(i, j);
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i)
                x[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j] = phi(i, j);
        CgReport cg = conjugate_gradient(apply, x, rhs, opts.inner_tol, opts.inner_max, /*zero_mean=*/true);
        if (!cg.converged)
            throw SolverError("magnetostatics: inner linear solve stagnated at relative residual "
                              + std::to_string(cg.rel_residual));
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double psi = x[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j];
                phi(i, j) = (1.0 - opts.theta) * phi(i, j) + opts.theta * psi;
            }
        phi = zero_mean_project(phi, g);
        fill_ghosts(phi, g, ScalarBc::Neumann);
        sol.picard_iterations = k;
        sol.energy_history.push_back(potential_energy(phi, p));
        res = potential_residual(phi, p);
        if (res <= opts.picard_tol) {
            sol.phi = phi;
            sol.residual = res;
            return sol;
        }
    }
    throw ConvergenceError("magnetostatics: Picard did not reach tolerance; last residual "
                           + std::to_string(res));
}

/// H = grad(phi) with zero-flux ghost convention; the normal component
/// vanishes on the walls.
inline VectorField field_from_potential(ScalarField phi, const Grid& g) {
    fill_ghosts(phi, g, ScalarBc::Neumann);
    return gradient_cc(phi, g);
}

/// |H| at cell centers: per-component face average, smoothly regularized norm.
inline ScalarField field_magnitude_cells(const VectorField& H, const Grid& g) {
    ScalarField out(g);
    const double d2 = kFluxLinearizationRadius * kFluxLinearizationRadius;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double hx = 0.5 * (H.u(i, j) + H.u(i + 1, j));
            double hz = 0.5 * (H.w(i, j) + H.w(i, j + 1));
            out(i, j) = std::sqrt(hx * hx + hz * hz + d2);
        }
    return out;
}

struct FieldMapResult {
    VectorField H;
    ScalarField phi;
    int picard_iterations = 0;
    double residual = 0.0;
};

/// The temperature-to-field map: thermal factor, potential solve, gradient.
/// `zeta_cells` is the boundary-data lift evaluated at cell centers.
inline FieldMapResult h_map(const ScalarField& tau_tilde, const ScalarField& zeta_cells,
                            const ScalarField& source, const PhysParams& params, const ChiLaw& law,
                            const Grid& g, const PotentialSolveOptions& opts,
                            const ScalarField* warm_start = nullptr) {
    MagnetostaticProblem p;
    p.grid = &g;
    p.law = law;
    p.saturation = params.saturation;
    p.b_field = ScalarField(g);
    const double tol = clamp_tolerance(params.tau_star);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            p.b_field(i, j) = thermal_factor(params.tau_star, zeta_cells(i, j), tau_tilde(i, j), tol);
    p.source = zero_mean_project(source, g);
    PotentialSolution sol = solve_potential(p, opts, warm_start);
    FieldMapResult r;
    r.H = field_from_potential(sol.phi, g);
    r.phi = std::move(sol.phi);
    r.picard_iterations = sol.picard_iterations;
    r.residual = sol.residual;
    return r;
}

} // namespace ferroper
