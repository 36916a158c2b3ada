#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "ferroper/field_ops.hpp"
#include "ferroper/linsolve.hpp"
#include "ferroper/zeta.hpp"

namespace ferroper {

enum class VariantKind {
    DirichletBottom,   ///< heated from below, insulated top and sides
    DirichletBoth,     ///< heated from below and above, insulated sides
    RobinBottom,       ///< heat-exchange (Fourier) condition below, insulated elsewhere
};

/// Temperature boundary-condition variant with its periodic heating data.
struct BoundaryVariant {
    VariantKind kind = VariantKind::DirichletBottom;
    ZetaProfile zeta_minus;                 ///< data on the bottom boundary
    std::optional<ZetaProfile> zeta_plus;   ///< data on the top boundary (DirichletBoth)

    double tau_star() const {
        double t = zeta_minus.tau_star();
        if (zeta_plus) t = std::max(t, zeta_plus->tau_star());
        return t;
    }

    void validate(const Grid& g) const {
        if (zeta_minus.columns() != g.nx)
            throw ConfigError("variant: heating profile resolution does not match the grid");
        if (kind == VariantKind::DirichletBoth && !zeta_plus)
            throw ConfigError("variant: heated-from-both-sides needs a top profile");
        if (kind != VariantKind::DirichletBoth && zeta_plus)
            throw ConfigError("variant: top profile given but not used by this variant");
        if (!(tau_star() > 0.0))
            throw ConfigError("variant: the heating data sup must be positive");
    }
};

/// The boundary-data lift evaluated at cell centers: the shifted temperature
/// is tau_tilde = tau - lift. Vertical interpolation between the two walls
/// for the two-sided variant, vertically constant for one-sided heating, and
/// identically zero for the Robin variant (no shift; the data acts through
/// the flux condition only).
inline ScalarField lift_at_cells(const BoundaryVariant& v, const Grid& g, double t) {
    ScalarField out(g);
    switch (v.kind) {
    case VariantKind::DirichletBottom:
        for (int i = 0; i < g.nx; ++i) {
            double zv = v.zeta_minus.value(t, i);
            for (int j = 0; j < g.nz; ++j) out(i, j) = zv;
        }
        break;
    case VariantKind::DirichletBoth:
        for (int i = 0; i < g.nx; ++i) {
            double lo = v.zeta_minus.value(t, i);
            double hi = v.zeta_plus->value(t, i);
            for (int j = 0; j < g.nz; ++j) {
                double frac = g.cell_z(j) / g.d;
                out(i, j) = lo + frac * (hi - lo);
            }
        }
        break;
    case VariantKind::RobinBottom:
        break; // zero
    }
    return out;
}

/// Boundary source Z = -rho0 cp d_t zeta + eta lap_x zeta for a vertically
/// constant profile, extended as a cell field (constant in z).
inline ScalarField z_source(const ZetaProfile& zeta, const PhysParams& params, const Grid& g, double t) {
    if (zeta.columns() != g.nx)
        throw ConfigError("z_source: profile resolution does not match the grid");
    ScalarField out(g);
    for (int i = 0; i < g.nx; ++i) {
        double v = -params.rho0 * params.cp * zeta.dt(t, i)
                 + params.eta * zeta.horizontal_laplacian(t, i, g.dx);
        for (int j = 0; j < g.nz; ++j) out(i, j) = v;
    }
    return out;
}

struct MaxPrincipleReport {
    double min_tau = 0.0;  ///< min of tau_tilde + zeta
    double max_tau = 0.0;  ///< max of tau_tilde + zeta
    bool pass = false;
};

/// Check 0 <= tau_tilde + zeta <= tau_star within the round-off guard.
inline MaxPrincipleReport check_max_principle(const ScalarField& tau_tilde, const ScalarField& zeta_cells,
                                              const Grid& g, double tau_star, double tol = -1.0) {
    if (tol < 0.0) tol = clamp_tolerance(tau_star);
    MaxPrincipleReport r;
    r.min_tau = 1e300;
    r.max_tau = -1e300;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double v = tau_tilde(i, j) + zeta_cells(i, j);
            r.min_tau = std::min(r.min_tau, v);
            r.max_tau = std::max(r.max_tau, v);
        }
    r.pass = (r.min_tau >= -tol) && (r.max_tau <= tau_star + tol);
    return r;
}

namespace detail {

/// Donor-cell upwind advection in the advective form: per face f of a cell,
/// dt/h * u_f * (donor(f) - center). Wall faces carry zero normal velocity,
/// so the ghost layer is never read and constants are transported exactly.
/// The per-cell inflow-weight sum is the sharp positivity condition; its
/// violation raises CflError.
inline ScalarField upwind_advect_cells(const ScalarField& w, const VectorField& U, const Grid& g,
                                       double dt, double cfl_limit) {
    ScalarField out(g);
    const double cx = dt / g.dx, cz = dt / g.dz;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double uW = U.u(i, j), uE = U.u(i + 1, j);
            double wS = U.w(i, j), wN = U.w(i, j + 1);
            double c = w(i, j);
            double acc = c;
            double weight = 0.0;
            if (uE < 0.0) { acc -= cx * uE * (w(i + 1, j) - c); weight += -cx * uE; }
            if (uW > 0.0) { acc += cx * uW * (w(i - 1, j) - c); weight += cx * uW; }
            if (wN < 0.0) { acc -= cz * wN * (w(i, j + 1) - c); weight += -cz * wN; }
            if (wS > 0.0) { acc += cz * wS * (w(i, j - 1) - c); weight += cz * wS; }
            if (weight > cfl_limit)
                throw CflError("temperature advection: local inflow weight " + std::to_string(weight)
                               + " exceeds the positivity limit");
            out(i, j) = acc;
        }
    return out;
}

struct HelmholtzBc {
    ScalarBc bc;
    BoundaryData data;  ///< inhomogeneous face values at the new time level
};

inline HelmholtzBc variant_bc(const BoundaryVariant& v, const Grid& g, const PhysParams& params, double t) {
    HelmholtzBc h;
    switch (v.kind) {
    case VariantKind::DirichletBottom:
        h.bc = ScalarBc::DirichletBottom;
        h.data.bottom.resize(g.nx);
        for (int i = 0; i < g.nx; ++i) h.data.bottom[i] = v.zeta_minus.value(t, i);
        break;
    case VariantKind::DirichletBoth:
        h.bc = ScalarBc::DirichletTopBottom;
        h.data.bottom.resize(g.nx);
        h.data.top.resize(g.nx);
        for (int i = 0; i < g.nx; ++i) {
            h.data.bottom[i] = v.zeta_minus.value(t, i);
            h.data.top[i] = v.zeta_plus->value(t, i);
        }
        break;
    case VariantKind::RobinBottom:
        h.bc = ScalarBc::RobinBottom;
        h.data.robin_eta = params.eta;
        h.data.bottom.resize(g.nx);
        for (int i = 0; i < g.nx; ++i) h.data.bottom[i] = v.zeta_minus.value(t, i);
        break;
    }
    return h;
}

} // namespace detail

/// One temperature step from t0 to t0+dt: donor-cell upwind advection of the
/// shifted temperature and its boundary-data lift, the lift-induced sources,
/// and backward-Euler diffusion with the variant's boundary condition. The
/// update is assembled in the un-shifted variable, which realizes exactly the
/// specified splitting with the sources discretized consistently with the
/// lift -- the route on which the step matrix is an M-matrix and the discrete
/// maximum principle holds without a scheme-level tolerance.
///
/// `extra_source` is an optional explicit cell source (verification hook).
inline ScalarField step_temperature(const ScalarField& tau_tilde, const VectorField& U,
                                    const BoundaryVariant& variant, const PhysParams& params,
                                    const Grid& g, double t0, double dt,
                                    const ScalarField* extra_source = nullptr,
                                    double cfl_limit = 0.95, double lin_tol = 1e-13,
                                    bool enforce_bounds = true) {
    const double tau_star = params.tau_star;
    const double t1 = t0 + dt;

    // Un-shifted temperature at the old time level.
    ScalarField lift0 = lift_at_cells(variant, g, t0);
    ScalarField w(g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            w(i, j) = tau_tilde(i, j) + lift0(i, j);

    ScalarField w_adv = detail::upwind_advect_cells(w, U, g, dt, cfl_limit);
    if (extra_source) {
        double c = dt / (params.rho0 * params.cp);
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i)
                w_adv(i, j) += c * (*extra_source)(i, j);
    }

    // Backward Euler: (rho0 cp / dt) w1 - eta lap(w1) = (rho0 cp / dt) w_adv,
    // boundary data taken at the new time level.
    detail::HelmholtzBc hbc = detail::variant_bc(variant, g, params, t1);
    const double sigma = params.rho0 * params.cp / dt;

    ScalarField buf(g), lap(g);
    BoundaryData hom;  // homogeneous part of the ghost rule (keeps the Robin coefficient)
    hom.robin_eta = hbc.data.robin_eta;
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i)
                buf(i, j) = in[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j];
        fill_ghosts(buf, g, hbc.bc, &hom);
        apply_laplacian_filled(buf, g, lap);
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nx; ++i)
                out[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j]
                    = sigma * buf(i, j) - params.eta * lap(i, j);
    };

    // Right-hand side: advected state plus the inhomogeneous ghost terms.
    const std::size_t n = static_cast<std::size_t>(g.nx) * g.nz;
    std::vector<double> rhs(n), x(n);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            rhs[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j] = sigma * w_adv(i, j);
            x[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j] = w_adv(i, j);
        }
    const double iz2 = 1.0 / (g.dz * g.dz);
    if (hbc.bc == ScalarBc::DirichletBottom || hbc.bc == ScalarBc::DirichletTopBottom) {
        for (int i = 0; i < g.nx; ++i)
            rhs[static_cast<std::size_t>(i)] += params.eta * 2.0 * hbc.data.bottom[i] * iz2;
    }
    if (hbc.bc == ScalarBc::DirichletTopBottom) {
        for (int i = 0; i < g.nx; ++i)
            rhs[static_cast<std::size_t>(i) + n - g.nx] += params.eta * 2.0 * hbc.data.top[i] * iz2;
    }
    if (hbc.bc == ScalarBc::RobinBottom) {
        double czeta = 2.0 * g.dz / (g.dz + 2.0 * hbc.data.robin_eta);
        for (int i = 0; i < g.nx; ++i)
            rhs[static_cast<std::size_t>(i)] += params.eta * czeta * hbc.data.bottom[i] * iz2;
    }

    CgReport cg = conjugate_gradient(apply, x, rhs, lin_tol, 100000, /*zero_mean=*/false);
    if (!cg.converged)
        throw SolverError("temperature diffusion solve did not converge: relative residual "
                          + std::to_string(cg.rel_residual));

    ScalarField lift1 = lift_at_cells(variant, g, t1);
    ScalarField out(g);
    double lo = 1e300, hi = -1e300;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double w1 = x[static_cast<std::size_t>(i) + static_cast<std::size_t>(g.nx) * j];
            lo = std::min(lo, w1);
            hi = std::max(hi, w1);
            out(i, j) = w1 - lift1(i, j);
        }
    if (enforce_bounds && !extra_source) {
        double tol = clamp_tolerance(tau_star);
        if (lo < -tol || hi > tau_star + tol)
            throw MaxPrincipleError("temperature left [0, tau_star] beyond the round-off guard: ["
                                    + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return out;
}

} // namespace ferroper
