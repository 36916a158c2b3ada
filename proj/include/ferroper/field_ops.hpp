#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ferroper/grid.hpp"

namespace ferroper {

/// Boundary-condition tags for cell-centered elliptic operators.
/// Lateral walls are always zero-flux; the tags select the bottom/top rows.
enum class ScalarBc {
    Neumann,             ///< zero flux on all of the boundary
    DirichletBottom,     ///< value prescribed on the bottom face, zero flux elsewhere
    DirichletTopBottom,  ///< values prescribed on bottom and top faces, zero flux laterally
    RobinBottom,         ///< value + eta * outward flux prescribed on the bottom, zero flux elsewhere
};

/// Face data for the inhomogeneous boundary rows. Empty vectors mean zero data.
struct BoundaryData {
    std::vector<double> bottom;  ///< size nx, values at z = 0 faces
    std::vector<double> top;     ///< size nx, values at z = d faces (DirichletTopBottom)
    double robin_eta = 0.0;      ///< flux coefficient in the Robin row
};

namespace detail {

/// Kahan-compensated sum.
inline double ksum(const double* p, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double y = p[k] - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

template <class F>
inline double ksum_over(int count, F&& f) {
    double s = 0.0, c = 0.0;
    for (int k = 0; k < count; ++k) {
        double y = f(k) - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

} // namespace detail

/// Fill the ghost layer of `f` according to `bc`; `data` supplies the
/// inhomogeneous face values (null means homogeneous).
inline void fill_ghosts(ScalarField& f, const Grid& g, ScalarBc bc, const BoundaryData* data = nullptr) {
    const int nx = g.nx, nz = g.nz;
    // Lateral: zero flux.
    for (int j = 0; j < nz; ++j) {
        f(-1, j) = f(0, j);
        f(nx, j) = f(nx - 1, j);
    }
    auto bottom_val = [&](int i) { return (data && !data->bottom.empty()) ? data->bottom[i] : 0.0; };
    auto top_val = [&](int i) { return (data && !data->top.empty()) ? data->top[i] : 0.0; };
    switch (bc) {
    case ScalarBc::Neumann:
        for (int i = 0; i < nx; ++i) { f(i, -1) = f(i, 0); f(i, nz) = f(i, nz - 1); }
        break;
    case ScalarBc::DirichletBottom:
        for (int i = 0; i < nx; ++i) {
            f(i, -1) = 2.0 * bottom_val(i) - f(i, 0);
            f(i, nz) = f(i, nz - 1);
        }
        break;
    case ScalarBc::DirichletTopBottom:
        for (int i = 0; i < nx; ++i) {
            f(i, -1) = 2.0 * bottom_val(i) - f(i, 0);
            f(i, nz) = 2.0 * top_val(i) - f(i, nz - 1);
        }
        break;
    case ScalarBc::RobinBottom: {
        // Face value w + eta * (outward normal flux) = data, second order via the
        // ghost: w_ghost = (2 dz data + (2 eta - dz) w_0) / (dz + 2 eta).
        const double eta = data ? data->robin_eta : 0.0;
        const double den = g.dz + 2.0 * eta;
        for (int i = 0; i < nx; ++i) {
            f(i, -1) = (2.0 * g.dz * bottom_val(i) + (2.0 * eta - g.dz) * f(i, 0)) / den;
            f(i, nz) = f(i, nz - 1);
        }
        break;
    }
    default:
        throw SolverError("fill_ghosts: unknown boundary tag");
    }
    // Corner ghosts are never read by the five-point stencils; keep them benign.
    f(-1, -1) = f(0, 0); f(nx, -1) = f(nx - 1, 0);
    f(-1, nz) = f(0, nz - 1); f(nx, nz) = f(nx - 1, nz - 1);
}

/// Two-point face gradient of a cell field. Requires filled ghosts; boundary
/// faces pick up whatever the ghost convention encodes (zero for zero-flux).
inline VectorField gradient_cc(const ScalarField& f, const Grid& g) {
    VectorField out(g);
    const double idx = 1.0 / g.dx, idz = 1.0 / g.dz;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i <= g.nx; ++i)
            out.u(i, j) = (f(i, j) - f(i - 1, j)) * idx;
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.w(i, j) = (f(i, j) - f(i, j - 1)) * idz;
    return out;
}

/// Cell-centered flux balance of a face field.
inline ScalarField divergence_fc(const VectorField& v, const Grid& g) {
    ScalarField out(g);
    const double idx = 1.0 / g.dx, idz = 1.0 / g.dz;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (v.u(i + 1, j) - v.u(i, j)) * idx + (v.w(i, j + 1) - v.w(i, j)) * idz;
    return out;
}

/// Apply the five-point Laplacian assuming the ghost layer of `f` is already
/// filled. Writes active cells of `out`.
inline void apply_laplacian_filled(const ScalarField& f, const Grid& g, ScalarField& out) {
    const double ix2 = 1.0 / (g.dx * g.dx), iz2 = 1.0 / (g.dz * g.dz);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) * ix2
                      + (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) * iz2;
}

/// Five-point Laplacian with the ghost convention of `bc`.
inline ScalarField laplacian_cc(ScalarField f, const Grid& g, ScalarBc bc, const BoundaryData* data = nullptr) {
    fill_ghosts(f, g, bc, data);
    ScalarField out(g);
    apply_laplacian_filled(f, g, out);
    return out;
}

/// Mean over active cells (compensated summation).
inline double cell_mean(const ScalarField& f, const Grid& g) {
    double s = detail::ksum_over(g.nx * g.nz, [&](int k) {
        return f(k % g.nx, k / g.nx);
    });
    return s / (g.nx * g.nz);
}

/// Subtract the cell mean; idempotent and linear.
inline ScalarField zero_mean_project(ScalarField f, const Grid& g) {
    const double m = cell_mean(f, g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            f(i, j) -= m;
    return f;
}

struct FieldNorms {
    double l2 = 0;       ///< midpoint-rule L2 norm
    double h1_semi = 0;  ///< L2 norm of the interior face gradient
    double max = 0;      ///< max of |f| over active cells
};

/// Midpoint-rule norms of a cell field. The gradient part uses interior faces
/// only, so no boundary condition is assumed.
inline FieldNorms norms(const ScalarField& f, const Grid& g) {
    FieldNorms n;
    const double vol = g.cell_volume();
    double s2 = detail::ksum_over(g.nx * g.nz, [&](int k) {
        double v = f(k % g.nx, k / g.nx);
        return v * v;
    });
    n.l2 = std::sqrt(s2 * vol);
    double gsum = 0.0, comp = 0.0;
    auto acc = [&](double term) {
        double y = term - comp;
        double t = gsum + y;
        comp = (t - gsum) - y;
        gsum = t;
    };
    for (int j = 0; j < g.nz; ++j)
        for (int i = 1; i < g.nx; ++i) {
            double d = (f(i, j) - f(i - 1, j)) / g.dx;
            acc(d * d);
        }
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double d = (f(i, j) - f(i, j - 1)) / g.dz;
            acc(d * d);
        }
    n.h1_semi = std::sqrt(gsum * vol);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            n.max = std::max(n.max, std::abs(f(i, j)));
    return n;
}

inline double max_abs(const ScalarField& f, const Grid& g) {
    double m = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            m = std::max(m, std::abs(f(i, j)));
    return m;
}

/// Squared L2 norm of a face field (each face weighted with one cell volume;
/// boundary-normal faces carry the imposed wall value).
inline double l2_norm_sq(const VectorField& v, const Grid& g) {
    const double vol = g.cell_volume();
    double s = detail::ksum_over(static_cast<int>(v.raw_u().size()), [&](int k) {
        double x = v.raw_u()[static_cast<std::size_t>(k)];
        return x * x;
    });
    s += detail::ksum_over(static_cast<int>(v.raw_w().size()), [&](int k) {
        double x = v.raw_w()[static_cast<std::size_t>(k)];
        return x * x;
    });
    return s * vol;
}

inline double l2_norm(const VectorField& v, const Grid& g) { return std::sqrt(l2_norm_sq(v, g)); }

/// Discrete H1 seminorm of a velocity field with no-slip walls (mirror ghosts
/// for the tangential components).
inline double h1_seminorm(const VectorField& v, const Grid& g) {
    double s = 0.0;
    const double idx = 1.0 / g.dx, idz = 1.0 / g.dz;
    // du/dx between consecutive u-faces and du/dz between rows (mirror at walls).
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double d = (v.u(i + 1, j) - v.u(i, j)) * idx;
            s += d * d;
        }
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            double lo = (j == 0) ? -v.u(i, 0) : v.u(i, j - 1);
            double hi = (j == g.nz) ? -v.u(i, g.nz - 1) : v.u(i, j);
            double d = (hi - lo) * idz;
            s += d * d;
        }
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            double lo = (i == 0) ? -v.w(0, j) : v.w(i - 1, j);
            double hi = (i == g.nx) ? -v.w(g.nx - 1, j) : v.w(i, j);
            double d = (hi - lo) * idx;
            s += d * d;
        }
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double d = (v.w(i, j + 1) - v.w(i, j)) * idz;
            s += d * d;
        }
    return std::sqrt(s * g.cell_volume());
}

inline double max_face_speed(const VectorField& v) {
    double m = 0.0;
    for (double x : v.raw_u()) m = std::max(m, std::abs(x));
    for (double x : v.raw_w()) m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs_divergence(const VectorField& v, const Grid& g) {
    double m = 0.0;
    const double idx = 1.0 / g.dx, idz = 1.0 / g.dz;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double dv = (v.u(i + 1, j) - v.u(i, j)) * idx + (v.w(i, j + 1) - v.w(i, j)) * idz;
            m = std::max(m, std::abs(dv));
        }
    return m;
}

/// Divergence scaled to a dimensionless number: max|div| * h_min / max speed.
inline double relative_divergence(const VectorField& v, const Grid& g) {
    double speed = max_face_speed(v);
    if (speed == 0.0) return max_abs_divergence(v, g) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return max_abs_divergence(v, g) * std::min(g.dx, g.dz) / speed;
}

/// Volume-weighted inner product of two face fields.
inline double face_inner(const VectorField& a, const VectorField& b, const Grid& g) {
    double s = detail::ksum_over(static_cast<int>(a.raw_u().size()), [&](int k) {
        return a.raw_u()[static_cast<std::size_t>(k)] * b.raw_u()[static_cast<std::size_t>(k)];
    });
    s += detail::ksum_over(static_cast<int>(a.raw_w().size()), [&](int k) {
        return a.raw_w()[static_cast<std::size_t>(k)] * b.raw_w()[static_cast<std::size_t>(k)];
    });
    return s * g.cell_volume();
}

/// Volume-weighted inner product of two cell fields over active cells.
inline double cell_inner(const ScalarField& a, const ScalarField& b, const Grid& g) {
    double s = detail::ksum_over(g.nx * g.nz, [&](int k) {
        int i = k % g.nx, j = k / g.nx;
        return a(i, j) * b(i, j);
    });
    return s * g.cell_volume();
}

/// Discrete L3 norm of the cell-centered magnitude of a face field.
inline double l3_norm_cells(const ScalarField& mag, const Grid& g) {
    double s = detail::ksum_over(g.nx * g.nz, [&](int k) {
        double v = std::abs(mag(k % g.nx, k / g.nx));
        return v * v * v;
    });
    return std::cbrt(s * g.cell_volume());
}

} // namespace ferroper
