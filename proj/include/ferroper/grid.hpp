#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "ferroper/errors.hpp"

namespace ferroper {

/// Which part of the boundary a face belongs to.
enum class BoundarySide { Bottom, Top, Lateral };

/// Uniform staggered (MAC) grid on the rectangle (0,Lx) x (0,d).
///
/// Scalars live at cell centers ((i+0.5)dx, (j+0.5)dz), the horizontal
/// velocity component on vertical faces (i dx, (j+0.5)dz) and the vertical
/// component on horizontal faces ((i+0.5)dx, j dz).
struct Grid {
    int nx = 0;      ///< cells in the horizontal direction
    int nz = 0;      ///< cells in the vertical direction
    double Lx = 0;   ///< horizontal extent
    double d = 0;    ///< height
    double dx = 0;
    double dz = 0;

    Grid() = default;
    Grid(int nx_, int nz_, double Lx_, double d_)
        : nx(nx_), nz(nz_), Lx(Lx_), d(d_) {
        if (nx < 2 || nz < 2)
            throw ConfigError("grid: need at least 2 cells per direction");
        if (!(Lx > 0.0) || !(d > 0.0))
            throw ConfigError("grid: extents must be positive");
        dx = Lx / nx;
        dz = d / nz;
    }

    double cell_x(int i) const { return (i + 0.5) * dx; }
    double cell_z(int j) const { return (j + 0.5) * dz; }
    double uface_x(int i) const { return i * dx; }
    double wface_z(int j) const { return j * dz; }
    double cell_volume() const { return dx * dz; }
    int cell_count() const { return nx * nz; }

    /// Classification of a boundary u-face (i in {0,nx}) or w-face (j in {0,nz}).
    static BoundarySide uface_side(int /*i*/) { return BoundarySide::Lateral; }
    static BoundarySide wface_side(int j, int nz) {
        return j == 0 ? BoundarySide::Bottom : (j == nz ? BoundarySide::Top : BoundarySide::Lateral);
    }
};

/// Cell-centered scalar with one ghost layer per side.
/// Valid indices: i in [-1, nx], j in [-1, nz]; active cells are [0,nx) x [0,nz).
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g, double value = 0.0)
        : nx_(g.nx), nz_(g.nz), v_((g.nx + 2) * (g.nz + 2), value) {}
    ScalarField(int nx, int nz, double value = 0.0)
        : nx_(nx), nz_(nz), v_((nx + 2) * (nz + 2), value) {}

    int nx() const { return nx_; }
    int nz() const { return nz_; }

    double& operator()(int i, int j) { return v_[idx(i, j)]; }
    double operator()(int i, int j) const { return v_[idx(i, j)]; }

    void fill(double value) { std::fill(v_.begin(), v_.end(), value); }

    std::vector<double>& raw() { return v_; }
    const std::vector<double>& raw() const { return v_; }

    bool same_shape(const ScalarField& o) const { return nx_ == o.nx_ && nz_ == o.nz_; }

private:
    std::size_t idx(int i, int j) const {
        assert(i >= -1 && i <= nx_ && j >= -1 && j <= nz_);
        return static_cast<std::size_t>(i + 1) + static_cast<std::size_t>(nx_ + 2) * (j + 1);
    }

    int nx_ = 0, nz_ = 0;
    std::vector<double> v_;
};

/// Staggered velocity-like field: u on vertical faces ((nx+1) x nz),
/// w on horizontal faces (nx x (nz+1)). No ghost storage; wall behaviour is
/// encoded in the operators.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& g) : nx_(g.nx), nz_(g.nz),
        u_((g.nx + 1) * g.nz, 0.0), w_(g.nx * (g.nz + 1), 0.0) {}
    VectorField(int nx, int nz) : nx_(nx), nz_(nz),
        u_((nx + 1) * nz, 0.0), w_(nx * (nz + 1), 0.0) {}

    int nx() const { return nx_; }
    int nz() const { return nz_; }

    double& u(int i, int j) { assert(i >= 0 && i <= nx_ && j >= 0 && j < nz_); return u_[i + (nx_ + 1) * j]; }
    double u(int i, int j) const { assert(i >= 0 && i <= nx_ && j >= 0 && j < nz_); return u_[i + (nx_ + 1) * j]; }
    double& w(int i, int j) { assert(i >= 0 && i < nx_ && j >= 0 && j <= nz_); return w_[i + nx_ * j]; }
    double w(int i, int j) const { assert(i >= 0 && i < nx_ && j >= 0 && j <= nz_); return w_[i + nx_ * j]; }

    std::vector<double>& raw_u() { return u_; }
    std::vector<double>& raw_w() { return w_; }
    const std::vector<double>& raw_u() const { return u_; }
    const std::vector<double>& raw_w() const { return w_; }

    /// Zero the boundary-normal entries (no-penetration walls).
    void zero_boundary_normal() {
        for (int j = 0; j < nz_; ++j) { u(0, j) = 0.0; u(nx_, j) = 0.0; }
        for (int i = 0; i < nx_; ++i) { w(i, 0) = 0.0; w(i, nz_) = 0.0; }
    }

    bool same_shape(const VectorField& o) const { return nx_ == o.nx_ && nz_ == o.nz_; }

private:
    int nx_ = 0, nz_ = 0;
    std::vector<double> u_, w_;
};

} // namespace ferroper
