#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "ferroper/field_ops.hpp"
#include "ferroper/grid.hpp"

namespace ferroper {

struct CgReport {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Conjugate gradients for an SPD operator on a flat vector. `apply` maps
/// x -> A x. When `zero_mean` is set, the right-hand side and every iterate
/// are projected onto the zero-mean subspace (pure-Neumann operators are
/// singular on constants).
template <class Apply>
CgReport conjugate_gradient(const Apply& apply, std::vector<double>& x, std::vector<double> b,
                            double tol_rel, int max_iter, bool zero_mean = false) {
    const std::size_t n = b.size();
    auto project = [&](std::vector<double>& v) {
        double m = detail::ksum(v.data(), n) / static_cast<double>(n);
        for (double& c : v) c -= m;
    };
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
        return detail::ksum_over(static_cast<int>(n), [&](int k) {
            return a[static_cast<std::size_t>(k)] * c[static_cast<std::size_t>(k)];
        });
    };
    if (zero_mean) { project(b); project(x); }
    std::vector<double> r(n), p(n), ap(n);
    apply(x, ap);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
    if (zero_mean) project(r);
    double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) bnorm = 1.0;
    double rr = dot(r, r);
    CgReport rep;
    rep.rel_residual = std::sqrt(rr) / bnorm;
    if (rep.rel_residual <= tol_rel) { rep.converged = true; return rep; }
    p = r;
    for (int it = 1; it <= max_iter; ++it) {
        apply(p, ap);
        double pap = dot(p, ap);
        if (!(pap > 0.0)) break; // lost positivity; bail out with current iterate
        double alpha = rr / pap;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        if (zero_mean && (it % 16 == 0)) { project(x); project(r); }
        double rr_new = dot(r, r);
        rep.iterations = it;
        rep.rel_residual = std::sqrt(rr_new) / bnorm;
        if (rep.rel_residual <= tol_rel) {
            if (zero_mean) project(x);
            rep.converged = true;
            return rep;
        }
        double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
    }
    if (zero_mean) project(x);
    return rep;
}

/// Direct solver for the pure-Neumann five-point Poisson problem on a uniform
/// rectangle. The stencil diagonalizes in the half-sample cosine basis; the
/// constant mode is dropped, which is exactly the zero-mean restriction.
class CosinePoisson {
public:
    CosinePoisson() = default;
    explicit CosinePoisson(const Grid& g) : nx_(g.nx), nz_(g.nz) {
        build(cx_, nx_);
        build(cz_, nz_);
        ex_.resize(nx_);
        ez_.resize(nz_);
        for (int k = 0; k < nx_; ++k) {
            double s = std::sin(0.5 * std::numbers::pi * k / nx_);
            ex_[k] = -4.0 / (g.dx * g.dx) * s * s;
        }
        for (int k = 0; k < nz_; ++k) {
            double s = std::sin(0.5 * std::numbers::pi * k / nz_);
            ez_[k] = -4.0 / (g.dz * g.dz) * s * s;
        }
        work1_.resize(static_cast<std::size_t>(nx_) * nz_);
        work2_.resize(static_cast<std::size_t>(nx_) * nz_);
    }

    int nx() const { return nx_; }
    int nz() const { return nz_; }

    /// Solve lap(phi) = f - mean(f) with zero-flux walls; the result has zero
    /// mean and an unfilled ghost layer.
    ScalarField solve(const ScalarField& f, const Grid& g) {
        // Pack active cells, transform, divide by the stencil symbol, invert.
        for (int j = 0; j < nz_; ++j)
            for (int i = 0; i < nx_; ++i)
                work1_[at(i, j)] = f(i, j);
        forward();
        work2_[0] = 0.0; // zero-mean gauge
        for (int j = 0; j < nz_; ++j)
            for (int i = 0; i < nx_; ++i) {
                if (i == 0 && j == 0) continue;
                work2_[at(i, j)] /= (ex_[i] + ez_[j]);
            }
        inverse();
        ScalarField phi(g);
        for (int j = 0; j < nz_; ++j)
            for (int i = 0; i < nx_; ++i)
                phi(i, j) = work1_[at(i, j)];
        return phi;
    }

private:
    std::size_t at(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx_) * j; }

    /// Orthonormal half-sample cosine matrix: C[k][i] = c_k cos(k pi (i+1/2)/n).
    static void build(std::vector<double>& c, int n) {
        c.resize(static_cast<std::size_t>(n) * n);
        for (int k = 0; k < n; ++k) {
            double norm = (k == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
            for (int i = 0; i < n; ++i)
                c[static_cast<std::size_t>(k) * n + i] = norm * std::cos(std::numbers::pi * k * (i + 0.5) / n);
        }
    }

    /// Physical values (work1_) -> cosine coefficients (work2_).
    void forward() {
        tmp_.assign(work1_.size(), 0.0);
        for (int j = 0; j < nz_; ++j)
            for (int k = 0; k < nx_; ++k) {
                const double* row = &cx_[static_cast<std::size_t>(k) * nx_];
                double s = 0.0;
                for (int i = 0; i < nx_; ++i) s += row[i] * work1_[at(i, j)];
                tmp_[at(k, j)] = s;
            }
        for (int k = 0; k < nx_; ++k)
            for (int l = 0; l < nz_; ++l) {
                const double* row = &cz_[static_cast<std::size_t>(l) * nz_];
                double s = 0.0;
                for (int j = 0; j < nz_; ++j) s += row[j] * tmp_[at(k, j)];
                work2_[at(k, l)] = s;
            }
    }

    /// Cosine coefficients (work2_) -> physical values (work1_).
    void inverse() {
        tmp_.assign(work2_.size(), 0.0);
        for (int l = 0; l < nz_; ++l)
            for (int i = 0; i < nx_; ++i) {
                double s = 0.0;
                for (int k = 0; k < nx_; ++k) s += cx_[static_cast<std::size_t>(k) * nx_ + i] * work2_[at(k, l)];
                tmp_[at(i, l)] = s;
            }
        for (int i = 0; i < nx_; ++i)
            for (int j = 0; j < nz_; ++j) {
                double s = 0.0;
                for (int l = 0; l < nz_; ++l) s += cz_[static_cast<std::size_t>(l) * nz_ + j] * tmp_[at(i, l)];
                work1_[at(i, j)] = s;
            }
    }

    int nx_ = 0, nz_ = 0;
    std::vector<double> cx_, cz_, ex_, ez_;
    std::vector<double> work1_, work2_, tmp_;
};

} // namespace ferroper
