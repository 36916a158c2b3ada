#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "ferroper/grid.hpp"
#include "ferroper/phys.hpp"

namespace ferroper {

namespace detail {

/// Periodic cubic spline through n uniformly spaced samples y_0..y_{n-1}
/// (period n*h). Stores second derivatives; evaluates value and slope.
class PeriodicSpline {
public:
    PeriodicSpline() = default;
    PeriodicSpline(std::vector<double> y, double h) : y_(std::move(y)), h_(h) {
        const int n = static_cast<int>(y_.size());
        m_.assign(n, 0.0);
        if (n < 3) return;
        // Cyclic tridiagonal system for the second derivatives:
        // m_{i-1} + 4 m_i + m_{i+1} = 6 (y_{i-1} - 2 y_i + y_{i+1}) / h^2.
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) {
            double ym = y_[(i + n - 1) % n], yp = y_[(i + 1) % n];
            rhs[i] = 6.0 * (ym - 2.0 * y_[i] + yp) / (h * h);
        }
        solve_cyclic(rhs);
    }

    double value(double t) const {
        if (y_.size() < 3) return y_.empty() ? 0.0 : y_[0];
        auto [i, s] = locate(t);
        int n = static_cast<int>(y_.size());
        int ip = (i + 1) % n;
        double a = (1.0 - s), b = s;
        return a * y_[i] + b * y_[ip]
             + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[ip]) * h_ * h_ / 6.0;
    }

    double slope(double t) const {
        if (y_.size() < 3) return 0.0;
        auto [i, s] = locate(t);
        int n = static_cast<int>(y_.size());
        int ip = (i + 1) % n;
        double a = (1.0 - s), b = s;
        return (y_[ip] - y_[i]) / h_
             + ((3.0 * b * b - 1.0) * m_[ip] - (3.0 * a * a - 1.0) * m_[i]) * h_ / 6.0;
    }

private:
    std::pair<int, double> locate(double t) const {
        int n = static_cast<int>(y_.size());
        double period = n * h_;
        double tt = std::fmod(t, period);
        if (tt < 0.0) tt += period;
        int i = static_cast<int>(tt / h_);
        if (i >= n) i = n - 1;
        return {i, (tt - i * h_) / h_};
    }

    void solve_cyclic(std::vector<double>& rhs) {
        // Sherman-Morrison on the cyclic (1, 4, 1) system.
        const int n = static_cast<int>(rhs.size());
        const double diag = 4.0, off = 1.0;
        auto tridiag = [&](std::vector<double> d, std::vector<double> r) {
            std::vector<double> c(n, off), x(n);
            for (int i = 1; i < n; ++i) {
                double w = off / d[i - 1];
                d[i] -= w * off;
                r[i] -= w * r[i - 1];
            }
            x[n - 1] = r[n - 1] / d[n - 1];
            for (int i = n - 2; i >= 0; --i)
                x[i] = (r[i] - off * x[i + 1]) / d[i];
            return x;
        };
        const double gamma = -diag;
        std::vector<double> d(n, diag);
        d[0] -= gamma;
        d[n - 1] -= off * off / gamma;
        std::vector<double> u(n, 0.0);
        u[0] = gamma;
        u[n - 1] = off;
        auto y = tridiag(d, rhs);
        auto q = tridiag(d, u);
        double fact = (y[0] + off * y[n - 1] / gamma) / (1.0 + q[0] + off * q[n - 1] / gamma);
        for (int i = 0; i < n; ++i) m_[i] = y[i] - fact * q[i];
    }

    std::vector<double> y_;
    std::vector<double> m_;
    double h_ = 1.0;
};

} // namespace detail

/// Time-periodic boundary temperature data on the bottom (or top) row,
/// resolved at the grid's horizontal cell centers.
///
/// Evaluation is clamped into [0, tau_star]; the stored sup IS the data's sup
/// by construction, so the admissible range is never exceeded between samples.
class ZetaProfile {
public:
    ZetaProfile() = default;

    /// Spatially uniform constant value c >= 0.
    static ZetaProfile constant(double c, int columns, double period) {
        if (c < 0.0) throw ConfigError("zeta: constant profile must be nonnegative");
        ZetaProfile z;
        z.kind_ = Kind::Closed;
        z.columns_ = columns;
        z.period_ = period;
        z.offset_ = c;
        z.amp_ = 0.0;
        z.tau_star_ = c;
        return z;
    }

    /// offset + amp cos(2 pi m t / T) cos(k pi x / Lx), sampled at cell centers.
    static ZetaProfile mode(double offset, double amp, int mmode, int kmode, const Grid& g, double period) {
        ZetaProfile z;
        z.kind_ = Kind::Closed;
        z.columns_ = g.nx;
        z.period_ = period;
        z.offset_ = offset;
        z.amp_ = amp;
        z.mmode_ = mmode;
        z.kmode_ = kmode;
        z.Lx_ = g.Lx;
        z.dx_ = g.dx;
        z.tau_star_ = offset + std::abs(amp);
        if (offset - std::abs(amp) < -1e-14 * z.tau_star_)
            throw ConfigError("zeta: mode profile dips below zero");
        return z;
    }

    /// Sampled profile: values[m][i] at uniform times m * T / nt, columns at
    /// cell centers. Periodic cubic splines in time per column.
    static ZetaProfile from_samples(std::vector<std::vector<double>> values, double period) {
        if (values.empty() || values.front().empty())
            throw ConfigError("zeta: empty sample table");
        ZetaProfile z;
        z.kind_ = Kind::Sampled;
        z.period_ = period;
        z.columns_ = static_cast<int>(values.front().size());
        const int nt = static_cast<int>(values.size());
        double vmax = 0.0, vmin = 0.0;
        for (auto& row : values) {
            if (static_cast<int>(row.size()) != z.columns_)
                throw ConfigError("zeta: ragged sample table");
            for (double v : row) { vmax = std::max(vmax, v); vmin = std::min(vmin, v); }
        }
        if (vmin < -1e-12 * std::max(vmax, 1.0))
            throw ConfigError("zeta: sampled profile must be nonnegative");
        z.tau_star_ = vmax;
        z.samples_ = values;
        z.splines_.reserve(z.columns_);
        double h = period / nt;
        for (int i = 0; i < z.columns_; ++i) {
            std::vector<double> col(nt);
            for (int m = 0; m < nt; ++m) col[m] = values[m][i];
            z.splines_.emplace_back(std::move(col), h);
        }
        return z;
    }

    double period() const { return period_; }
    int columns() const { return columns_; }
    double tau_star() const { return tau_star_; }

    /// Value at time t in column i, clamped into [0, tau_star].
    double value(double t, int i) const {
        double v = raw_value(t, i);
        return std::clamp(v, 0.0, tau_star_);
    }

    /// Time derivative (of the un-clamped representation).
    double dt(double t, int i) const {
        switch (kind_) {
        case Kind::Closed: {
            if (mmode_ == 0 || amp_ == 0.0) return 0.0;
            double w = 2.0 * std::numbers::pi * mmode_ / period_;
            return -amp_ * w * std::sin(w * t) * space_factor(i);
        }
        case Kind::Sampled:
            return splines_[i].slope(t);
        }
        return 0.0;
    }

    /// Horizontal second difference (zero-flux ends) used by the boundary
    /// source diagnostic.
    double horizontal_laplacian(double t, int i, double dx) const {
        auto val = [&](int k) { return raw_value(t, std::clamp(k, 0, columns_ - 1)); };
        double left = (i == 0) ? val(0) : val(i - 1);
        double right = (i == columns_ - 1) ? val(columns_ - 1) : val(i + 1);
        return (left - 2.0 * val(i) + right) / (dx * dx);
    }

    bool periodic_samples_ok() const {
        if (kind_ != Kind::Sampled) return true;
        // spline representation is periodic by construction
        return true;
    }

private:
    enum class Kind { Closed, Sampled };

    double raw_value(double t, int i) const {
        switch (kind_) {
        case Kind::Closed: {
            if (amp_ == 0.0) return offset_;
            double w = 2.0 * std::numbers::pi * mmode_ / period_;
            return offset_ + amp_ * std::cos(w * t) * space_factor(i);
        }
        case Kind::Sampled:
            return splines_[i].value(t);
        }
        return 0.0;
    }

    double space_factor(int i) const {
        if (kmode_ == 0) return 1.0;
        return std::cos(kmode_ * std::numbers::pi * (i + 0.5) * dx_ / Lx_);
    }

    Kind kind_ = Kind::Closed;
    int columns_ = 0;
    double period_ = 1.0;
    double tau_star_ = 0.0;
    // closed form
    double offset_ = 0.0, amp_ = 0.0, Lx_ = 1.0, dx_ = 1.0;
    int mmode_ = 0, kmode_ = 0;
    // samples
    std::vector<std::vector<double>> samples_;
    std::vector<detail::PeriodicSpline> splines_;
};

/// Build admissible time-periodic boundary data from a zero-mean periodic
/// driver f(t, x): solve rho0 cp d_t s - eta lap_x s = f on the bottom row by
/// Fourier diagonalization in time and cosine expansion in x (both compatible
/// with the zero-flux lateral condition), then shift by the sup so the result
/// is nonnegative with the same period.
///
/// The cosine symbol uses the continuous eigenvalue (k pi / Lx)^2, so a single
/// eigenmode driver reproduces the closed-form response amplitude exactly.
inline ZetaProfile make_admissible_zeta(const std::function<double(double, double)>& driver,
                                        const Grid& g, const PhysParams& params, double period,
                                        int nt = 128) {
    const int nx = g.nx;
    if (nt < 4) throw ConfigError("zeta driver: need at least 4 time samples");
    // Sample the driver at uniform times and cell centers.
    std::vector<std::vector<double>> f(nt, std::vector<double>(nx));
    double fscale = 0.0, fmean = 0.0;
    for (int m = 0; m < nt; ++m) {
        double t = m * period / nt;
        for (int i = 0; i < nx; ++i) {
            f[m][i] = driver(t, g.cell_x(i));
            fscale = std::max(fscale, std::abs(f[m][i]));
            fmean += f[m][i];
        }
    }
    fmean /= (nt * nx);
    if (fscale == 0.0)
        throw ConfigError("zeta driver: driver vanishes; the boundary data sup must be positive");
    if (std::abs(fmean) > 1e-10 * fscale)
        throw ConfigError("zeta driver: nonzero space-time mean");

    // Cosine transform in x per time sample: f_hat[m][k].
    std::vector<std::vector<double>> fk(nt, std::vector<double>(nx, 0.0));
    for (int m = 0; m < nt; ++m)
        for (int k = 0; k < nx; ++k) {
            double s = 0.0;
            for (int i = 0; i < nx; ++i)
                s += f[m][i] * std::cos(k * std::numbers::pi * (i + 0.5) / nx);
            fk[m][k] = s * 2.0 / nx; // mode amplitude (k = 0 halved below)
        }
    for (int m = 0; m < nt; ++m) fk[m][0] *= 0.5;

    // DFT in time per cosine mode, divide by the heat symbol, inverse DFT.
    const std::complex<double> I(0.0, 1.0);
    std::vector<std::vector<double>> s(nt, std::vector<double>(nx, 0.0));
    std::vector<std::complex<double>> hat(nt);
    for (int k = 0; k < nx; ++k) {
        double lam = params.eta * std::pow(k * std::numbers::pi / g.Lx, 2);
        for (int m = 0; m < nt; ++m) {
            std::complex<double> acc(0.0, 0.0);
            for (int q = 0; q < nt; ++q)
                acc += fk[q][k] * std::exp(-2.0 * std::numbers::pi * I * double(m * q) / double(nt));
            hat[m] = acc / double(nt);
        }
        for (int m = 0; m < nt; ++m) {
            int mm = (m <= nt / 2) ? m : m - nt;  // signed frequency
            double omega = 2.0 * std::numbers::pi * mm / period;
            std::complex<double> sym = I * params.rho0 * params.cp * omega + lam;
            if (k == 0 && mm == 0) { hat[m] = 0.0; continue; }  // zero-mean gauge
            hat[m] /= sym;
        }
        for (int q = 0; q < nt; ++q) {
            std::complex<double> acc(0.0, 0.0);
            for (int m = 0; m < nt; ++m)
                acc += hat[m] * std::exp(2.0 * std::numbers::pi * I * double(m * q) / double(nt));
            for (int i = 0; i < nx; ++i)
                s[q][i] += acc.real() * std::cos(k * std::numbers::pi * (i + 0.5) / nx);
        }
    }

    double smax = 0.0;
    for (auto& row : s)
        for (double v : row) smax = std::max(smax, std::abs(v));
    if (smax == 0.0)
        throw ConfigError("zeta driver: degenerate response; sup must be positive");
    for (auto& row : s)
        for (double& v : row) v += smax;
    return ZetaProfile::from_samples(std::move(s), period);
}

} // namespace ferroper
