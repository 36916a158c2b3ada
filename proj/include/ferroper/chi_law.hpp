#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "ferroper/errors.hpp"

namespace ferroper {

/// Argument threshold below which the vector flux is linearized; keeps
/// chi(|xi|) xi / |xi| defined through the origin.
inline constexpr double kFluxLinearizationRadius = 1e-12;

/// A magnetization law: the scalar susceptibility curve chi >= 0 with
/// chi(0) = 0, its derivative bound, the primitive kappa(s) = int_0^s chi,
/// and the vector flux a(xi) = chi(|xi|) xi/|xi|.
///
/// Built-in curves: the Langevin function coth(s) - 1/s, arctan(b s) with
/// slope b > 0, and a tabulated monotone C1 interpolant.
class ChiLaw {
public:
    enum class Kind { Langevin, Arctan, TabulatedC1 };

    static ChiLaw langevin() {
        ChiLaw l;
        l.kind_ = Kind::Langevin;
        l.chi0_ = 1.0;
        l.chi1_ = 1.0 / 3.0;
        l.chi_prime0_ = 1.0 / 3.0;
        return l;
    }

    static ChiLaw arctan(double slope) {
        if (!(slope > 0.0)) throw ConfigError("arctan law: slope must be positive");
        ChiLaw l;
        l.kind_ = Kind::Arctan;
        l.slope_ = slope;
        l.chi0_ = std::numbers::pi / 2.0;
        l.chi1_ = slope;
        l.chi_prime0_ = slope;
        return l;
    }

    /// Monotone cubic Hermite interpolant of (s_i, chi_i); constant beyond the
    /// last node. Nodes must start at (0, 0) and be nondecreasing; the caller
    /// supplies the bounds required of any admissible curve.
    static ChiLaw tabulated(std::vector<double> s, std::vector<double> chi, double chi0, double chi1) {
        if (s.size() < 2 || s.size() != chi.size())
            throw ConfigError("tabulated law: need matching node arrays with at least 2 entries");
        if (s.front() != 0.0 || chi.front() != 0.0)
            throw ConfigError("tabulated law: first node must be (0, 0)");
        if (!(chi0 > 0.0) || !(chi1 > 0.0))
            throw ConfigError("tabulated law: bounds must be positive");
        for (std::size_t k = 1; k < s.size(); ++k) {
            if (!(s[k] > s[k - 1])) throw ConfigError("tabulated law: abscissae must increase");
            if (chi[k] < chi[k - 1]) throw ConfigError("tabulated law: values must be nondecreasing");
            if (chi[k] > chi0) throw ConfigError("tabulated law: values exceed the stated bound");
        }
        ChiLaw l;
        l.kind_ = Kind::TabulatedC1;
        l.chi0_ = chi0;
        l.chi1_ = chi1;
        l.ts_ = std::move(s);
        l.tv_ = std::move(chi);
        l.build_hermite();
        l.chi_prime0_ = l.tm_.front();
        return l;
    }

    Kind kind() const { return kind_; }
    double chi0() const { return chi0_; }
    double chi1() const { return chi1_; }
    double chi_prime_at_zero() const { return chi_prime0_; }

    double chi(double s) const {
        require_nonneg(s);
        switch (kind_) {
        case Kind::Langevin: return langevin_value(s);
        case Kind::Arctan: return std::atan(slope_ * s);
        case Kind::TabulatedC1: return hermite_value(s);
        }
        return 0.0;
    }

    double chi_prime(double s) const {
        require_nonneg(s);
        switch (kind_) {
        case Kind::Langevin: return langevin_derivative(s);
        case Kind::Arctan: return slope_ / (1.0 + slope_ * slope_ * s * s);
        case Kind::TabulatedC1: return hermite_derivative(s);
        }
        return 0.0;
    }

    /// Primitive kappa(s) = int_0^s chi(r) dr; kappa(0) = 0, convex,
    /// Lipschitz with constant chi0.
    double kappa(double s) const {
        require_nonneg(s);
        switch (kind_) {
        case Kind::Langevin: return langevin_primitive(s);
        case Kind::Arctan: {
            double bs = slope_ * s;
            return s * std::atan(bs) - std::log1p(bs * bs) / (2.0 * slope_);
        }
        case Kind::TabulatedC1: return hermite_primitive(s);
        }
        return 0.0;
    }

    /// Vector flux a(xi) = chi(|xi|) xi/|xi|, linearized as chi'(0) xi below
    /// the small-argument radius.
    template <std::size_t N>
    std::array<double, N> flux(const std::array<double, N>& xi) const {
        double r2 = 0.0;
        for (double c : xi) r2 += c * c;
        double r = std::sqrt(r2);
        std::array<double, N> out{};
        if (r < kFluxLinearizationRadius) {
            for (std::size_t k = 0; k < N; ++k) out[k] = chi_prime0_ * xi[k];
            return out;
        }
        double scale = chi(r) / r;
        for (std::size_t k = 0; k < N; ++k) out[k] = scale * xi[k];
        return out;
    }

    /// Scalar convenience: the factor chi(|xi|)/|xi| with its limit at zero.
    double flux_scale(double r) const {
        if (r < kFluxLinearizationRadius) return chi_prime0_;
        return chi(r) / r;
    }

    /// Jacobian of the flux: chi'(r) on the radial direction, chi(r)/r on the
    /// tangential ones; chi'(0) I at the origin.
    template <std::size_t N>
    std::array<std::array<double, N>, N> flux_hessian(const std::array<double, N>& xi) const {
        std::array<std::array<double, N>, N> h{};
        double r2 = 0.0;
        for (double c : xi) r2 += c * c;
        double r = std::sqrt(r2);
        if (r < kFluxLinearizationRadius) {
            for (std::size_t k = 0; k < N; ++k) h[k][k] = chi_prime0_;
            return h;
        }
        double radial = chi_prime(r);
        double tangential = chi(r) / r;
        for (std::size_t a = 0; a < N; ++a)
            for (std::size_t b = 0; b < N; ++b) {
                double om = xi[a] * xi[b] / r2;
                h[a][b] = (radial - tangential) * om + (a == b ? tangential : 0.0);
            }
        return h;
    }

private:
    static void require_nonneg(double s) {
        if (!(s >= 0.0)) throw SolverError("chi law: negative argument");
    }

    static double langevin_value(double s) {
        if (s < 1e-4) {
            // coth(s) - 1/s cancels catastrophically near zero.
            double s2 = s * s;
            return s * (1.0 / 3.0 - s2 / 45.0 + 2.0 * s2 * s2 / 945.0);
        }
        return 1.0 / std::tanh(s) - 1.0 / s;
    }

    static double langevin_derivative(double s) {
        if (s < 1e-4) {
            double s2 = s * s;
            return 1.0 / 3.0 - s2 / 15.0 + 2.0 * s2 * s2 / 189.0;
        }
        if (s > 350.0) return 1.0 / (s * s); // csch^2 underflows
        double sh = std::sinh(s);
        return 1.0 / (s * s) - 1.0 / (sh * sh);
    }

    static double langevin_primitive(double s) {
        // kappa(s) = log(sinh(s)/s); verified by differentiation.
        if (s < 1e-4) {
            double s2 = s * s;
            return s2 / 6.0 - s2 * s2 / 180.0;
        }
        if (s > 30.0) return s - std::log(2.0 * s) + std::log1p(-std::exp(-2.0 * s));
        return std::log(std::sinh(s) / s);
    }

    // --- tabulated curve (Fritsch-Carlson monotone Hermite) ---

    void build_hermite() {
        const std::size_t n = ts_.size();
        std::vector<double> delta(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k)
            delta[k] = (tv_[k + 1] - tv_[k]) / (ts_[k + 1] - ts_[k]);
        tm_.assign(n, 0.0);
        tm_[0] = delta[0];
        tm_[n - 1] = delta[n - 2];
        for (std::size_t k = 1; k + 1 < n; ++k)
            tm_[k] = (delta[k - 1] * delta[k] <= 0.0) ? 0.0 : 0.5 * (delta[k - 1] + delta[k]);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (delta[k] == 0.0) { tm_[k] = tm_[k + 1] = 0.0; continue; }
            double a = tm_[k] / delta[k], b = tm_[k + 1] / delta[k];
            double s2 = a * a + b * b;
            if (s2 > 9.0) {
                double t = 3.0 / std::sqrt(s2);
                tm_[k] = t * a * delta[k];
                tm_[k + 1] = t * b * delta[k];
            }
        }
        for (double& m : tm_) m = std::clamp(m, 0.0, chi1_);
        // Cumulative integrals of the segments for kappa.
        tk_.assign(n, 0.0);
        for (std::size_t k = 0; k + 1 < n; ++k)
            tk_[k + 1] = tk_[k] + segment_integral(k, ts_[k + 1]);
    }

    std::size_t segment_of(double s) const {
        std::size_t lo = 0, hi = ts_.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (ts_[mid] <= s ? lo : hi) = mid;
        }
        return lo;
    }

    double hermite_value(double s) const {
        if (s >= ts_.back()) return tv_.back();
        std::size_t k = segment_of(s);
        double h = ts_[k + 1] - ts_[k], t = (s - ts_[k]) / h;
        double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * tv_[k] + (t3 - 2 * t2 + t) * h * tm_[k]
             + (-2 * t3 + 3 * t2) * tv_[k + 1] + (t3 - t2) * h * tm_[k + 1];
    }

    double hermite_derivative(double s) const {
        if (s >= ts_.back()) return 0.0;
        std::size_t k = segment_of(s);
        double h = ts_[k + 1] - ts_[k], t = (s - ts_[k]) / h;
        double t2 = t * t;
        return ((6 * t2 - 6 * t) * tv_[k] + (3 * t2 - 4 * t + 1) * h * tm_[k]
              + (-6 * t2 + 6 * t) * tv_[k + 1] + (3 * t2 - 2 * t) * h * tm_[k + 1]) / h;
    }

    /// Integral of the Hermite segment k from ts_[k] to s (s within the segment).
    double segment_integral(std::size_t k, double s) const {
        double h = ts_[k + 1] - ts_[k], t = (s - ts_[k]) / h;
        double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
        double i00 = 0.5 * t4 - t3 + t;             // int of 2t^3-3t^2+1
        double i10 = 0.25 * t4 - (2.0 / 3.0) * t3 + 0.5 * t2; // int of t^3-2t^2+t
        double i01 = -0.5 * t4 + t3;                 // int of -2t^3+3t^2
        double i11 = 0.25 * t4 - t3 / 3.0;           // int of t^3-t^2
        return h * (i00 * tv_[k] + i10 * h * tm_[k] + i01 * tv_[k + 1] + i11 * h * tm_[k + 1]);
    }

    double hermite_primitive(double s) const {
        if (s >= ts_.back())
            return tk_.back() + tv_.back() * (s - ts_.back());
        std::size_t k = segment_of(s);
        return tk_[k] + segment_integral(k, s);
    }

    Kind kind_ = Kind::Langevin;
    double slope_ = 0.0;
    double chi0_ = 1.0, chi1_ = 1.0 / 3.0, chi_prime0_ = 1.0 / 3.0;
    std::vector<double> ts_, tv_, tm_, tk_;
};

} // namespace ferroper
