#include "kerrbath/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kerrbath/error.hpp"

namespace kerrbath {

namespace {

using std::numbers::pi;

constexpr int kMaxDepth = 48;

// Folded integrands. With J extended as an odd function and F = J coth as an
// even one, every coefficient integral over omega in (0, inf) becomes an
// integral over the detuning x = |omega - Omega| of
//   h(x) = f(Omega + x) + f(Omega - x)   or   d(x) = f(Omega + x) - f(Omega - x)
// against sin(x tau)/x or (1 - cos(x tau))/x.
struct Bath {
    double gamma, lambda, beta;

    double j(double w) const {
        return gamma * w * lambda * lambda / (lambda * lambda + w * w);
    }
    // gamma L^2 w coth(beta w / 2) / (L^2 + w^2), even and smooth through 0.
    double f(double w) const {
        const double aw = std::abs(w);
        const double half = 0.5 * beta * aw;
        const double wcoth = half < 1e-8 ? 2.0 / beta : aw / std::tanh(half);
        return gamma * lambda * lambda * wcoth / (lambda * lambda + w * w);
    }
};

template <std::size_t K>
using Vec = std::array<double, K>;

template <std::size_t K>
struct Accum {
    Vec<K> value{};
    double error = 0.0;
};

// One Gauss-Kronrod 7/15 panel; returns the Kronrod value and the
// max-over-components |Kronrod - Gauss| estimate.
template <std::size_t K, class Fn>
double gk15(const Fn& fn, double a, double b, Vec<K>& out) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    static const auto& xk = GK::abscissa();
    static const auto& wk = GK::weights();
    static const auto& wg = G::weights();

    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Vec<K> kr{}, gr{};
    {
        const Vec<K> v = fn(c);
        for (std::size_t k = 0; k < K; ++k) {
            kr[k] = wk[0] * v[k];
            gr[k] = wg[0] * v[k];
        }
    }
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const Vec<K> lo = fn(c - h * xk[i]);
        const Vec<K> hi = fn(c + h * xk[i]);
        for (std::size_t k = 0; k < K; ++k) {
            const double s = lo[k] + hi[k];
            kr[k] += wk[i] * s;
            if (i % 2 == 0) gr[k] += wg[i / 2] * s;
        }
    }
    double err = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        out[k] = h * kr[k];
        err = std::max(err, std::abs(h * (kr[k] - gr[k])));
    }
    return err;
}

template <std::size_t K, class Fn>
void adapt(const Fn& fn, double a, double b, double tol_density, int depth, Accum<K>& acc) {
    Vec<K> v;
    const double err = gk15<K>(fn, a, b, v);
    if (err > tol_density * (b - a) && depth < kMaxDepth) {
        const double m = 0.5 * (a + b);
        adapt<K>(fn, a, m, tol_density, depth + 1, acc);
        adapt<K>(fn, m, b, tol_density, depth + 1, acc);
        return;
    }
    for (std::size_t k = 0; k < K; ++k) acc.value[k] += v[k];
    acc.error += err;
}

// Integrates fn over [0, w] on panels no wider than max_width, with a break at
// the resonance x = omega where F(Omega - x) has its steepest structure.
template <std::size_t K, class Fn>
Accum<K> integrate_range(const Fn& fn, double omega, double w, double max_width, double tol) {
    Accum<K> acc;
    const double tol_density = tol / w;
    std::array<double, 3> breaks{0.0, std::min(omega, w), w};
    for (int s = 0; s < 2; ++s) {
        const double a = breaks[s], b = breaks[s + 1];
        if (b <= a) continue;
        const auto panels = static_cast<long>(std::ceil((b - a) / max_width));
        const double step = (b - a) / static_cast<double>(panels);
        for (long i = 0; i < panels; ++i) {
            const double lo = a + step * static_cast<double>(i);
            const double hi = i + 1 == panels ? b : lo + step;
            adapt<K>(fn, lo, hi, tol_density, 0, acc);
        }
    }
    return acc;
}

// Scale used to turn the relative tolerance into an absolute one.
double coefficient_scale(const Bath& b, double omega) {
    const double l2 = b.lambda * b.lambda;
    return std::max({b.j(omega), b.f(omega), b.gamma * l2 * b.lambda / (l2 + omega * omega)});
}

double cutoff_width(const Bath& b, double omega) {
    return 50.0 * std::max({b.lambda, omega, 2.0 * pi / b.beta});
}

// int_W^inf phi(x) sin(x tau) dx by three integrations by parts.
template <class Phi>
double sin_tail(const Phi& phi, double w, double tau) {
    const double d = 1e-3 * w;
    const double p0 = phi(w);
    const double p1 = (phi(w + d) - phi(w - d)) / (2.0 * d);
    const double p2 = (phi(w + d) - 2.0 * p0 + phi(w - d)) / (d * d);
    const double s = std::sin(w * tau), c = std::cos(w * tau);
    return p0 * c / tau - p1 * s / (tau * tau) - p2 * c / (tau * tau * tau);
}

template <class Phi>
double cos_tail(const Phi& phi, double w, double tau) {
    const double d = 1e-3 * w;
    const double p0 = phi(w);
    const double p1 = (phi(w + d) - phi(w - d)) / (2.0 * d);
    const double p2 = (phi(w + d) - 2.0 * p0 + phi(w - d)) / (d * d);
    const double s = std::sin(w * tau), c = std::cos(w * tau);
    return -p0 * s / tau - p1 * c / (tau * tau) + p2 * s / (tau * tau * tau);
}

Bath make_bath(const BathSpec& s) { return {s.gamma, s.lambda_bar, s.beta_bar}; }

void check_bath(const BathSpec& s, double omega) {
    if (!(s.gamma >= 0.0) || !(s.lambda_bar > 0.0) || !(s.beta_bar > 0.0))
        throw ValidationError("bath requires gamma >= 0, lambda_bar > 0, beta_bar > 0");
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw ValidationError("coefficient frequency must be positive and finite");
}

[[noreturn]] void quadrature_failure(const char* what, double err, double tol) {
    std::ostringstream os;
    os << what << ": estimated error " << err << " exceeds tolerance " << tol;
    throw QuadratureError(os.str(), err);
}

}  // namespace

double spectral_density_at(const OhmicSpectralDensity& J, double omega_bar) {
    if (!(omega_bar >= 0.0)) throw ValidationError("spectral density needs omega_bar >= 0");
    const double l2 = J.lambda_bar * J.lambda_bar;
    return J.gamma * omega_bar * l2 / (l2 + omega_bar * omega_bar);
}

BathSpec bath_of(const SystemParams& p) { return {p.gamma, p.lambda_bar, p.beta_bar}; }

double asymptotic_b1(double omega, const BathSpec& bath) {
    check_bath(bath, omega);
    return 0.5 * make_bath(bath).f(omega);
}

double asymptotic_a2(double omega, const BathSpec& bath) {
    check_bath(bath, omega);
    return 0.5 * make_bath(bath).j(omega);
}

double asymptotic_a1(double omega, const BathSpec& bath) {
    check_bath(bath, omega);
    const double l = bath.lambda_bar;
    return bath.gamma * l * l * l / (2.0 * (l * l + omega * omega));
}

double asymptotic_b2(double omega, const BathSpec& bath, double* error_estimate) {
    check_bath(bath, omega);
    if (error_estimate) *error_estimate = 0.0;
    if (bath.gamma == 0.0) return 0.0;

    const Bath b = make_bath(bath);
    const double w = cutoff_width(b, omega);
    const double tol = 1e-9 * 2.0 * pi * coefficient_scale(b, omega);

    // PV int d(x)/x dx; the folding removes the pole at x = 0.
    auto body = [&](double x) {
        return Vec<1>{(b.f(omega + x) - b.f(omega - x)) / x};
    };
    auto head = integrate_range<1>(body, omega, w, w / 64.0, tol);
    // Remainder on (W, inf) through x = W/u.
    auto tail_fn = [&](double u) {
        const double x = w / u;
        return Vec<1>{(b.f(omega + x) - b.f(omega - x)) / u};
    };
    Accum<1> tail;
    adapt<1>(tail_fn, 0.0, 1.0, tol, 0, tail);

    const double err = (head.error + tail.error) / (2.0 * pi);
    if (error_estimate) *error_estimate = err;
    return -(head.value[0] + tail.value[0]) / (2.0 * pi);
}

LevelCoefficients asymptotic_at(double omega, const BathSpec& bath) {
    LevelCoefficients c;
    c.omega = omega;
    c.a1 = asymptotic_a1(omega, bath);
    c.a2 = asymptotic_a2(omega, bath);
    c.b1 = asymptotic_b1(omega, bath);
    c.b2 = asymptotic_b2(omega, bath);
    return c;
}

LevelCoefficients transient_at(double omega, const BathSpec& bath, double tau, double rel_tol,
                               double* error_estimate) {
    check_bath(bath, omega);
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("transient coefficients need tau > 0");
    if (error_estimate) *error_estimate = 0.0;
    LevelCoefficients c;
    c.omega = omega;
    if (bath.gamma == 0.0) return c;

    const Bath b = make_bath(bath);
    const double w = std::max(cutoff_width(b, omega), 100.0 / tau);
    const double tol = rel_tol * 2.0 * pi * coefficient_scale(b, omega);

    // Components: S_J, G_J, S_F, G_F.
    auto body = [&](double x) {
        const double jp = b.j(omega + x), jm = b.j(omega - x);
        const double fp = b.f(omega + x), fm = b.f(omega - x);
        const double s = std::sin(x * tau) / x;
        const double g = 2.0 * std::pow(std::sin(0.5 * x * tau), 2) / x;
        return Vec<4>{(jp + jm) * s, (jp - jm) * g, (fp + fm) * s, (fp - fm) * g};
    };
    auto head = integrate_range<4>(body, omega, w, std::min(pi / tau, w / 64.0), tol);

    auto hj = [&](double x) { return (b.j(omega + x) + b.j(omega - x)) / x; };
    auto dj = [&](double x) { return (b.j(omega + x) - b.j(omega - x)) / x; };
    auto hf = [&](double x) { return (b.f(omega + x) + b.f(omega - x)) / x; };
    auto df = [&](double x) { return (b.f(omega + x) - b.f(omega - x)) / x; };

    auto flat = [&](double u) {
        const double x = w / u;
        return Vec<2>{(b.j(omega + x) - b.j(omega - x)) / u, (b.f(omega + x) - b.f(omega - x)) / u};
    };
    Accum<2> flat_tail;
    adapt<2>(flat, 0.0, 1.0, tol, 0, flat_tail);

    const double s_j = head.value[0] + sin_tail(hj, w, tau);
    const double g_j = head.value[1] + flat_tail.value[0] - cos_tail(dj, w, tau);
    const double s_f = head.value[2] + sin_tail(hf, w, tau);
    const double g_f = head.value[3] + flat_tail.value[1] - cos_tail(df, w, tau);

    c.a1 = g_j / (2.0 * pi);
    c.a2 = s_j / (2.0 * pi);
    c.b1 = s_f / (2.0 * pi);
    c.b2 = -g_f / (2.0 * pi);

    const double err = head.error + flat_tail.error;
    if (err > 10.0 * tol) quadrature_failure("transient coefficient quadrature", err / (2.0 * pi), tol / (2.0 * pi));
    if (error_estimate) *error_estimate = err / (2.0 * pi);
    return c;
}

double level_frequency(double mu_bar, int n) { return 1.0 + mu_bar * (1.0 + 2.0 * n); }

BathCoefficients asymptotic_coefficients(const SystemParams& p, int levels) {
    require_valid(p);
    if (levels < 1) throw ValidationError("need at least one level");
    BathCoefficients out;
    out.mode = BathCoefficients::Mode::asymptotic;
    out.levels.reserve(static_cast<std::size_t>(levels));
    const BathSpec bath = bath_of(p);
    for (int n = 0; n < levels; ++n) {
        const double omega = level_frequency(p.mu_bar, n);
        LevelCoefficients c;
        c.omega = omega;
        c.a1 = asymptotic_a1(omega, bath);
        c.a2 = asymptotic_a2(omega, bath);
        c.b1 = asymptotic_b1(omega, bath);
        double err = 0.0;
        c.b2 = asymptotic_b2(omega, bath, &err);
        out.max_error = std::max(out.max_error, err);
        out.levels.push_back(c);
    }
    return out;
}

BathCoefficients transient_coefficients(const SystemParams& p, int levels, double tau) {
    require_valid(p);
    if (levels < 1) throw ValidationError("need at least one level");
    BathCoefficients out;
    out.mode = BathCoefficients::Mode::transient;
    out.tau = tau;
    out.levels.reserve(static_cast<std::size_t>(levels));
    const BathSpec bath = bath_of(p);
    for (int n = 0; n < levels; ++n) {
        double err = 0.0;
        out.levels.push_back(transient_at(level_frequency(p.mu_bar, n), bath, tau, 1e-6, &err));
        out.max_error = std::max(out.max_error, err);
    }
    return out;
}

double effective_frequency(const SystemParams& p) {
    require_valid(p);
    const double omega = p.omega_bar();
    const double l = p.lambda_bar;
    const double radicand = omega * omega - p.gamma * l * l * l / (l * l + omega * omega);
    if (!(radicand > 0.0)) throw ValidationError("over-damped: renormalized frequency is not real");
    return std::sqrt(radicand);
}

double settling_time(const BathSpec& bath) {
    return 30.0 / std::min(bath.lambda_bar, 2.0 * pi / bath.beta_bar);
}

}  // namespace kerrbath
