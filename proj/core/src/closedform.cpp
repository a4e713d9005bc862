#include "kerrbath/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "kerrbath/error.hpp"

namespace kerrbath {

namespace {

const cplx I(0.0, 1.0);

// (1 - e^{-k t}) / k, continuous through k = 0.
cplx one_minus_exp_over(cplx k, double t) {
    const cplx z = k * t;
    if (std::abs(z) < 1e-5) return t * (1.0 - z / 2.0 + z * z / 6.0);
    return (1.0 - std::exp(-z)) / k;
}

}  // namespace

cplx alpha_closed(cplx alpha0, double mu_bar, double tau) {
    const double i0 = std::norm(alpha0);
    return alpha0 * std::exp(-I * (1.0 + mu_bar) * tau + i0 * (std::exp(-2.0 * I * mu_bar * tau) - 1.0));
}

double x_closed(cplx alpha0, double mu_bar, double tau) {
    return std::sqrt(2.0) * alpha_closed(alpha0, mu_bar, tau).real();
}

double ehrenfest_envelope(double tau, double tau_E, int n_bump, double tau_R, double tau_D) {
    if (n_bump < 0) throw ValidationError("bump index must be >= 0");
    const double c = tau - n_bump * tau_R;
    const double decay = n_bump == 0 ? 0.0 : n_bump * tau_R / tau_D;
    return std::exp(-decay - c * c / (2.0 * tau_E * tau_E));
}

cplx alpha_lindblad_rwa(cplx alpha0, double mu_bar, double gamma, double tau) {
    const double i0 = std::norm(alpha0);
    const cplx kappa = gamma + 2.0 * I * mu_bar;
    const cplx exponent = -I * (1.0 + mu_bar) * tau - 0.5 * gamma * tau -
                          2.0 * I * mu_bar * i0 * one_minus_exp_over(kappa, tau);
    return alpha0 * std::exp(exponent);
}

double decay_factor(cplx alpha0, double mu_bar, double gamma, double tau) {
    const double i0 = std::norm(alpha0);
    const double relax = 0.5 * gamma * tau;
    if (mu_bar == 0.0) return relax;
    const double m2 = 4.0 * mu_bar * mu_bar;
    const double damp = std::exp(-gamma * tau);
    const double phase = 2.0 * mu_bar * tau;
    return relax + (m2 * i0 / (m2 + gamma * gamma)) *
                       ((1.0 - damp * std::cos(phase)) - (gamma / (2.0 * mu_bar)) * damp * std::sin(phase));
}

FourierLines fourier_lines(cplx alpha0, double mu_bar, int n_first, int n_last) {
    if (!(mu_bar > 0.0)) throw ValidationError("Fourier lines need mu_bar > 0");
    if (n_last < n_first) throw ValidationError("empty line range");
    using GL = boost::math::quadrature::gauss<double, 20>;
    const double i0 = std::norm(alpha0);

    // Lambda(n) = (1/pi) int_0^pi exp(i0 (e^{2iu} - 1) - 2 i n u) du with u = mu_bar tau.
    auto lambda = [&](int n, int panels) {
        const double h = std::numbers::pi / panels;
        cplx sum = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double a = p * h;
            auto f = [&](double u) { return std::exp(i0 * (std::exp(2.0 * I * u) - 1.0) - 2.0 * I * double(n) * u); };
            const auto& x = GL::abscissa();
            const auto& w = GL::weights();
            const double c = a + 0.5 * h;
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double off = 0.5 * h * x[k];
                if (k == 0 && x[0] == 0.0) {
                    sum += w[k] * f(c);
                } else {
                    sum += w[k] * (f(c - off) + f(c + off));
                }
            }
        }
        return sum * (0.5 * h) / std::numbers::pi;
    };

    FourierLines out;
    for (int n = n_first; n <= n_last; ++n) {
        const int panels = 40 + static_cast<int>(std::ceil(2.0 * i0 + 2.0 * std::abs(n)));
        const cplx fine = lambda(n, 2 * panels);
        const cplx coarse = lambda(n, panels);
        SpectrumLine line;
        line.index = n;
        line.frequency = 1.0 + mu_bar * (2.0 * n + 1.0);
        line.weight = fine.real();
        line.amplitude = alpha0 * fine.real();
        out.max_error = std::max(out.max_error, std::abs(fine - coarse) + std::abs(fine.imag()));
        out.lines.push_back(line);
    }
    return out;
}

double gaussian_spectrum(cplx alpha0, double mu_bar, double omega) {
    const double i0 = std::norm(alpha0);
    if (!(i0 > 0.0) || !(mu_bar > 0.0)) throw ValidationError("Gaussian spectrum needs I0 > 0 and mu_bar > 0");
    const double x0 = std::sqrt(2.0) * alpha0.real();
    const double wcl = 1.0 + 2.0 * mu_bar * i0;
    const double dw = 2.0 * mu_bar * std::sqrt(i0);
    const double d = omega - wcl;
    return x0 / std::sqrt(4.0 * std::numbers::pi * i0) * std::exp(-d * d / (2.0 * dw * dw));
}

}  // namespace kerrbath
