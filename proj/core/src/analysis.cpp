#include "kerrbath/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <fftw3.h>

#include "kerrbath/error.hpp"

namespace kerrbath {

namespace {

struct LinearFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd stderr_;
    double rms = 0.0;
};

// Unweighted least squares y ~ A c.
LinearFit least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
    if (a.rows() < a.cols()) throw FitError("not enough points for the fit");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < a.cols()) throw FitError("ill-conditioned fit: design matrix is rank deficient");
    LinearFit f;
    f.coef = qr.solve(y);
    const Eigen::VectorXd r = y - a * f.coef;
    f.rms = std::sqrt(r.squaredNorm() / static_cast<double>(a.rows()));
    const long dof = a.rows() - a.cols();
    f.stderr_ = Eigen::VectorXd::Zero(a.cols());
    if (dof > 0) {
        const double s2 = r.squaredNorm() / static_cast<double>(dof);
        const Eigen::MatrixXd cov = (a.transpose() * a).inverse() * s2;
        for (long k = 0; k < a.cols(); ++k) f.stderr_(k) = std::sqrt(std::max(0.0, cov(k, k)));
    }
    return f;
}

void interval(DecoherenceFit& fit, double rate, double se, double scale) {
    const double lo = rate - 1.96 * se, hi = rate + 1.96 * se;
    fit.ci_low = scale / hi;
    fit.ci_high = lo > 0.0 ? scale / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

std::string_view to_string(DecoherenceMethod m) {
    switch (m) {
        case DecoherenceMethod::peak_ratio: return "peak-ratio";
        case DecoherenceMethod::cat_overlap: return "cat-overlap";
        case DecoherenceMethod::recurrence_envelope: return "recurrence-envelope";
    }
    return "unknown";
}

std::vector<Peak> extract_envelope_peaks(const std::vector<double>& tau, const std::vector<double>& x,
                                         double floor_fraction) {
    if (tau.size() != x.size()) throw FitError("time and value series differ in length");
    const std::size_t n = x.size();
    std::vector<Peak> out;
    if (n < 3) throw FitError("series too short for peak extraction");
    double top = 0.0;
    for (double v : x) top = std::max(top, std::abs(v));
    const double floor = floor_fraction * top;

    auto y = [&](std::size_t i) { return std::abs(x[i]); };
    if (y(0) > y(1) && y(0) > floor) out.push_back({tau[0], y(0)});
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double ym = y(i - 1), y0 = y(i), yp = y(i + 1);
        if (!(y0 >= ym && y0 > yp) || y0 <= floor) continue;
        const double curv = ym - 2.0 * y0 + yp;
        double off = 0.0, h = y0;
        if (curv < 0.0) {
            off = 0.5 * (ym - yp) / curv;
            h = y0 - 0.25 * (ym - yp) * off;
        }
        const double step = tau[i + 1] - tau[i];
        out.push_back({tau[i] + off * step, h});
    }
    if (out.empty()) throw FitError("no envelope peaks above the noise floor");
    return out;
}

std::vector<Peak> peaks_near(const std::vector<Peak>& peaks, double center, double half_width) {
    std::vector<Peak> out;
    for (const auto& p : peaks)
        if (std::abs(p.tau - center) <= half_width) out.push_back(p);
    return out;
}

BumpFit fit_ehrenfest_bump(const std::vector<Peak>& peaks, int n, double tau_R) {
    if (peaks.size() < 5) throw FitError("bump fit needs at least 5 peaks");
    const double c = n * tau_R;
    const auto m = static_cast<long>(peaks.size());
    Eigen::MatrixXd a(m, 2), q(m, 3);
    Eigen::VectorXd y(m);
    for (long i = 0; i < m; ++i) {
        const auto& p = peaks[static_cast<std::size_t>(i)];
        if (!(p.height > 0.0)) throw FitError("bump fit needs positive heights");
        const double t = p.tau - c;
        a(i, 0) = 1.0;
        a(i, 1) = t * t;
        q(i, 0) = 1.0;
        q(i, 1) = t;
        q(i, 2) = t * t;
        y(i) = std::log(p.height);
    }
    const LinearFit f = least_squares(a, y);
    if (!(f.coef(1) < 0.0)) throw FitError("ill-conditioned bump fit: envelope not concave");

    BumpFit out;
    out.n = n;
    out.center = c;
    out.tau_E = std::sqrt(-0.5 / f.coef(1));
    out.peak_height = std::exp(f.coef(0));
    out.residual_norm = f.rms;
    out.points = peaks.size();
    out.free_center = c;
    try {
        const LinearFit g = least_squares(q, y);
        if (g.coef(2) < 0.0) out.free_center = c - 0.5 * g.coef(1) / g.coef(2);
    } catch (const FitError&) {
        // Degenerate placement (e.g. all on one side at equal spacing); keep c.
    }
    return out;
}

DecoherenceFit fit_recurrence_decay(const std::vector<double>& heights, double tau_R) {
    if (heights.size() < 2)
        throw FitError("recurrence decay needs two resolved bumps; use the cat-overlap method");
    const auto m = static_cast<long>(heights.size());
    Eigen::MatrixXd a(m, 2);
    Eigen::VectorXd y(m);
    for (long i = 0; i < m; ++i) {
        const double h = heights[static_cast<std::size_t>(i)];
        if (!(h > 0.0)) throw FitError("recurrence bump unresolved; use the cat-overlap method");
        a(i, 0) = 1.0;
        a(i, 1) = static_cast<double>(i);
        y(i) = std::log(h);
    }
    const LinearFit f = least_squares(a, y);
    const double s = -f.coef(1);
    if (!(s > 0.0)) throw FitError("recurrence heights do not decay; use the cat-overlap method");
    DecoherenceFit out;
    out.method = DecoherenceMethod::peak_ratio;
    out.rate = s / tau_R;
    out.tau_D = tau_R / s;
    out.residual_norm = f.rms;
    interval(out, s, f.stderr_(1), tau_R);
    return out;
}

RelaxationFit fit_relaxation_decay(const std::vector<double>& tau, const std::vector<double>& x,
                                   double tau_E_model) {
    const auto peaks = extract_envelope_peaks(tau, x);
    if (peaks.size() < 3) throw FitError("relaxation fit needs at least 3 peaks");
    const auto m = static_cast<long>(peaks.size());
    Eigen::MatrixXd a(m, 2);
    Eigen::VectorXd y(m);
    for (long i = 0; i < m; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = peaks[static_cast<std::size_t>(i)].tau;
        y(i) = std::log(peaks[static_cast<std::size_t>(i)].height);
    }
    const LinearFit f = least_squares(a, y);
    if (!(f.coef(1) < 0.0)) throw FitError("envelope does not decay");

    RelaxationFit out;
    out.tau_gamma = -1.0 / f.coef(1);
    out.amplitude = std::exp(f.coef(0));
    out.residual_norm = f.rms;
    out.span_ok = tau.back() - tau.front() >= 2.0 * out.tau_gamma;
    if (tau_E_model > 0.0) {
        // Only the amplitude is free in the Gaussian model.
        Eigen::VectorXd z(m);
        for (long i = 0; i < m; ++i) {
            const double t = a(i, 1);
            z(i) = y(i) + t * t / (2.0 * tau_E_model * tau_E_model);
        }
        const double c = z.mean();
        out.gaussian_residual_norm = std::sqrt((z.array() - c).square().sum() / static_cast<double>(m));
        out.gaussian_rejected = out.gaussian_residual_norm >= 5.0 * out.residual_norm;
    }
    return out;
}

Spectrum discrete_spectrum(const std::vector<double>& x, double dt, SpectrumOptions opt) {
    if (x.size() < 2) throw FitError("spectrum needs at least two samples");
    if (!(dt > 0.0)) throw ValidationError("sample spacing must be > 0");
    const std::size_t n = x.size();
    const std::size_t len = n * static_cast<std::size_t>(std::max(1, opt.zero_pad));

    std::vector<double> in(len, 0.0);
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = opt.hann ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1)) : 1.0;
        in[i] = w * x[i];
        wsum += w;
    }
    const std::size_t bins = len / 2 + 1;
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins));
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(len), in.data(), out, FFTW_ESTIMATE);
    fftw_execute(plan);

    Spectrum s;
    s.d_omega = 2.0 * std::numbers::pi / (static_cast<double>(len) * dt);
    s.omega.resize(bins);
    s.re.resize(bins);
    s.im.resize(bins);
    s.magnitude.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const double scale = (k == 0 ? 1.0 : 2.0) / wsum;
        s.omega[k] = s.d_omega * static_cast<double>(k);
        s.re[k] = scale * out[k][0];
        s.im[k] = scale * out[k][1];
        s.magnitude[k] = std::hypot(s.re[k], s.im[k]);
    }
    fftw_destroy_plan(plan);
    fftw_free(out);
    return s;
}

SpectrumFit fit_spectral_width(const Spectrum& s, double threshold_fraction) {
    const std::size_t n = s.magnitude.size();
    if (n < 7) throw FitError("spectrum too short for a width fit");

    // In-phase component relative to the dominant bin; the quadrature part of a
    // transform starting at a bump maximum carries a broad Dawson-like tail.
    std::size_t kmax = 0;
    for (std::size_t k = 1; k < n; ++k)
        if (s.magnitude[k] > s.magnitude[kmax]) kmax = k;
    const double ph = std::atan2(s.im[kmax], s.re[kmax]);
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = s.re[k] * std::cos(ph) + s.im[k] * std::sin(ph);
    const double ymax = y[kmax];
    const double thr = threshold_fraction * ymax;

    std::vector<std::size_t> maxima;
    for (std::size_t k = 1; k + 1 < n; ++k)
        if (y[k] > thr && y[k] >= y[k - 1] && y[k] > y[k + 1]) maxima.push_back(k);

    // Contiguous lobe around the dominant bin.
    std::size_t lo = kmax, hi = kmax;
    while (lo > 0 && y[lo - 1] > thr) --lo;
    while (hi + 1 < n && y[hi + 1] > thr) ++hi;
    const std::size_t lobe_maxima = static_cast<std::size_t>(
        std::count_if(maxima.begin(), maxima.end(), [&](std::size_t k) { return k >= lo && k <= hi; }));

    SpectrumFit out;
    std::vector<std::pair<double, double>> pts;
    if (maxima.size() >= 5 && lobe_maxima <= 2) {
        // Line comb: walk outwards over line maxima until they drop below threshold.
        out.comb = true;
        const auto centre = std::find(maxima.begin(), maxima.end(), kmax);
        if (centre == maxima.end()) throw FitError("dominant bin is not a line maximum");
        auto refine = [&](std::size_t k) {
            const double ym = y[k - 1], y0 = y[k], yp = y[k + 1];
            const double curv = ym - 2.0 * y0 + yp;
            double off = 0.0, h = y0;
            if (curv < 0.0) {
                off = 0.5 * (ym - yp) / curv;
                h = y0 - 0.25 * (ym - yp) * off;
            }
            return std::make_pair(s.omega[k] + off * s.d_omega, h);
        };
        std::vector<std::size_t> gaps;
        for (std::size_t i = 1; i < maxima.size(); ++i) gaps.push_back(maxima[i] - maxima[i - 1]);
        std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
        const double spacing = static_cast<double>(gaps[gaps.size() / 2]);
        auto first = centre, last = centre;
        while (first != maxima.begin() && static_cast<double>(*first - *(first - 1)) <= 2.5 * spacing) --first;
        while (last + 1 != maxima.end() && static_cast<double>(*(last + 1) - *last) <= 2.5 * spacing) ++last;
        for (auto it = first; it <= last; ++it) pts.push_back(refine(*it));
        lo = *first;
        hi = *last;
    } else {
        for (std::size_t k = lo; k <= hi; ++k) pts.emplace_back(s.omega[k], y[k]);
    }
    for (std::size_t k = 0; k < n; ++k)
        if ((k < lo || k > hi) && y[k] > 0.5 * ymax) {
            out.warning = "multi-modal spectrum: fit restricted to the dominant lobe";
            break;
        }
    if (pts.size() < 5) throw FitError("too few spectral points above threshold for a width fit");

    const auto m = static_cast<long>(pts.size());
    const double w0 = s.omega[kmax];
    Eigen::MatrixXd a(m, 3);
    Eigen::VectorXd v(m);
    for (long i = 0; i < m; ++i) {
        const double d = pts[static_cast<std::size_t>(i)].first - w0;
        a(i, 0) = 1.0;
        a(i, 1) = d;
        a(i, 2) = d * d;
        v(i) = std::log(pts[static_cast<std::size_t>(i)].second);
    }
    const LinearFit f = least_squares(a, v);
    if (!(f.coef(2) < 0.0)) throw FitError("spectral lobe is not concave in log space");
    out.width = std::sqrt(-0.5 / f.coef(2));
    out.center = w0 - 0.5 * f.coef(1) / f.coef(2);
    out.tau_E_estimate = 1.0 / out.width;
    out.residual_norm = f.rms;
    out.points = pts.size();
    return out;
}

DecoherenceFit cat_offdiagonal_rate(const std::vector<double>& tau, const std::vector<double>& overlap_abs,
                                    double delta_x, double floor) {
    if (tau.size() != overlap_abs.size() || tau.size() < 3) throw FitError("overlap series too short");
    if (!(delta_x > 0.0)) throw ValidationError("delta_x must be > 0");
    const double cut = floor * std::abs(overlap_abs.front());
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (!(overlap_abs[i] > cut)) break;
        pts.emplace_back(tau[i], std::log(overlap_abs[i]));
    }
    if (pts.size() < 3) throw FitError("overlap fell below the numeric floor before the fit window ended");
    const auto m = static_cast<long>(pts.size());
    Eigen::MatrixXd a(m, 2);
    Eigen::VectorXd y(m);
    for (long i = 0; i < m; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = pts[static_cast<std::size_t>(i)].first;
        y(i) = pts[static_cast<std::size_t>(i)].second;
    }
    const LinearFit f = least_squares(a, y);
    const double r = -f.coef(1);
    if (!(r > 0.0)) throw FitError("overlap does not decay");
    DecoherenceFit out;
    out.method = DecoherenceMethod::cat_overlap;
    out.rate = r;
    out.tau_D = 1.0 / r;
    out.b1_estimate = r / (2.0 * delta_x * delta_x);
    out.residual_norm = f.rms;
    interval(out, r, f.stderr_(1), 1.0);
    return out;
}

DecoherenceFit fit_interaction_decay(const std::vector<double>& tau,
                                     const std::vector<std::complex<double>>& a_interaction,
                                     double alpha_abs, double mu_bar) {
    if (tau.size() != a_interaction.size() || tau.size() < 3) throw FitError("amplitude series too short");
    if (!(alpha_abs > 0.0)) throw ValidationError("initial amplitude must be nonzero");
    const auto m = static_cast<long>(tau.size());
    Eigen::MatrixXd a(m, 2);
    Eigen::VectorXd y(m);
    for (long i = 0; i < m; ++i) {
        const double t = tau[static_cast<std::size_t>(i)];
        const double mag = std::abs(a_interaction[static_cast<std::size_t>(i)]);
        if (!(mag > 0.0)) throw FitError("interaction-frame amplitude vanished");
        a(i, 0) = mu_bar > 0.0 ? t - std::sin(2.0 * mu_bar * t) / (2.0 * mu_bar) : 0.0;
        a(i, 1) = t;
        y(i) = -std::log(mag / alpha_abs);
    }
    const LinearFit f = least_squares(a, y);
    const double r = f.coef(0);
    if (!(r > 0.0)) throw FitError("no decoherence signal in the interaction-frame amplitude");
    DecoherenceFit out;
    out.method = DecoherenceMethod::recurrence_envelope;
    out.rate = r;
    out.secondary_rate = f.coef(1);
    out.tau_D = 1.0 / r;
    out.residual_norm = f.rms;
    interval(out, r, f.stderr_(0), 1.0);
    return out;
}

}  // namespace kerrbath
