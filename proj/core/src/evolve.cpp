#include "kerrbath/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace kerrbath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix diag_of(const BathCoefficients& c, int dim, double LevelCoefficients::*field) {
    if (static_cast<int>(c.levels.size()) < dim)
        throw ValidationError("coefficient table shorter than the Fock dimension");
    Matrix d = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) d(k, k) = c.levels[static_cast<std::size_t>(k)].*field;
    return d;
}

// A1 a + a^dagger A1 + i (A2 a - a^dagger A2) for diagonal A1, A2.
Matrix coupling_operator(const LadderOperators& ops, const Matrix& c1, const Matrix& c2) {
    const cplx i(0.0, 1.0);
    return c1 * ops.a + ops.adag * c1 + i * (c2 * ops.a - ops.adag * c2);
}

Matrix hamiltonian(const LadderOperators& ops, double mu_bar) { return ops.n + mu_bar * ops.n * ops.n; }

}  // namespace

std::string_view to_string(EvolutionMode m) {
    switch (m) {
        case EvolutionMode::closed: return "closed";
        case EvolutionMode::born_markov_asymptotic: return "born-markov-asymptotic";
        case EvolutionMode::born_markov_transient: return "born-markov-transient";
        case EvolutionMode::lindblad_rwa: return "lindblad-rwa";
    }
    return "unknown";
}

EvolutionMode parse_mode(std::string_view name) {
    for (auto m : {EvolutionMode::closed, EvolutionMode::born_markov_asymptotic,
                   EvolutionMode::born_markov_transient, EvolutionMode::lindblad_rwa})
        if (to_string(m) == name) return m;
    if (name == "born-markov") return EvolutionMode::born_markov_asymptotic;
    throw ValidationError("unknown evolution mode '" + std::string(name) + "'");
}

std::string_view to_string(Stepper s) {
    return s == Stepper::rk4 ? "rk4" : "if-rk4";
}

Stepper parse_stepper(std::string_view name) {
    if (name == "rk4") return Stepper::rk4;
    if (name == "if-rk4") return Stepper::integrating_factor;
    throw ValidationError("unknown stepper '" + std::string(name) + "'");
}

double default_step(const SystemParams& p, int dim) {
    const double top = 1.0 + p.mu_bar * (1.0 + 2.0 * (dim - 1));
    double dt = 0.02 / top;
    if (p.mu_bar > 0.0) dt = std::min(dt, 1.0 / (2.0 * p.mu_bar * std::sqrt(p.intensity)) / 200.0);
    const double spread = (dim - 1) + p.mu_bar * (dim - 1.0) * (dim - 1.0);
    return std::min(dt, 2.0 / spread);
}

double Trajectory::max_trace_error() const {
    double w = 0.0;
    for (double t : trace) w = std::max(w, std::abs(t - 1.0));
    return w;
}

double Trajectory::max_herm_defect() const {
    return herm_defect.empty() ? 0.0 : *std::max_element(herm_defect.begin(), herm_defect.end());
}

double Trajectory::max_energy_drift() const {
    if (energy.empty()) return 0.0;
    const double e0 = energy.front();
    const double scale = std::max(std::abs(e0), 1e-300);
    double w = 0.0;
    for (double e : energy) w = std::max(w, std::abs(e - e0) / scale);
    return w;
}

double Trajectory::min_eigen() const {
    return min_eigenvalue.empty() ? kInf : *std::min_element(min_eigenvalue.begin(), min_eigenvalue.end());
}

Matrix free_rhs(const Matrix& rho, const LadderOperators& ops, double mu_bar) {
    const Matrix h = hamiltonian(ops, mu_bar);
    return cplx(0.0, -1.0) * (h * rho - rho * h);
}

Matrix dissipation_rhs(const Matrix& rho, const LadderOperators& ops, const BathCoefficients& c) {
    const int d = static_cast<int>(rho.rows());
    const Matrix p = coupling_operator(ops, diag_of(c, d, &LevelCoefficients::a1),
                                       diag_of(c, d, &LevelCoefficients::a2));
    const Matrix x = ops.a + ops.adag;
    const Matrix anti = p * rho + rho * p;
    return cplx(0.0, 0.5) * (x * anti - anti * x);
}

Matrix noise_rhs(const Matrix& rho, const LadderOperators& ops, const BathCoefficients& c) {
    const int d = static_cast<int>(rho.rows());
    const Matrix q = coupling_operator(ops, diag_of(c, d, &LevelCoefficients::b1),
                                       diag_of(c, d, &LevelCoefficients::b2));
    const Matrix x = ops.a + ops.adag;
    const Matrix inner = q * rho - rho * q;
    return -0.5 * (x * inner - inner * x);
}

Matrix lindblad_rhs(const Matrix& rho, const LadderOperators& ops, double mu_bar, double gamma) {
    const Matrix nn = ops.adag * ops.a;
    return free_rhs(rho, ops, mu_bar) +
           0.5 * gamma * (2.0 * ops.a * rho * ops.adag - nn * rho - rho * nn);
}

// ---------------------------------------------------------------------------

MasterEquation::MasterEquation(EvolutionMode mode, const SystemParams& p, int dim, int transient_points)
    : mode_(mode), p_(p), dim_(dim) {
    require_valid(p);
    if (dim < 2) throw ValidationError("Fock dimension must be >= 2");
    energy_.resize(static_cast<std::size_t>(dim));
    sqrt_.resize(static_cast<std::size_t>(dim) + 1);
    for (int k = 0; k < dim; ++k) energy_[static_cast<std::size_t>(k)] = k + p.mu_bar * k * k;
    for (int k = 0; k <= dim; ++k) sqrt_[static_cast<std::size_t>(k)] = std::sqrt(static_cast<double>(k));
    lu_.assign(static_cast<std::size_t>(dim), 0.0);
    ll_ = ru_ = rl_ = lu_;

    if (mode == EvolutionMode::born_markov_asymptotic) {
        load(asymptotic_coefficients(p, dim));
    } else if (mode == EvolutionMode::born_markov_transient) {
        Table t;
        const BathSpec bath = bath_of(p);
        t.t_settle = settling_time(bath);
        t.asymptote = asymptotic_coefficients(p, dim);
        const double t0 = 1e-3 / std::max(p.lambda_bar, 2.0 * std::numbers::pi / p.beta_bar);
        const int m = std::max(8, transient_points);
        const double ratio = std::pow(t.t_settle / t0, 1.0 / (m - 1));
        double tau = t0;
        for (int k = 0; k < m; ++k, tau *= ratio) {
            t.tau.push_back(k + 1 == m ? t.t_settle : tau);
            t.values.push_back(transient_coefficients(p, dim, t.tau.back()));
        }
        table_ = std::move(t);
        update_time(0.0);
    }
}

void MasterEquation::set_coefficients(const BathCoefficients& c) {
    table_.reset();
    load(c);
}

void MasterEquation::load(const BathCoefficients& c) {
    if (static_cast<int>(c.levels.size()) < dim_)
        throw ValidationError("coefficient table shorter than the Fock dimension");
    const cplx i(0.0, 1.0);
    for (int k = 1; k < dim_; ++k) {
        const auto& lv = c.levels[static_cast<std::size_t>(k - 1)];
        const double s = sqrt_[static_cast<std::size_t>(k)];
        const cplx pu = s * cplx(lv.a1, lv.a2), pl = std::conj(pu);
        const cplx qu = s * cplx(lv.b1, lv.b2), ql = std::conj(qu);
        const auto kk = static_cast<std::size_t>(k);
        lu_[kk] = 0.5 * (i * pu - qu);
        ll_[kk] = 0.5 * (i * pl - ql);
        ru_[kk] = 0.5 * (i * pu + qu);
        rl_[kk] = 0.5 * (i * pl + ql);
    }
}

void MasterEquation::update_time(double tau) {
    if (!table_) return;
    const Table& t = *table_;
    if (tau >= t.t_settle) {
        load(t.asymptote);
        return;
    }
    BathCoefficients c;
    c.levels.resize(static_cast<std::size_t>(dim_));
    if (tau <= t.tau.front()) {
        // Coefficients vanish linearly at tau = 0.
        const double w = tau / t.tau.front();
        for (std::size_t k = 0; k < c.levels.size(); ++k) {
            const auto& v = t.values.front().levels[k];
            c.levels[k] = {v.omega, w * v.a1, w * v.a2, w * v.b1, w * v.b2};
        }
        load(c);
        return;
    }
    // Cubic Lagrange interpolation in log(tau) on the four nearest nodes.
    const auto it = std::upper_bound(t.tau.begin(), t.tau.end(), tau);
    const long hi = std::distance(t.tau.begin(), it);
    const long n = static_cast<long>(t.tau.size());
    const long first = std::clamp(hi - 2, 0L, n - 4);
    double wts[4];
    const double lx = std::log(tau);
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        const double la = std::log(t.tau[static_cast<std::size_t>(first + a)]);
        for (int b = 0; b < 4; ++b)
            if (b != a) w *= (lx - std::log(t.tau[static_cast<std::size_t>(first + b)])) /
                             (la - std::log(t.tau[static_cast<std::size_t>(first + b)]));
        wts[a] = w;
    }
    for (std::size_t k = 0; k < c.levels.size(); ++k) {
        LevelCoefficients out{t.asymptote.levels[k].omega, 0.0, 0.0, 0.0, 0.0};
        for (int a = 0; a < 4; ++a) {
            const auto& v = t.values[static_cast<std::size_t>(first + a)].levels[k];
            out.a1 += wts[a] * v.a1;
            out.a2 += wts[a] * v.a2;
            out.b1 += wts[a] * v.b1;
            out.b2 += wts[a] * v.b2;
        }
        c.levels[k] = out;
    }
    load(c);
}

void MasterEquation::operator()(const Matrix& rho, Matrix& out) const {
    const int d = dim_;
    out.resize(d, d);
    const cplx mi(0.0, -1.0);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            out(i, j) = mi * (energy_[static_cast<std::size_t>(i)] - energy_[static_cast<std::size_t>(j)]) * rho(i, j);
    add_bath(rho, out);
}

void MasterEquation::bath(const Matrix& rho, Matrix& out) const {
    out.setZero(dim_, dim_);
    add_bath(rho, out);
}

void MasterEquation::add_bath(const Matrix& rho, Matrix& out) const {
    const int d = dim_;
    if (mode_ == EvolutionMode::closed) return;

    if (mode_ == EvolutionMode::lindblad_rwa) {
        const double g = 0.5 * p_.gamma;
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) {
                cplx v = -static_cast<double>(i + j) * rho(i, j);
                if (i + 1 < d && j + 1 < d)
                    v += 2.0 * sqrt_[static_cast<std::size_t>(i + 1)] * sqrt_[static_cast<std::size_t>(j + 1)] *
                         rho(i + 1, j + 1);
                out(i, j) += g * v;
            }
        return;
    }

    // S = L rho + rho R, then F = X S - S X with X tridiagonal.
    thread_local Matrix s;
    s.resize(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            cplx v = 0.0;
            if (i + 1 < d) v += lu_[static_cast<std::size_t>(i + 1)] * rho(i + 1, j);
            if (i > 0) v += ll_[static_cast<std::size_t>(i)] * rho(i - 1, j);
            if (j > 0) v += rho(i, j - 1) * ru_[static_cast<std::size_t>(j)];
            if (j + 1 < d) v += rho(i, j + 1) * rl_[static_cast<std::size_t>(j + 1)];
            s(i, j) = v;
        }
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            cplx v = 0.0;
            if (i + 1 < d) v += sqrt_[static_cast<std::size_t>(i + 1)] * s(i + 1, j);
            if (i > 0) v += sqrt_[static_cast<std::size_t>(i)] * s(i - 1, j);
            if (j > 0) v -= s(i, j - 1) * sqrt_[static_cast<std::size_t>(j)];
            if (j + 1 < d) v -= s(i, j + 1) * sqrt_[static_cast<std::size_t>(j + 1)];
            out(i, j) += v;
        }
}

// ---------------------------------------------------------------------------

namespace {

struct Sampler {
    const SystemParams& p;
    const IntegratorConfig& cfg;
    Trajectory& traj;
    std::vector<double> energy;
    std::vector<double> omega;
    Vector cat_a, cat_b;
    long samples = 0;
    bool leak_warned = false;

    Sampler(const SystemParams& params, const IntegratorConfig& c, Trajectory& t, int d)
        : p(params), cfg(c), traj(t) {
        for (int k = 0; k < d; ++k) {
            energy.push_back(k + p.mu_bar * k * k);
            omega.push_back(level_frequency(p.mu_bar, k));
        }
        if (cfg.cat_pair) {
            cat_a = coherent_amplitudes(cfg.cat_pair->first, d);
            cat_b = coherent_amplitudes(cfg.cat_pair->second, d);
        }
    }

    void operator()(double tau, const Matrix& rho) {
        const int d = static_cast<int>(rho.rows());
        const cplx a = expectation(rho, Observable::a);
        cplx ai = 0.0;
        double e = 0.0;
        for (int k = 0; k + 1 < d; ++k)
            ai += std::sqrt(k + 1.0) * rho(k + 1, k) * std::polar(1.0, omega[static_cast<std::size_t>(k)] * tau);
        for (int k = 0; k < d; ++k) e += energy[static_cast<std::size_t>(k)] * rho(k, k).real();

        traj.tau.push_back(tau);
        traj.a.push_back(a);
        traj.a_interaction.push_back(ai);
        traj.x.push_back(std::sqrt(2.0) * a.real());
        traj.n.push_back(expectation(rho, Observable::n).real());
        traj.energy.push_back(e);
        traj.trace.push_back(rho.trace().real());
        traj.herm_defect.push_back(hermiticity_defect(rho));

        if (cfg.cat_pair) {
            Vector va(d), vb(d);
            for (int k = 0; k < d; ++k) {
                const cplx ph = std::polar(1.0, -energy[static_cast<std::size_t>(k)] * tau);
                va(k) = cat_a(k) * ph;
                vb(k) = cat_b(k) * ph;
            }
            traj.cat_overlap.push_back(va.dot(rho * vb));
        }
        if (cfg.eigen_every > 0 && samples % cfg.eigen_every == 0) {
            const Matrix h = 0.5 * (rho + rho.adjoint());
            Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
            traj.eigen_tau.push_back(tau);
            traj.min_eigenvalue.push_back(es.eigenvalues().minCoeff());
        }
        if (cfg.keep_snapshots) traj.snapshots.push_back(rho);

        if (!leak_warned) {
            double top = 0.0;
            for (int k = std::max(0, d - 3); k < d; ++k) top += rho(k, k).real();
            if (top > 1e-6) {
                std::ostringstream os;
                os << "truncation leakage: top-3 population " << top << " at tau=" << tau;
                traj.warnings.push_back(os.str());
                leak_warned = true;
            }
        }
        ++samples;

        const double tr = traj.trace.back();
        if (!std::isfinite(tr) || std::abs(tr - 1.0) > 1e-3 || !std::isfinite(std::abs(a)) ||
            traj.herm_defect.back() > 1e-3) {
            std::ostringstream os;
            os << "integration unstable at tau=" << tau << " (trace " << tr
               << "); reduce the step size below dt=" << traj.dt;
            throw IntegrationError(os.str(), traj);
        }
    }
};

}  // namespace

Trajectory integrate(const DensityMatrix& rho0, EvolutionMode mode, const SystemParams& p,
                     const IntegratorConfig& cfg) {
    require_valid(p);
    if (!(cfg.tau_end > 0.0) || !std::isfinite(cfg.tau_end)) throw ValidationError("tau_end must be > 0");
    if (cfg.stride < 1) throw ValidationError("stride must be >= 1");
    if (!(cfg.dt >= 0.0)) throw ValidationError("dt must be > 0");
    const int d = rho0.dimension();

    double dt = cfg.dt > 0.0 ? cfg.dt : default_step(p, d);
    const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.tau_end / dt - 1e-9)));
    dt = cfg.tau_end / static_cast<double>(steps);

    Trajectory traj;
    traj.dt = dt;
    traj.steps = steps;
    traj.dimension = d;
    const auto rows = static_cast<std::size_t>(steps / cfg.stride + 1);
    traj.tau.reserve(rows);
    traj.a.reserve(rows);
    traj.x.reserve(rows);

    MasterEquation rhs(mode, p, d, cfg.transient_points);
    const bool timed = mode == EvolutionMode::born_markov_transient;
    Sampler sample(p, cfg, traj, d);

    Matrix rho = rho0.matrix();
    Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);
    sample(0.0, rho);

    if (cfg.stepper == Stepper::rk4) {
        for (long s = 1; s <= steps; ++s) {
            const double t = static_cast<double>(s - 1) * dt;
            if (timed) rhs.update_time(t);
            rhs(rho, k1);
            tmp = rho + (0.5 * dt) * k1;
            if (timed) rhs.update_time(t + 0.5 * dt);
            rhs(tmp, k2);
            tmp = rho + (0.5 * dt) * k2;
            rhs(tmp, k3);
            tmp = rho + dt * k3;
            if (timed) rhs.update_time(t + dt);
            rhs(tmp, k4);
            rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (s % cfg.stride == 0) sample(static_cast<double>(s) * dt, rho);
        }
        return traj;
    }

    // Lawson RK4 in the frame co-rotating with the free Hamiltonian:
    // half and full step propagators are elementwise phases.
    Matrix half(d, d), full(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            const double w = (i - j) + p.mu_bar * (static_cast<double>(i) * i - static_cast<double>(j) * j);
            half(i, j) = std::polar(1.0, -0.5 * w * dt);
            full(i, j) = half(i, j) * half(i, j);
        }
    const bool free_only = mode == EvolutionMode::closed;
    Matrix rho_half(d, d);
    for (long s = 1; s <= steps; ++s) {
        const double t = static_cast<double>(s - 1) * dt;
        if (free_only) {
            rho = rho.cwiseProduct(full);
        } else {
            if (timed) rhs.update_time(t);
            rhs.bath(rho, k1);
            rho_half = rho.cwiseProduct(half);
            tmp = rho_half + (0.5 * dt) * k1.cwiseProduct(half);
            if (timed) rhs.update_time(t + 0.5 * dt);
            rhs.bath(tmp, k2);
            tmp = rho_half + (0.5 * dt) * k2;
            rhs.bath(tmp, k3);
            tmp = rho.cwiseProduct(full) + dt * k3.cwiseProduct(half);
            if (timed) rhs.update_time(t + dt);
            rhs.bath(tmp, k4);
            rho = rho.cwiseProduct(full) +
                  (dt / 6.0) * (k1.cwiseProduct(full) + 2.0 * (k2 + k3).cwiseProduct(half) + k4);
        }
        if (s % cfg.stride == 0) sample(static_cast<double>(s) * dt, rho);
    }
    return traj;
}

}  // namespace kerrbath
