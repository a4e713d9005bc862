#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "kerrbath/error.hpp"
#include "kerrbath/model.hpp"

using namespace kerrbath;

namespace {

SystemParams params(double mu, double i0, double beta, double gamma) {
    SystemParams p;
    p.mu_bar = mu;
    p.intensity = i0;
    p.beta_bar = beta;
    p.gamma = gamma;
    return p;
}

SystemParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto logu = [&](double lo, double hi) { return std::exp(std::log(lo) + u(rng) * std::log(hi / lo)); };
    SystemParams p;
    p.mu_bar = logu(1e-4, 4.0);
    p.intensity = 1.0 + 199.0 * u(rng);
    p.theta = 6.0 * u(rng);
    p.beta_bar = logu(1e-3, 10.0);
    p.gamma = logu(1e-6, 1e-1);
    p.lambda_bar = logu(1.0, 1e3);
    return p;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("weak-coupling timescales") {
    const auto t = derive_timescales(params(0.1, 50, 1.0, 1e-4));
    CHECK(t.tau_E == doctest::Approx(0.7071).epsilon(1e-4));
    CHECK(t.tau_D == doctest::Approx(18.02).epsilon(1e-3));
    CHECK(t.tau_R == doctest::Approx(31.42).epsilon(2e-4));
    CHECK(t.tau_gamma == doctest::Approx(2e4));
    CHECK(t.tau_cl == doctest::Approx(2 * M_PI / 11.0));
}

TEST_CASE("classical-limit timescales") {
    const auto t = derive_timescales(params(1e-4, 50, 1.0, 1e-2));
    CHECK(t.tau_D == doctest::Approx(0.92).epsilon(5e-3));
    CHECK(t.tau_gamma == doctest::Approx(200.0));
    CHECK(t.tau_E == doctest::Approx(707.1).epsilon(1e-4));
    CHECK(t.tau_R == doctest::Approx(3.1416e4).epsilon(1e-4));
}

TEST_CASE("decoupled limit") {
    const auto t = derive_timescales(params(0.1, 50, 1.0, 0.0));
    CHECK(std::isinf(t.tau_D));
    CHECK(std::isinf(t.tau_gamma));
    CHECK(t.tau_E == doctest::Approx(0.7071).epsilon(1e-4));
    CHECK(t.tau_R == doctest::Approx(31.42).epsilon(2e-4));
    CHECK(classify_regime(t).regime == Regime::isolated);
}

TEST_CASE("exact decoherence formula keeps the cutoff factor") {
    const auto p = params(0.1, 50, 1.0, 1e-4);
    const auto head = derive_timescales(p);
    const auto exact = derive_timescales(p, DecoherenceFormula::exact);
    const double w = p.omega_bar();
    const double factor = p.lambda_bar * p.lambda_bar / (p.lambda_bar * p.lambda_bar + w * w);
    CHECK(exact.tau_D == doctest::Approx(head.tau_D / factor).epsilon(1e-12));
    CHECK(exact.tau_D > head.tau_D);
}

TEST_CASE("regime classification") {
    auto surviving = derive_timescales(params(1e-2, 50, 1.0, 1e-2));
    CHECK(surviving.tau_E == doctest::Approx(7.071).epsilon(1e-3));
    CHECK(surviving.theta_ratio == doctest::Approx(28.28).epsilon(1e-3));
    const auto r = classify_regime(surviving);
    CHECK(r.regime == Regime::quantum_surviving);
    CHECK(to_string(r.regime) == "quantum-surviving");
    REQUIRE(r.ordering.size() == 5);
    CHECK(r.ordering.front().name == "tau_D");
    for (std::size_t i = 1; i < r.ordering.size(); ++i) CHECK(r.ordering[i - 1].value <= r.ordering[i].value);

    const auto classical = derive_timescales(params(1e-4, 50, 1.0, 1e-2));
    CHECK(classical.theta_ratio == doctest::Approx(0.2828).epsilon(1e-3));
    CHECK(classify_regime(classical).regime == Regime::classical);

    Timescales mid = classical;
    mid.theta_ratio = 1.0;
    CHECK(classify_regime(mid).regime == Regime::intermediate);
}

TEST_CASE("classification is invariant under rescaling that keeps theta") {
    auto t = derive_timescales(params(1e-2, 50, 1.0, 1e-2));
    Timescales s = t;
    for (double* f : {&s.tau_cl, &s.tau_E, &s.tau_R, &s.tau_D, &s.tau_gamma}) *f *= 37.0;
    CHECK(classify_regime(s).regime == classify_regime(t).regime);
}

TEST_CASE("condensate survival estimate") {
    const double a = 5e-9, m = 1.5e-25, w = 2 * M_PI * 100, tg = 2 * M_PI * 100;
    // independent long-double evaluation
    const long double pil = 3.141592653589793238462643383279L;
    auto ref = [&](long double n) {
        return static_cast<double>(a * std::sqrt(2.0L * m * w * n / (pil * 1.054571817e-34L)) * tg);
    };
    CHECK(theta_bec(a, m, w, 1, tg) == doctest::Approx(ref(1)).epsilon(1e-12));
    CHECK(theta_bec(a, m, w, 1, tg) == doctest::Approx(2.37).epsilon(5e-3));
    CHECK(theta_bec(a, m, w, 1e4, tg) == doctest::Approx(237.0).epsilon(5e-3));
    CHECK(theta_bec(a, m, w, 4e4, tg) == doctest::Approx(2 * theta_bec(a, m, w, 1e4, tg)));
    CHECK_THROWS_AS(theta_bec(a, m, w, 0.0, tg), ValidationError);
}

TEST_CASE("cantilever survival estimate") {
    CHECK(theta_cantilever(1, 1, 16) == doctest::Approx(1.0));
    CHECK(theta_cantilever(1, 1e6, 6e11) == doctest::Approx(5.164).epsilon(1e-3));
    CHECK(1.0 / theta_cantilever(1, 1e6, 6e11) == doctest::Approx(0.1936).epsilon(1e-3));
    CHECK(theta_cantilever(2, 3, 1600) == doctest::Approx(0.1 * theta_cantilever(2, 3, 16)));
    CHECK(theta_cantilever(0, 1e6, 6e11) == 0.0);
    CHECK_THROWS_AS(theta_cantilever(1, -1, 16), ValidationError);
}

TEST_CASE("validation") {
    CHECK(validate_params(SystemParams{}).ok());
    auto auto_cut = SystemParams{};
    auto_cut.lambda_bar = default_cutoff(auto_cut.mu_bar, auto_cut.intensity);
    CHECK(validate_params(auto_cut).violations.empty());

    auto p = SystemParams{};
    p.beta_bar = -1;
    auto r = validate_params(p);
    CHECK_FALSE(r.ok());
    REQUIRE(r.errors().size() == 1);
    CHECK(r.errors()[0] == "beta_bar must be > 0");
    CHECK_THROWS_AS(derive_timescales(p), ValidationError);

    p = SystemParams{};
    p.lambda_bar = 1.0;
    r = validate_params(p);
    CHECK(r.ok());
    REQUIRE(r.warnings().size() == 1);
    CHECK(r.warnings()[0].rfind("cutoff below system frequency", 0) == 0);

    p = SystemParams{};
    p.intensity = 250;
    p.lambda_bar = 1e3;
    CHECK(validate_params(p).warnings().size() == 1);

    p = SystemParams{};
    p.gamma = std::numeric_limits<double>::quiet_NaN();
    p.mu_bar = -1;
    CHECK(validate_params(p).errors().size() == 2);
}

TEST_CASE("default cutoff is ten times the system frequency") {
    CHECK(default_cutoff(0.1, 50) == doctest::Approx(111.0));
    CHECK(default_cutoff(0.0, 50) == doctest::Approx(10.0));
}

TEST_CASE("closed-form identities on random draws") {
    std::mt19937_64 rng(12345);
    for (int k = 0; k < 1000; ++k) {
        const SystemParams p = random_params(rng);
        const auto t = derive_timescales(p);
        const double w = p.omega_bar();
        CHECK(t.tau_E * 2 * p.mu_bar * std::sqrt(p.intensity) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(t.tau_R * p.mu_bar == doctest::Approx(M_PI).epsilon(1e-14));
        CHECK(t.tau_gamma * p.gamma == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(t.tau_D * p.intensity * p.gamma * w == doctest::Approx(std::tanh(p.beta_bar * w / 2)).epsilon(1e-14));
        const double eps = p.epsilon();
        CHECK(t.theta_ratio == doctest::Approx(2 * p.mu_classical() * std::sqrt(eps) * t.tau_gamma).epsilon(1e-13));
        CHECK(t.tau_E / t.tau_R == doctest::Approx(std::sqrt(eps) / (2 * M_PI)).epsilon(1e-13));
        CHECK(p.mu_bar == doctest::Approx(eps * p.mu_classical()).epsilon(1e-15));
    }
}

}
