#include <cmath>
#include <random>

#include "doctest.h"
#include "kerrbath/error.hpp"
#include "kerrbath/fock.hpp"

using namespace kerrbath;

TEST_SUITE("fock") {

TEST_CASE("truncation rule") {
    CHECK(truncation_dimension(50) == 109);
    CHECK(truncation_dimension(20) == 58);
    CHECK(truncation_dimension(100) == 182);
    CHECK_THROWS_AS(FockSpace(1), ValidationError);
}

TEST_CASE("ladder operators follow the sqrt(n) rule") {
    const FockSpace s(7);
    const auto ops = make_ladder(s, 0.3);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
            const double a = (j == i + 1) ? std::sqrt(double(j)) : 0.0;
            CHECK(ops.a(i, j) == cplx(a));
            CHECK(ops.adag(j, i) == cplx(a));
            CHECK(ops.n(i, j) == cplx(i == j ? i : 0.0));
            CHECK(ops.omega(i, j) == cplx(i == j ? 1.0 + 0.3 * (1 + 2 * i) : 0.0));
            CHECK(std::abs(ops.x(i, j) - (ops.a(i, j) + ops.adag(i, j)) / std::sqrt(2.0)) < 1e-15);
        }
    const Matrix comm = ops.a * ops.adag - ops.adag * ops.a;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) CHECK(std::abs(comm(i, j) - (i == j ? 1.0 : 0.0)) < 1e-14);
    CHECK(std::abs(comm(6, 6) + 6.0) < 1e-14);  // truncation artifact in the top corner
    CHECK(std::abs((ops.adag * ops.a - ops.n).norm()) < 1e-14);
}

TEST_CASE("coherent state moments") {
    const cplx alpha = std::polar(std::sqrt(50.0), -0.4);
    const FockSpace s(truncation_dimension(50));
    const auto rho = coherent_state_density(alpha, s);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
    CHECK(expectation(rho, Observable::n).real() == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(std::abs(expectation(rho, Observable::a) - alpha) < 1e-9);
    CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rho.hermiticity_defect() < 1e-15);
    CHECK(std::abs(expectation(rho, Observable::x).imag()) < 1e-10);
    CHECK(std::abs(expectation(rho, Observable::identity) - 1.0) < 1e-12);
}

TEST_CASE("position of the I0 = 50 initial state") {
    const auto rho = coherent_state_density(std::sqrt(50.0), FockSpace(109));
    CHECK(expectation(rho, Observable::x).real() == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("fock states have no coherent amplitude") {
    const auto rho = fock_state_density(5, FockSpace(10));
    CHECK(std::abs(expectation(rho, Observable::a)) == 0.0);
    CHECK(expectation(rho, Observable::n).real() == 5.0);
    CHECK(expectation(rho, Observable::n2).real() == 25.0);
}

TEST_CASE("band expectations agree with dense contraction") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    const int d = 12;
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = cplx(g(rng), g(rng));
    const Matrix rho = m * m.adjoint() / (m * m.adjoint()).trace();
    const auto ops = make_ladder(FockSpace(d));
    CHECK(std::abs(expectation(rho, Observable::a) - expectation(rho, ops.a)) < 1e-12);
    CHECK(std::abs(expectation(rho, Observable::adag) - expectation(rho, ops.adag)) < 1e-12);
    CHECK(std::abs(expectation(rho, Observable::x) - expectation(rho, ops.x)) < 1e-12);
    CHECK(std::abs(expectation(rho, Observable::n) - expectation(rho, ops.n)) < 1e-12);
    CHECK(std::abs(expectation(rho, Observable::n2) - expectation(rho, Matrix(ops.n * ops.n))) < 1e-12);
    CHECK(std::abs(expectation(rho, ops.x).imag()) < 1e-12);
}

TEST_CASE("random coherent states stay accurate under the truncation rule") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 40; ++k) {
        const double i0 = 60.0 * u(rng);
        const cplx alpha = std::polar(std::sqrt(i0), 2 * M_PI * u(rng));
        const int d = std::max(2, truncation_dimension(i0));
        const Vector c = coherent_amplitudes(alpha, d);
        // the 8-sigma rule leaves ~1e-8 of the norm behind for I0 below ~2
        if (i0 >= 2.0) CHECK(std::abs(c.squaredNorm() - 1.0) < 1e-9);
        const auto rho = coherent_state_density(alpha, FockSpace(d));
        CHECK(std::abs(rho.trace() - 1.0) < 1e-9);
        CHECK(std::abs(expectation(rho, Observable::n).real() - i0) <= 1e-6 * std::max(i0, 1e-300) + 1e-12);
        // a |alpha> = alpha |alpha> except for the cut
        const auto ops = make_ladder(FockSpace(d));
        CHECK((ops.a * c - alpha * c).head(d - 1).norm() < 1e-9);
    }
}

TEST_CASE("large amplitudes do not overflow") {
    const Vector c = coherent_amplitudes(std::sqrt(180.0), 300);
    CHECK(c.allFinite());
    CHECK(std::abs(c.squaredNorm() - 1.0) < 1e-9);
}

TEST_CASE("truncation violations name the required dimension") {
    try {
        coherent_state_density(std::sqrt(50.0), FockSpace(60));
        FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
        CHECK(e.required_dimension() == 107);
    }
}

TEST_CASE("cat states") {
    const FockSpace s(130);
    const cplx a = 7.0, b = 8.0;
    const auto cat = cat_state_density(a, b, s);
    CHECK(std::abs(cat.trace() - 1.0) < 1e-9);
    const auto same = cat_state_density(a, a, s);
    const auto coh = coherent_state_density(a, s);
    CHECK((same.matrix() - coh.matrix()).norm() < 1e-12);

    // <a|rho|b> = N (<a|a> + <a|b>) (<a|b> + <b|b>) with N = 1 / (2 + 2 Re<a|b>)
    const cplx ab = coherent_inner_product(a, b);
    const double norm = 1.0 / (2.0 + 2.0 * ab.real());
    const cplx expect = norm * (1.0 + ab) * (ab + 1.0);
    CHECK(std::abs(coherent_overlap(cat, a, b) - expect) < 1e-9);

    // brute-force contraction in the Fock basis
    const Vector ca = coherent_amplitudes(a, 130), cb = coherent_amplitudes(b, 130);
    cplx brute = 0.0;
    for (int i = 0; i < 130; ++i)
        for (int j = 0; j < 130; ++j) brute += std::conj(ca(i)) * cat.matrix()(i, j) * cb(j);
    CHECK(std::abs(coherent_overlap(cat, a, b) - brute) < 1e-12);

    // rotated parameterisation x e^{i theta}, (x + dx) e^{i theta}
    const auto rot = cat_state_density(std::polar(7.0, 0.6), std::polar(8.0, 0.6), s);
    CHECK(std::abs(rot.trace() - 1.0) < 1e-9);
}

TEST_CASE("coherent overlaps") {
    const FockSpace s(80);
    const cplx a(3.0, 1.0), b(-2.0, 2.5);
    const Vector ca = coherent_amplitudes(a, 80), cb = coherent_amplitudes(b, 80);
    const Matrix outer = ca * cb.adjoint();  // |a><b|
    CHECK(std::abs(coherent_overlap(outer, a, b) - 1.0) < 1e-9);
    CHECK(std::abs(coherent_overlap(coherent_state_density(a, s), a, a) - 1.0) < 1e-9);
    CHECK(std::abs(ca.dot(cb) - coherent_inner_product(a, b)) < 1e-12);
}

TEST_CASE("density matrix diagnostics") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 0.5;
    m(1, 1) = 0.5;
    m(0, 1) = cplx(0.1, 0.2);
    m(1, 0) = cplx(0.1, -0.2);
    DensityMatrix rho(m);
    CHECK(rho.hermiticity_defect() == 0.0);
    CHECK(rho.min_eigenvalue() == doctest::Approx(0.5 - std::sqrt(0.05)));
    CHECK_THROWS_AS(DensityMatrix(Matrix::Zero(2, 3)), ValidationError);
}

}
