#include "kerrbath/fock.hpp"

#include <cmath>
#include <string>

#include "kerrbath/error.hpp"

namespace kerrbath {

FockSpace::FockSpace(int dim) : dimension(dim) {
    if (dim < 2) throw ValidationError("Fock space needs at least 2 levels");
}

int truncation_dimension(double intensity) {
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw ValidationError("intensity must be finite and >= 0");
    return static_cast<int>(std::ceil(intensity + 8.0 * std::sqrt(intensity))) + 2;
}

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 2)
        throw ValidationError("density matrix must be square with dimension >= 2");
}

double hermiticity_defect(const Matrix& m) {
    double worst = 0.0;
    const Eigen::Index n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j; i < n; ++i)
            worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
    return worst;
}

double DensityMatrix::hermiticity_defect() const { return kerrbath::hermiticity_defect(m_); }

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
    const Matrix h = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

LadderOperators make_ladder(const FockSpace& space, double mu_bar) {
    const int d = space.dimension;
    LadderOperators ops;
    ops.a = Matrix::Zero(d, d);
    for (int k = 1; k < d; ++k) ops.a(k - 1, k) = std::sqrt(static_cast<double>(k));
    ops.adag = ops.a.adjoint();
    ops.n = Matrix::Zero(d, d);
    ops.omega = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        ops.n(k, k) = k;
        ops.omega(k, k) = 1.0 + mu_bar * (1.0 + 2.0 * k);
    }
    ops.x = (ops.a + ops.adag) / std::sqrt(2.0);
    return ops;
}

Vector coherent_amplitudes(cplx alpha, int dim) {
    Vector c = Vector::Zero(dim);
    const double r = std::abs(alpha);
    if (r == 0.0) {
        c(0) = 1.0;
        return c;
    }
    const double phase = std::arg(alpha);
    const double lr = std::log(r);
    for (int k = 0; k < dim; ++k) {
        const double logmag = -0.5 * r * r + k * lr - 0.5 * std::lgamma(k + 1.0);
        c(k) = std::polar(std::exp(logmag), k * phase);
    }
    return c;
}

int required_dimension(cplx alpha) {
    const double r = std::abs(alpha);
    return static_cast<int>(std::ceil(r * r + 8.0 * r));
}

namespace {

void check_truncation(cplx alpha, const FockSpace& space) {
    const int need = required_dimension(alpha);
    if (space.dimension < need)
        throw TruncationError("Fock space of dimension " + std::to_string(space.dimension) +
                                  " too small; need at least " + std::to_string(need),
                              need);
}

}  // namespace

DensityMatrix coherent_state_density(cplx alpha, const FockSpace& space) {
    check_truncation(alpha, space);
    Vector c = coherent_amplitudes(alpha, space.dimension);
    c.normalize();
    return DensityMatrix(c * c.adjoint());
}

DensityMatrix cat_state_density(cplx alpha, cplx beta, const FockSpace& space) {
    check_truncation(std::abs(alpha) > std::abs(beta) ? alpha : beta, space);
    Vector psi = coherent_amplitudes(alpha, space.dimension) + coherent_amplitudes(beta, space.dimension);
    psi.normalize();
    return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix fock_state_density(int n, const FockSpace& space) {
    if (n < 0 || n >= space.dimension) throw ValidationError("Fock level outside the space");
    Matrix m = Matrix::Zero(space.dimension, space.dimension);
    m(n, n) = 1.0;
    return DensityMatrix(std::move(m));
}

cplx coherent_inner_product(cplx alpha, cplx beta) {
    return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(alpha) * beta);
}

cplx expectation(const Matrix& rho, Observable op) {
    const Eigen::Index d = rho.rows();
    cplx s = 0.0;
    switch (op) {
        case Observable::identity:
            return rho.trace();
        case Observable::a:
            // tr(rho a) = sum_k sqrt(k) rho(k, k-1)
            for (Eigen::Index k = 1; k < d; ++k) s += std::sqrt(static_cast<double>(k)) * rho(k, k - 1);
            return s;
        case Observable::adag:
            for (Eigen::Index k = 1; k < d; ++k) s += std::sqrt(static_cast<double>(k)) * rho(k - 1, k);
            return s;
        case Observable::n:
            for (Eigen::Index k = 1; k < d; ++k) s += static_cast<double>(k) * rho(k, k);
            return s;
        case Observable::n2:
            for (Eigen::Index k = 1; k < d; ++k) s += static_cast<double>(k * k) * rho(k, k);
            return s;
        case Observable::x:
            return (expectation(rho, Observable::a) + expectation(rho, Observable::adag)) / std::sqrt(2.0);
    }
    return s;
}

cplx expectation(const DensityMatrix& rho, Observable op) { return expectation(rho.matrix(), op); }

cplx expectation(const Matrix& rho, const Matrix& op) {
    if (rho.rows() != op.rows() || rho.cols() != op.cols())
        throw ValidationError("operator and state dimensions differ");
    return rho.transpose().cwiseProduct(op).sum();
}

cplx coherent_overlap(const Matrix& rho, cplx alpha, cplx beta) {
    const int d = static_cast<int>(rho.rows());
    const Vector ca = coherent_amplitudes(alpha, d);
    const Vector cb = coherent_amplitudes(beta, d);
    return ca.dot(rho * cb);
}

cplx coherent_overlap(const DensityMatrix& rho, cplx alpha, cplx beta) {
    return coherent_overlap(rho.matrix(), alpha, beta);
}

}  // namespace kerrbath
