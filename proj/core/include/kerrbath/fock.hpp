#pragma once

#include <complex>

#include <Eigen/Dense>

namespace kerrbath {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Levels 0..dimension-1.
struct FockSpace {
    int dimension = 2;

    explicit FockSpace(int dim);
};

/// ceil(I0 + 8 sqrt(I0)) + 2: keeps the Poisson tail beyond the cut under 1e-9.
int truncation_dimension(double intensity);

/// Hermitian, unit-trace state on a truncated Fock space.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix m);

    const Matrix& matrix() const { return m_; }
    Matrix& matrix() { return m_; }
    int dimension() const { return static_cast<int>(m_.rows()); }

    cplx trace() const { return m_.trace(); }
    /// max |rho - rho^dagger| over all elements.
    double hermiticity_defect() const;
    double purity() const;
    /// Smallest eigenvalue of the Hermitian part.
    double min_eigenvalue() const;

private:
    Matrix m_;
};

double hermiticity_defect(const Matrix& m);

struct LadderOperators {
    Matrix a;
    Matrix adag;
    Matrix n;
    Matrix x;      ///< (a + a^dagger) / sqrt(2)
    Matrix omega;  ///< 1 + mu_bar (1 + 2 n)
};

LadderOperators make_ladder(const FockSpace& space, double mu_bar = 0.0);

/// e^{-|a|^2/2} a^n / sqrt(n!) for n < dim, evaluated through log factorials.
Vector coherent_amplitudes(cplx alpha, int dim);

/// Smallest dimension the truncation rule accepts for this amplitude.
int required_dimension(cplx alpha);

DensityMatrix coherent_state_density(cplx alpha, const FockSpace& space);
DensityMatrix cat_state_density(cplx alpha, cplx beta, const FockSpace& space);
DensityMatrix fock_state_density(int n, const FockSpace& space);

/// <a|b> for untruncated coherent states.
cplx coherent_inner_product(cplx alpha, cplx beta);

enum class Observable { identity, a, adag, n, x, n2 };

/// tr(rho op), evaluated from the band structure without forming op.
cplx expectation(const DensityMatrix& rho, Observable op);
cplx expectation(const Matrix& rho, Observable op);
/// tr(rho op) for an arbitrary dense operator.
cplx expectation(const Matrix& rho, const Matrix& op);

/// <alpha| rho |beta> using truncated coherent amplitude vectors.
cplx coherent_overlap(const Matrix& rho, cplx alpha, cplx beta);
cplx coherent_overlap(const DensityMatrix& rho, cplx alpha, cplx beta);

}  // namespace kerrbath
