#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "qdecouple/error.hpp"

namespace qdec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Normalization of the Hermitian traceless basis {Omega_j}.
//   orthonormal : tr(Omega_j Omega_k) = delta_jk
//   pauli_bloch : tr(Omega_j Omega_k) = 2 delta_jk (bare Pauli matrices, N = 2 only)
enum class BasisConvention { orthonormal, pauli_bloch };

struct OrthonormalBasis {
    int dim = 0;                          // Hilbert-space dimension N
    BasisConvention convention = BasisConvention::orthonormal;
    std::vector<ComplexMatrix> elements;  // N^2 - 1 Hermitian traceless matrices

    int size() const { return static_cast<int>(elements.size()); }
    // tr(Omega_j Omega_j), identical for every element of a valid basis.
    double element_norm2() const { return convention == BasisConvention::pauli_bloch ? 2.0 : 1.0; }
};

// Index partition su(N) = p (+) eps. Indices are 0-based positions in the basis.
struct CartanSplit {
    std::vector<int> p_indices;
    std::vector<int> eps_indices;
};

struct CartanViolation {
    std::string relation;  // "pp->eps", "pe->p" or "ee->eps"
    int i = 0;
    int j = 0;
    double leak = 0.0;  // Frobenius norm of the forbidden-subspace component
};

struct CartanReport {
    bool ok = true;
    std::vector<CartanViolation> violations;
};

enum class SplitPreset { one_qubit, qutrit_v, two_qubit };

// Generalized Gell-Mann basis of su(N), orthonormal under tr(X^dag Y).
// Ordering: symmetric off-diagonal pairs (j<k lexicographic), antisymmetric
// off-diagonal pairs, then the N-1 diagonal matrices.
OrthonormalBasis gellmann_basis(int N);

// The bare Pauli matrices {sx, sy, sz}; Bloch convention.
OrthonormalBasis pauli_bloch_basis();

ComplexMatrix commutator(const ComplexMatrix& A, const ComplexMatrix& B);

// Adjoint representation of -iH on coherence-vector coordinates:
// O_jk = tr(Omega_j (-i)[H, Omega_k]) / tr(Omega_j Omega_j). Real antisymmetric.
RealMatrix adjoint_rep(const ComplexMatrix& H, const OrthonormalBasis& basis);

// Expansion coefficients of the traceless part of H over the basis,
// c_j = tr(Omega_j H) / tr(Omega_j Omega_j), so that sum_j c_j Omega_j
// reproduces H - tr(H)/N.
RealVector traceless_projection(const ComplexMatrix& H, const OrthonormalBasis& basis);

CartanReport verify_cartan(const OrthonormalBasis& basis, const CartanSplit& split,
                           double tol = 1e-10);

// The paper-indexed basis and Cartan split for the three worked systems.
std::pair<OrthonormalBasis, CartanSplit> preset_split(SplitPreset kind);

// exp(A t) for real antisymmetric A via the Hermitian eigendecomposition of iA.
// The factorization is done once; evaluations are cheap and exactly orthogonal.
class AntisymmetricExp {
  public:
    AntisymmetricExp() = default;
    explicit AntisymmetricExp(const RealMatrix& A, double tol = 1e-10);

    RealMatrix at(double t) const;
    RealVector apply(double t, const RealVector& v) const;
    // Distinct nonnegative eigenfrequencies |lambda| of A, ascending.
    std::vector<double> frequencies(double tol = 1e-9) const;
    int size() const { return static_cast<int>(eigenvalues_.size()); }

    const RealVector& eigenvalues() const { return eigenvalues_; }
    const ComplexMatrix& eigenvectors() const { return eigenvectors_; }

  private:
    RealVector eigenvalues_;      // of the Hermitian matrix iA
    ComplexMatrix eigenvectors_;  // unitary
};

namespace detail {
bool is_hermitian(const ComplexMatrix& A, double tol);
}  // namespace detail

}  // namespace qdec
