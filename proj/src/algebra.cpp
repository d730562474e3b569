#include "qdecouple/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace qdec {

namespace {

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
    ComplexMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

}  // namespace

namespace detail {

bool is_hermitian(const ComplexMatrix& A, double tol) {
    return (A - A.adjoint()).norm() <= tol;
}

}  // namespace detail

OrthonormalBasis gellmann_basis(int N) {
    if (N < 2) {
        throw Error(ErrorKind::config, "gellmann_basis: dimension must be >= 2, got " +
                                           std::to_string(N));
    }
    OrthonormalBasis basis;
    basis.dim = N;
    basis.convention = BasisConvention::orthonormal;
    basis.elements.reserve(static_cast<size_t>(N) * N - 1);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < N; ++j) {
        for (int k = j + 1; k < N; ++k) {
            ComplexMatrix M = ComplexMatrix::Zero(N, N);
            M(j, k) = M(k, j) = inv_sqrt2;
            basis.elements.push_back(std::move(M));
        }
    }
    for (int j = 0; j < N; ++j) {
        for (int k = j + 1; k < N; ++k) {
            ComplexMatrix M = ComplexMatrix::Zero(N, N);
            M(j, k) = Complex(0.0, -inv_sqrt2);
            M(k, j) = Complex(0.0, inv_sqrt2);
            basis.elements.push_back(std::move(M));
        }
    }
    for (int l = 1; l < N; ++l) {
        ComplexMatrix M = ComplexMatrix::Zero(N, N);
        const double c = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
        for (int j = 0; j < l; ++j) M(j, j) = c;
        M(l, l) = -l * c;
        basis.elements.push_back(std::move(M));
    }
    return basis;
}

OrthonormalBasis pauli_bloch_basis() {
    OrthonormalBasis basis;
    basis.dim = 2;
    basis.convention = BasisConvention::pauli_bloch;
    ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, Complex(0, -1), Complex(0, 1), 0;
    sz << 1, 0, 0, -1;
    basis.elements = {sx, sy, sz};
    return basis;
}

ComplexMatrix commutator(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows()) {
        throw Error(ErrorKind::config, "commutator: operands must be square and equally sized");
    }
    return A * B - B * A;
}

RealMatrix adjoint_rep(const ComplexMatrix& H, const OrthonormalBasis& basis) {
    if (H.rows() != basis.dim || H.cols() != basis.dim) {
        throw Error(ErrorKind::config, "adjoint_rep: operator dimension does not match basis");
    }
    if (!detail::is_hermitian(H, 1e-10)) {
        throw Error(ErrorKind::config, "adjoint_rep: operator is not Hermitian");
    }
    const int n = basis.size();
    const double s = basis.element_norm2();
    const Complex mi(0.0, -1.0);
    RealMatrix O(n, n);
    for (int k = 0; k < n; ++k) {
        const ComplexMatrix C = mi * commutator(H, basis.elements[k]);
        for (int j = 0; j < n; ++j) {
            O(j, k) = (basis.elements[j] * C).trace().real() / s;
        }
    }
    return O;
}

RealVector traceless_projection(const ComplexMatrix& H, const OrthonormalBasis& basis) {
    const int n = basis.size();
    const double s = basis.element_norm2();
    RealVector c(n);
    for (int j = 0; j < n; ++j) {
        c(j) = (basis.elements[j] * H).trace().real() / s;
    }
    return c;
}

namespace {

// Frobenius norm of the component of X inside the subspace spanned by the
// listed basis elements.
double subspace_leak(const ComplexMatrix& X, const OrthonormalBasis& basis,
                     const std::vector<int>& subspace) {
    const double s = basis.element_norm2();
    double sq = 0.0;
    for (int idx : subspace) {
        // X is anti-Hermitian for commutators of Hermitian elements; project
        // onto Omega_idx with the trace inner product.
        const Complex c = (basis.elements[idx].adjoint() * X).trace() / s;
        sq += std::norm(c);
    }
    return std::sqrt(sq * s);
}

void check_pairs(const OrthonormalBasis& basis, const std::vector<int>& left,
                 const std::vector<int>& right, const std::vector<int>& forbidden,
                 const char* relation, double tol, CartanReport& report) {
    for (int i : left) {
        for (int j : right) {
            const ComplexMatrix C = commutator(basis.elements[i], basis.elements[j]);
            const double leak = subspace_leak(C, basis, forbidden);
            if (leak > tol) {
                report.ok = false;
                report.violations.push_back({relation, i, j, leak});
            }
        }
    }
}

}  // namespace

CartanReport verify_cartan(const OrthonormalBasis& basis, const CartanSplit& split, double tol) {
    const int n = basis.size();
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (int i : split.p_indices) {
        if (i < 0 || i >= n || seen[static_cast<size_t>(i)]++)
            throw Error(ErrorKind::config, "verify_cartan: invalid or duplicate p index");
    }
    for (int i : split.eps_indices) {
        if (i < 0 || i >= n || seen[static_cast<size_t>(i)]++)
            throw Error(ErrorKind::config, "verify_cartan: invalid or duplicate eps index");
    }
    if (split.p_indices.size() + split.eps_indices.size() != static_cast<size_t>(n))
        throw Error(ErrorKind::config, "verify_cartan: split does not cover the basis");

    CartanReport report;
    // [p,p] subset eps, [p,eps] subset p, [eps,eps] subset eps.
    check_pairs(basis, split.p_indices, split.p_indices, split.p_indices, "pp->eps", tol, report);
    check_pairs(basis, split.p_indices, split.eps_indices, split.eps_indices, "pe->p", tol,
                report);
    check_pairs(basis, split.eps_indices, split.eps_indices, split.p_indices, "ee->eps", tol,
                report);
    return report;
}

std::pair<OrthonormalBasis, CartanSplit> preset_split(SplitPreset kind) {
    switch (kind) {
        case SplitPreset::one_qubit: {
            // p = {sx, sy}, eps = {sz} in the Bloch convention.
            return {pauli_bloch_basis(), CartanSplit{{0, 1}, {2}}};
        }
        case SplitPreset::qutrit_v: {
            // The printed qutrit basis Omega_1..Omega_8: Omega_1/2 act on the
            // (1,2) pair, Omega_3 = diag(0,1,-1)/sqrt2, Omega_4/5 on (0,1),
            // Omega_6/7 on (0,2), Omega_8 = diag(-2,1,1)/sqrt6.
            OrthonormalBasis basis;
            basis.dim = 3;
            basis.convention = BasisConvention::orthonormal;
            const double a = 1.0 / std::sqrt(2.0);
            auto sym = [&](int j, int k) {
                ComplexMatrix M = ComplexMatrix::Zero(3, 3);
                M(j, k) = M(k, j) = a;
                return M;
            };
            auto asym = [&](int j, int k) {
                ComplexMatrix M = ComplexMatrix::Zero(3, 3);
                M(j, k) = Complex(0, -a);
                M(k, j) = Complex(0, a);
                return M;
            };
            ComplexMatrix d3 = ComplexMatrix::Zero(3, 3);
            d3(1, 1) = a;
            d3(2, 2) = -a;
            ComplexMatrix d8 = ComplexMatrix::Zero(3, 3);
            const double b = 1.0 / std::sqrt(6.0);
            d8(0, 0) = -2 * b;
            d8(1, 1) = b;
            d8(2, 2) = b;
            basis.elements = {sym(1, 2), asym(1, 2), d3, sym(0, 1), asym(0, 1), sym(0, 2),
                              asym(0, 2), d8};
            return {basis, CartanSplit{{3, 4, 5, 6}, {0, 1, 2, 7}}};
        }
        case SplitPreset::two_qubit: {
            // p = {si (x) sj / 2}, eps = {si (x) I / 2, I (x) sj / 2}.
            OrthonormalBasis pauli = pauli_bloch_basis();
            OrthonormalBasis basis;
            basis.dim = 4;
            basis.convention = BasisConvention::orthonormal;
            const ComplexMatrix I2 = ComplexMatrix::Identity(2, 2);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    basis.elements.push_back(
                        (0.5 * kron(pauli.elements[i], pauli.elements[j])).eval());
            for (int i = 0; i < 3; ++i)
                basis.elements.push_back((0.5 * kron(pauli.elements[i], I2)).eval());
            for (int j = 0; j < 3; ++j)
                basis.elements.push_back((0.5 * kron(I2, pauli.elements[j])).eval());
            CartanSplit split;
            for (int i = 0; i < 9; ++i) split.p_indices.push_back(i);
            for (int i = 9; i < 15; ++i) split.eps_indices.push_back(i);
            return {basis, split};
        }
    }
    throw Error(ErrorKind::config, "preset_split: unknown preset");
}

AntisymmetricExp::AntisymmetricExp(const RealMatrix& A, double tol) {
    if (A.rows() != A.cols())
        throw Error(ErrorKind::config, "AntisymmetricExp: matrix must be square");
    if ((A + A.transpose()).norm() > tol * std::max(1.0, A.norm()))
        throw Error(ErrorKind::numerical, "AntisymmetricExp: matrix is not antisymmetric");
    // iA is Hermitian; its eigendecomposition gives exp(At) = V exp(-i L t) V^dag.
    ComplexMatrix iA = Complex(0.0, 1.0) * A.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(iA);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::numerical, "AntisymmetricExp: eigendecomposition failed");
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors();
}

RealMatrix AntisymmetricExp::at(double t) const {
    const int n = size();
    ComplexMatrix phases = ComplexMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        phases(k, k) = std::exp(Complex(0.0, -eigenvalues_(k) * t));
    }
    return (eigenvectors_ * phases * eigenvectors_.adjoint()).real();
}

RealVector AntisymmetricExp::apply(double t, const RealVector& v) const {
    const int n = size();
    Eigen::VectorXcd w = eigenvectors_.adjoint() * v.cast<Complex>();
    for (int k = 0; k < n; ++k) {
        w(k) *= std::exp(Complex(0.0, -eigenvalues_(k) * t));
    }
    return (eigenvectors_ * w).real();
}

std::vector<double> AntisymmetricExp::frequencies(double tol) const {
    const double scale = size() > 0 ? eigenvalues_.cwiseAbs().maxCoeff() : 0.0;
    const double zero_cut = tol * std::max(1.0, scale);
    std::vector<double> freqs;
    for (int k = 0; k < size(); ++k) {
        const double f = std::abs(eigenvalues_(k)) <= zero_cut ? 0.0 : std::abs(eigenvalues_(k));
        bool found = false;
        for (double existing : freqs) {
            if (std::abs(existing - f) <= tol * std::max(1.0, std::abs(existing))) {
                found = true;
                break;
            }
        }
        if (!found) freqs.push_back(f);
    }
    std::sort(freqs.begin(), freqs.end());
    return freqs;
}

}  // namespace qdec
