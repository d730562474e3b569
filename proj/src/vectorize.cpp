#include "qdecouple/vectorize.hpp"

#include <cmath>

namespace qdec {

void OpenSystemSpec::validate() const {
    if (dim < 2) throw Error(ErrorKind::config, "OpenSystemSpec: dim must be >= 2");
    auto check_dim = [&](const ComplexMatrix& M, const char* what) {
        if (M.rows() != dim || M.cols() != dim)
            throw Error(ErrorKind::config, std::string("OpenSystemSpec: ") + what +
                                               " has wrong dimension");
    };
    check_dim(H0, "H0");
    if (!detail::is_hermitian(H0, 1e-10))
        throw Error(ErrorKind::config, "OpenSystemSpec: H0 is not Hermitian");
    for (const auto& H : controls) {
        check_dim(H, "control Hamiltonian");
        if (!detail::is_hermitian(H, 1e-10))
            throw Error(ErrorKind::config, "OpenSystemSpec: control Hamiltonian is not Hermitian");
    }
    for (const auto& ch : lindblads) {
        check_dim(ch.op, "Lindblad operator");
        if (!(ch.rate > 0.0))
            throw Error(ErrorKind::config, "OpenSystemSpec: Lindblad rate must be positive");
    }
}

double CoherenceVector::purity_excess(int dim) const {
    const double s = convention == BasisConvention::pauli_bloch ? 2.0 : 1.0;
    // tr rho^2 = 1/N + |m|^2 / s, so the purity bound tr rho^2 <= 1 reads
    // |m|^2 / s <= 1 - 1/N.
    return m.squaredNorm() / s - (1.0 - 1.0 / dim);
}

CoherenceVector rho_to_coherence(const ComplexMatrix& rho, const OrthonormalBasis& basis) {
    if (rho.rows() != basis.dim || rho.cols() != basis.dim)
        throw Error(ErrorKind::config, "rho_to_coherence: state dimension mismatch");
    if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
        throw Error(ErrorKind::config, "rho_to_coherence: state must have unit trace");
    if (!detail::is_hermitian(rho, 1e-10))
        throw Error(ErrorKind::config, "rho_to_coherence: state must be Hermitian");
    CoherenceVector out;
    out.convention = basis.convention;
    out.m.resize(basis.size());
    for (int j = 0; j < basis.size(); ++j) {
        out.m(j) = (basis.elements[j] * rho).trace().real();
    }
    return out;
}

ComplexMatrix coherence_to_rho(const CoherenceVector& cv, const OrthonormalBasis& basis) {
    if (cv.m.size() != basis.size())
        throw Error(ErrorKind::config, "coherence_to_rho: coordinate count mismatch");
    const double s = basis.element_norm2();
    ComplexMatrix rho =
        ComplexMatrix::Identity(basis.dim, basis.dim) / static_cast<double>(basis.dim);
    for (int j = 0; j < basis.size(); ++j) {
        rho += (cv.m(j) / s) * basis.elements[j];
    }
    return rho;
}

ComplexMatrix lindblad_dissipator(const ComplexMatrix& L, const ComplexMatrix& X) {
    const ComplexMatrix LdL = L.adjoint() * L;
    return L * X * L.adjoint() - 0.5 * (LdL * X + X * LdL);
}

ComplexMatrix master_equation_rhs(const OpenSystemSpec& spec, const ComplexMatrix& rho,
                                  const RealVector& u) {
    ComplexMatrix H = spec.H0;
    for (size_t i = 0; i < spec.controls.size(); ++i) {
        H += u(static_cast<Eigen::Index>(i)) * spec.controls[i];
    }
    ComplexMatrix out = Complex(0.0, -1.0) * commutator(H, rho);
    for (const auto& ch : spec.lindblads) {
        out += ch.rate * lindblad_dissipator(ch.op, rho);
    }
    return out;
}

VectorizedSystem vectorize(const OpenSystemSpec& spec, const OrthonormalBasis& basis,
                           const CartanSplit& split) {
    spec.validate();
    if (spec.dim != basis.dim)
        throw Error(ErrorKind::config, "vectorize: spec and basis dimensions differ");
    VectorizedSystem vs;
    vs.basis = basis;
    vs.split = split;
    vs.O0 = adjoint_rep(spec.H0, basis);
    vs.controls_O.reserve(spec.controls.size());
    for (const auto& H : spec.controls) {
        vs.controls_O.push_back(adjoint_rep(H, basis));
    }
    const int n = basis.size();
    const double s = basis.element_norm2();
    vs.D = RealMatrix::Zero(n, n);
    vs.g = RealVector::Zero(n);
    const ComplexMatrix I = ComplexMatrix::Identity(basis.dim, basis.dim);
    for (const auto& ch : spec.lindblads) {
        const ComplexMatrix dI = lindblad_dissipator(ch.op, I);
        for (int j = 0; j < n; ++j) {
            vs.g(j) += ch.rate * (basis.elements[j] * dI).trace().real() / basis.dim;
            for (int k = 0; k < n; ++k) {
                const ComplexMatrix dk = lindblad_dissipator(ch.op, basis.elements[k]);
                vs.D(j, k) += ch.rate * (basis.elements[j] * dk).trace().real() / s;
            }
        }
    }
    return vs;
}

AssumptionReport check_assumptions(const VectorizedSystem& vs) {
    AssumptionReport rep;
    rep.h1_commutator_norm = (vs.O0 * vs.D - vs.D * vs.O0).norm();
    rep.h1_drift_norm = (vs.O0 * vs.g).norm();
    rep.h1 = rep.h1_commutator_norm <= 1e-10 && rep.h1_drift_norm <= 1e-10;

    const RealMatrix sym = 0.5 * (vs.D + vs.D.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym);
    rep.h2_max_eigenvalue = es.eigenvalues().maxCoeff();
    rep.h2 = rep.h2_max_eigenvalue < -1e-12;

    // H3: -i H0 lies in eps. ad is faithful on su(N), so the p-component of H0
    // vanishes exactly when the p<->eps coupling blocks of O0 do; the leak is
    // the norm of those blocks.
    double leak_sq = 0.0;
    for (int i : vs.split.p_indices) {
        for (int l : vs.split.eps_indices) {
            leak_sq += vs.O0(i, l) * vs.O0(i, l) + vs.O0(l, i) * vs.O0(l, i);
        }
    }
    rep.h3_leak = std::sqrt(leak_sq);
    rep.h3 = rep.h3_leak <= 1e-10;
    return rep;
}

RealVector BlockForm::unpermute(const RealVector& v) const {
    RealVector out(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) out(perm[static_cast<size_t>(k)]) = v(k);
    return out;
}

RealVector BlockForm::permute(const RealVector& v) const {
    RealVector out(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) out(k) = v(perm[static_cast<size_t>(k)]);
    return out;
}

BlockForm block_split(const VectorizedSystem& vs) {
    const AssumptionReport rep = check_assumptions(vs);
    if (!rep.h3) {
        throw Error(ErrorKind::infeasible,
                    "block_split: H3 violated, O0 couples p and eps with leakage norm " +
                        std::to_string(rep.h3_leak));
    }
    BlockForm bf;
    bf.assumptions = rep;
    bf.m = static_cast<int>(vs.split.p_indices.size());
    bf.perm = vs.split.p_indices;
    bf.perm.insert(bf.perm.end(), vs.split.eps_indices.begin(), vs.split.eps_indices.end());
    const int n = vs.size();
    const int ne = n - bf.m;

    auto permuted = [&](const RealMatrix& M) {
        RealMatrix P(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) P(r, c) = M(bf.perm[static_cast<size_t>(r)],
                                                     bf.perm[static_cast<size_t>(c)]);
        return P;
    };

    const RealMatrix O0p = permuted(vs.O0);
    bf.O0_11 = O0p.topLeftCorner(bf.m, bf.m);
    bf.O0_22 = O0p.bottomRightCorner(ne, ne);

    const RealMatrix Dp = permuted(vs.D);
    bf.D11 = Dp.topLeftCorner(bf.m, bf.m);
    bf.D12 = Dp.topRightCorner(bf.m, ne);
    bf.D21 = Dp.bottomLeftCorner(ne, bf.m);
    bf.D22 = Dp.bottomRightCorner(ne, ne);

    RealVector gp(n);
    for (int r = 0; r < n; ++r) gp(r) = vs.g(bf.perm[static_cast<size_t>(r)]);
    bf.g1 = gp.head(bf.m);
    bf.g2 = gp.tail(ne);

    for (size_t i = 0; i < vs.controls_O.size(); ++i) {
        const RealMatrix Op = permuted(vs.controls_O[i]);
        const double diag_leak = std::max(Op.topLeftCorner(bf.m, bf.m).norm(),
                                          Op.bottomRightCorner(ne, ne).norm());
        if (diag_leak > 1e-10) {
            throw Error(ErrorKind::infeasible,
                        "block_split: control " + std::to_string(i) +
                            " is not p-valued, diagonal block norm " + std::to_string(diag_leak));
        }
        bf.controls_O12.push_back(Op.topRightCorner(bf.m, ne));
    }
    return bf;
}

}  // namespace qdec
