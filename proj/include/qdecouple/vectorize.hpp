#pragma once

#include <optional>
#include <vector>

#include "qdecouple/algebra.hpp"

namespace qdec {

struct LindbladChannel {
    ComplexMatrix op;  // L_j, any N x N complex matrix
    double rate;       // Gamma_j > 0, units 1/time
};

struct OpenSystemSpec {
    int dim = 0;
    ComplexMatrix H0;
    std::vector<ComplexMatrix> controls;  // control Hamiltonians H_i
    std::vector<LindbladChannel> lindblads;

    void validate() const;
};

struct CoherenceVector {
    RealVector m;
    BasisConvention convention = BasisConvention::orthonormal;

    // tr(rho^2) - 1/N expressed through |m|; the purity cap it must respect.
    double purity_excess(int dim) const;
};

// Real coherence-vector form dm/dt = O0 m + sum_i u_i O_i m + D m + g.
struct VectorizedSystem {
    RealMatrix O0;
    std::vector<RealMatrix> controls_O;
    RealMatrix D;
    RealVector g;
    OrthonormalBasis basis;
    CartanSplit split;

    int size() const { return static_cast<int>(O0.rows()); }
};

struct AssumptionReport {
    bool h1 = false;  // [O0, D] = 0 and O0 g = 0
    bool h2 = false;  // sym(D) strictly negative definite
    bool h3 = false;  // -i H0 in eps
    double h1_commutator_norm = 0.0;
    double h1_drift_norm = 0.0;
    double h2_max_eigenvalue = 0.0;
    double h3_leak = 0.0;

    bool all() const { return h1 && h2 && h3; }
};

// Block partition with p-coordinates first (Lemma 2 structure).
struct BlockForm {
    int m = 0;                    // dim of the p block
    std::vector<int> perm;        // perm[new] = old basis index
    RealMatrix O0_11, O0_22;
    std::vector<RealMatrix> controls_O12;  // O_i^{12}, one per control
    RealMatrix D11, D12, D21, D22;
    RealVector g1, g2;
    AssumptionReport assumptions;

    int eps_size() const { return static_cast<int>(O0_22.rows()); }
    // Map a p-first-ordered vector back to original basis ordering.
    RealVector unpermute(const RealVector& v) const;
    RealVector permute(const RealVector& v) const;
};

CoherenceVector rho_to_coherence(const ComplexMatrix& rho, const OrthonormalBasis& basis);
ComplexMatrix coherence_to_rho(const CoherenceVector& m, const OrthonormalBasis& basis);

// D[L] rho = L rho L^dag - (L^dag L rho + rho L^dag L)/2.
ComplexMatrix lindblad_dissipator(const ComplexMatrix& L, const ComplexMatrix& X);

// Right-hand side of the master equation for state rho under H0 + sum u_i H_i.
ComplexMatrix master_equation_rhs(const OpenSystemSpec& spec, const ComplexMatrix& rho,
                                  const RealVector& u);

VectorizedSystem vectorize(const OpenSystemSpec& spec, const OrthonormalBasis& basis,
                           const CartanSplit& split);

AssumptionReport check_assumptions(const VectorizedSystem& vs);

// Requires H3; throws with the leakage norm otherwise. Also verifies the
// Lemma 2 block structure of every control generator.
BlockForm block_split(const VectorizedSystem& vs);

}  // namespace qdec
