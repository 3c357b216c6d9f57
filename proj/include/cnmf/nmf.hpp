#pragma once

#include "cnmf/matrix.hpp"

#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cnmf {

struct SolverConfig {
    std::size_t rank = 2;
    std::size_t max_iters = 200;
    double rel_tol = 1e-4;  ///< stop once |f_{t-1} - f_t| / f_{t-1} drops below this
    std::uint64_t seed = 0;

    void validate() const;
};

/// W (d×r) and H (r×n) plus the objective after initialization and after every sweep.
struct FactorPair {
    NonNegMatrix w;
    NonNegMatrix h;
    std::vector<double> objective_trace;

    std::size_t iterations() const { return objective_trace.empty() ? 0 : objective_trace.size() - 1; }
};

/// Symmetrized k-nearest-neighbour graph over the columns of a data matrix, 0/1 weights.
struct NeighborGraph {
    Eigen::SparseMatrix<double> weights;  ///< n×n, symmetric, zero diagonal
    Vec degree;                           ///< D_jj = sum_l weights_jl

    std::size_t size() const { return static_cast<std::size_t>(degree.size()); }
    RealMatrix dense_weights() const;
    /// L = D - weights
    RealMatrix laplacian() const;
};

/// W and H with entries drawn i.i.d. from (0, 1]; W first, then H, both column-major.
FactorPair init_factors(std::size_t d, std::size_t n, const SolverConfig& config);

/// Lee–Seung multiplicative updates for ½‖X − WH‖²_F, H first then W each sweep.
/// Every solver starts from init_factors(config) unless `initial` is given.
FactorPair nmf_solve(const NonNegMatrix& x, const SolverConfig& config, const FactorPair* initial = nullptr);

/// Euclidean k-NN over columns of x; ties go to the lower column index.
NeighborGraph build_graph(const NonNegMatrix& x, std::size_t k_neighbors);

/// Graph-regularized NMF. The trace records ½‖X − WH‖²_F + (λ/2)·Tr(H L Hᵀ), which is
/// half of ‖X − WH‖²_F + λ·Tr(H L Hᵀ) and so shares its minimizers and descent behaviour.
FactorPair gnmf_solve(const NonNegMatrix& x, const NeighborGraph& graph, double lambda,
                      const SolverConfig& config, const FactorPair* initial = nullptr);

/// Feature-relationship-preserving NMF with the W update
///   W ← W ⊙ (XHᵀ + λ·XXᵀW) / (WHHᵀ + (λ²/2)·WWᵀW).
/// The trace records ½‖X − WH‖²_F + ½‖XXᵀ − λWWᵀ‖²_F minus the constant ½‖XXᵀ‖²_F.
FactorPair frnmf_solve(const NonNegMatrix& x, double lambda, const SolverConfig& config,
                       const FactorPair* initial = nullptr);

/// Tr(H L Hᵀ) for the given graph.
double graph_penalty(const Mat& h, const NeighborGraph& graph);

}  // namespace cnmf
