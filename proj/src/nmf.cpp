#include "cnmf/nmf.hpp"

#include "cnmf/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>

namespace cnmf {

void SolverConfig::validate() const {
    if (rank < 1) throw ContractError("SolverConfig: rank must be >= 1");
    if (max_iters < 1) throw ContractError("SolverConfig: max_iters must be >= 1");
    if (!(rel_tol > 0.0)) throw ContractError("SolverConfig: rel_tol must be > 0");
}

RealMatrix NeighborGraph::dense_weights() const { return RealMatrix(Mat(weights)); }

RealMatrix NeighborGraph::laplacian() const {
    Mat l = -Mat(weights);
    l.diagonal() += degree;
    return RealMatrix(std::move(l));
}

namespace {

struct Factors {
    Mat w;
    Mat h;
};

Factors draw_factors(std::size_t d, std::size_t n, const SolverConfig& config) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto r = static_cast<Eigen::Index>(config.rank);
    Factors f{Mat(static_cast<Eigen::Index>(d), r), Mat(r, static_cast<Eigen::Index>(n))};
    // 1 - u maps [0,1) onto (0,1]
    for (Eigen::Index i = 0; i < f.w.size(); ++i) f.w.data()[i] = 1.0 - unit(rng);
    for (Eigen::Index i = 0; i < f.h.size(); ++i) f.h.data()[i] = 1.0 - unit(rng);
    return f;
}

double reconstruction_cost(const Mat& x, const Mat& w, const Mat& h) {
    return 0.5 * (x - w * h).squaredNorm();
}

bool converged(double prev, double cur, double rel_tol) {
    const double scale = std::abs(prev);
    if (scale == 0.0) return true;
    return std::abs(prev - cur) / scale < rel_tol;
}

// One H update followed by one W update per sweep. The hooks add the penalty
// contributions to the numerator/denominator; the base solver passes no-ops so
// that every variant shares the exact same arithmetic for the NMF part.
template <class HTerms, class WTerms, class Objective>
FactorPair run_sweeps(const Mat& x, const SolverConfig& config, Factors f, HTerms&& h_terms, WTerms&& w_terms,
                      Objective&& objective) {
    config.validate();

    std::vector<double> trace;
    trace.reserve(config.max_iters + 1);
    trace.push_back(objective(f.w, f.h));

    Mat numer, denom;
    for (std::size_t it = 0; it < config.max_iters; ++it) {
        const Mat wtw = f.w.transpose() * f.w;
        numer = f.w.transpose() * x;
        denom = wtw * f.h;
        h_terms(f.h, numer, denom);
        kernel::hadamard_update(f.h, numer, denom, kUpdateEps);

        const Mat hht = f.h * f.h.transpose();
        numer = x * f.h.transpose();
        denom = f.w * hht;
        w_terms(f.w, numer, denom);
        kernel::hadamard_update(f.w, numer, denom, kUpdateEps);

        const double cur = objective(f.w, f.h);
        const double prev = trace.back();
        trace.push_back(cur);
        if (!std::isfinite(cur)) throw SingularError("factorization diverged at sweep " + std::to_string(it + 1));
        if (converged(prev, cur, config.rel_tol)) break;
    }
    return FactorPair{NonNegMatrix(std::move(f.w)), NonNegMatrix(std::move(f.h)), std::move(trace)};
}

constexpr auto no_terms = [](const Mat&, Mat&, Mat&) {};

Factors starting_point(const Mat& x, const SolverConfig& config, const FactorPair* initial) {
    config.validate();
    if (initial == nullptr) {
        return draw_factors(static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(x.cols()), config);
    }
    const auto r = static_cast<Eigen::Index>(config.rank);
    const Mat& w = initial->w.mat();
    const Mat& h = initial->h.mat();
    if (w.rows() != x.rows() || w.cols() != r || h.rows() != r || h.cols() != x.cols()) {
        throw ContractError("initial factors do not match the data shape and rank");
    }
    return Factors{w, h};
}

}  // namespace

FactorPair init_factors(std::size_t d, std::size_t n, const SolverConfig& config) {
    if (d < 1 || n < 1) throw ContractError("init_factors: d and n must be >= 1");
    config.validate();
    Factors f = draw_factors(d, n, config);
    return FactorPair{NonNegMatrix(std::move(f.w)), NonNegMatrix(std::move(f.h)), {}};
}

FactorPair nmf_solve(const NonNegMatrix& x, const SolverConfig& config, const FactorPair* initial) {
    const Mat& xm = x.mat();
    return run_sweeps(xm, config, starting_point(xm, config, initial), no_terms, no_terms,
                      [&](const Mat& w, const Mat& h) { return reconstruction_cost(xm, w, h); });
}

NeighborGraph build_graph(const NonNegMatrix& x, std::size_t k_neighbors) {
    const auto n = static_cast<Eigen::Index>(x.cols());
    if (k_neighbors < 1 || static_cast<Eigen::Index>(k_neighbors) >= n) {
        throw ContractError("build_graph: need 1 <= k < n, got k=" + std::to_string(k_neighbors) +
                            " with n=" + std::to_string(n));
    }
    const Mat& xm = x.mat();
    const auto k = static_cast<Eigen::Index>(k_neighbors);

    std::vector<std::vector<Eigen::Index>> adjacent(static_cast<std::size_t>(n));
    std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n - 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::size_t slot = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            dist[slot++] = {(xm.col(i) - xm.col(j)).squaredNorm(), j};
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        for (Eigen::Index q = 0; q < k; ++q) {
            const Eigen::Index j = dist[static_cast<std::size_t>(q)].second;
            adjacent[static_cast<std::size_t>(i)].push_back(j);
            adjacent[static_cast<std::size_t>(j)].push_back(i);
        }
    }

    std::vector<Eigen::Triplet<double>> triplets;
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& row = adjacent[static_cast<std::size_t>(i)];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        for (Eigen::Index j : row) triplets.emplace_back(i, j, 1.0);
    }

    NeighborGraph g;
    g.weights.resize(n, n);
    g.weights.setFromTriplets(triplets.begin(), triplets.end());
    g.weights.makeCompressed();
    g.degree = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        g.degree(i) = static_cast<double>(adjacent[static_cast<std::size_t>(i)].size());
    }
    return g;
}

double graph_penalty(const Mat& h, const NeighborGraph& graph) {
    const Mat ha = h * graph.weights;
    double tr = 0.0;
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
        tr += graph.degree(j) * h.col(j).squaredNorm() - h.col(j).dot(ha.col(j));
    }
    return tr;
}

FactorPair gnmf_solve(const NonNegMatrix& x, const NeighborGraph& graph, double lambda,
                      const SolverConfig& config, const FactorPair* initial) {
    if (!(lambda >= 0.0)) throw ContractError("gnmf_solve: lambda must be >= 0");
    if (graph.size() != x.cols()) {
        throw ContractError("gnmf_solve: graph has " + std::to_string(graph.size()) + " nodes but x has " +
                            std::to_string(x.cols()) + " columns");
    }
    const Mat& xm = x.mat();
    const Eigen::RowVectorXd degree = graph.degree.transpose();

    auto h_terms = [&](const Mat& h, Mat& numer, Mat& denom) {
        if (lambda == 0.0) return;
        numer += lambda * (h * graph.weights);
        denom += lambda * (h.array().rowwise() * degree.array()).matrix();
    };
    auto objective = [&](const Mat& w, const Mat& h) {
        const double base = reconstruction_cost(xm, w, h);
        return lambda == 0.0 ? base : base + 0.5 * lambda * graph_penalty(h, graph);
    };
    return run_sweeps(xm, config, starting_point(xm, config, initial), h_terms, no_terms, objective);
}

FactorPair frnmf_solve(const NonNegMatrix& x, double lambda, const SolverConfig& config,
                       const FactorPair* initial) {
    if (!(lambda >= 0.0)) throw ContractError("frnmf_solve: lambda must be >= 0");
    const Mat& xm = x.mat();
    const Mat xxt = xm * xm.transpose();

    auto w_terms = [&](const Mat& w, Mat& numer, Mat& denom) {
        if (lambda == 0.0) return;
        numer += lambda * (xxt * w);
        denom += (0.5 * lambda * lambda) * (w * (w.transpose() * w));
    };
    // ½‖XXᵀ − λWWᵀ‖² − ½‖XXᵀ‖² = ½λ²‖WᵀW‖² − λ·Tr(WᵀXXᵀW)
    auto objective = [&](const Mat& w, const Mat& h) {
        const double base = reconstruction_cost(xm, w, h);
        if (lambda == 0.0) return base;
        const Mat wtw = w.transpose() * w;
        const double cross = (w.transpose() * xxt * w).trace();
        return base + 0.5 * lambda * lambda * wtw.squaredNorm() - lambda * cross;
    };
    return run_sweeps(xm, config, starting_point(xm, config, initial), no_terms, w_terms, objective);
}

}  // namespace cnmf
