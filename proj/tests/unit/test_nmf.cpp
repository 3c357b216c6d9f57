#include "cnmf/data.hpp"
#include "cnmf/error.hpp"
#include "cnmf/nmf.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace cnmf;

namespace {

SolverConfig cfg(std::size_t rank, std::size_t iters, std::uint64_t seed, double rel_tol = 1e-300) {
    return SolverConfig{rank, iters, rel_tol, seed};
}

bool non_increasing(const std::vector<double>& trace, double slack) {
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i] > trace[i - 1] + slack) return false;
    }
    return true;
}

// Brute-force symmetrized k-NN adjacency: every pair distance, sorted by (distance, index).
std::set<std::pair<std::size_t, std::size_t>> brute_graph(const Mat& x, std::size_t k) {
    const auto n = static_cast<std::size_t>(x.cols());
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, std::size_t>> d;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double s = 0.0;
            for (Eigen::Index r = 0; r < x.rows(); ++r) {
                const double diff = x(r, static_cast<Eigen::Index>(i)) - x(r, static_cast<Eigen::Index>(j));
                s += diff * diff;
            }
            d.emplace_back(s, j);
        }
        std::sort(d.begin(), d.end());
        for (std::size_t q = 0; q < k; ++q) {
            edges.insert({i, d[q].second});
            edges.insert({d[q].second, i});
        }
    }
    return edges;
}

NonNegMatrix blob_matrix(std::size_t cl, std::size_t f, std::size_t n, std::uint64_t seed) {
    BlobSpec spec;
    spec.n_centers = cl;
    spec.n_features = f;
    spec.n_samples = n;
    spec.seed = seed;
    return minmax_scale(make_blobs(spec)).x();
}

}  // namespace

TEST_CASE("init_factors") {
    const auto a = init_factors(4, 6, cfg(3, 1, 42));
    const auto b = init_factors(4, 6, cfg(3, 1, 42));
    CHECK(a.w.mat() == b.w.mat());
    CHECK(a.h.mat() == b.h.mat());
    CHECK(a.w.mat() != init_factors(4, 6, cfg(3, 1, 43)).w.mat());

    const auto small = init_factors(2, 2, cfg(1, 1, 0));
    CHECK(small.w.rows() == 2);
    CHECK(small.w.cols() == 1);
    CHECK(small.h.rows() == 1);
    CHECK(small.h.cols() == 2);

    CHECK(a.w.mat().minCoeff() > 0.0);
    CHECK(a.h.mat().minCoeff() > 0.0);
    CHECK(a.w.mat().maxCoeff() <= 1.0);
}

TEST_CASE("nmf_solve: exact product of the initial factors stays at the fixed point") {
    const auto config = cfg(3, 50, 9);
    const auto init = init_factors(8, 10, config);
    const NonNegMatrix x(Mat(init.w.mat() * init.h.mat()));
    const auto result = nmf_solve(x, config);
    CHECK(result.objective_trace.front() < 1e-24);
    for (double v : result.objective_trace) CHECK(v < 1e-18);
}

TEST_CASE("nmf_solve: objective non-increasing on random data") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 5; ++trial) {
        const NonNegMatrix x(oracle::random_nonneg(50, 30, rng));
        const auto result = nmf_solve(x, cfg(5, 200, static_cast<std::uint64_t>(trial)));
        CHECK(result.objective_trace.size() == 201);
        CHECK(non_increasing(result.objective_trace, 1e-9));
        CHECK(result.w.cols() == 5);
        CHECK(result.h.rows() == 5);
    }
}

TEST_CASE("nmf_solve: rank-1 data is recovered") {
    Vec u(6), v(9);
    u << 1, 2, 3, 0.5, 4, 2.5;
    v << 0.3, 1, 2, 0.7, 1.1, 0.2, 3, 1.5, 0.9;
    const NonNegMatrix x(Mat(u * v.transpose()));
    const auto result = nmf_solve(x, cfg(1, 2000, 3));
    // verify by direct reconstruction, not through the trace
    const double rel = (x.mat() - result.w.mat() * result.h.mat()).norm() / x.mat().norm();
    CHECK(rel < 1e-3);
}

TEST_CASE("nmf_solve: stops on relative change") {
    std::mt19937_64 rng(5);
    const NonNegMatrix x(oracle::random_nonneg(20, 15, rng));
    const auto result = nmf_solve(x, SolverConfig{3, 500, 1e-3, 0});
    CHECK(result.iterations() < 500);
    const auto& t = result.objective_trace;
    CHECK(std::abs(t[t.size() - 2] - t.back()) / t[t.size() - 2] < 1e-3);
}

TEST_CASE("build_graph") {
    SUBCASE("two nodes") {
        const auto g = build_graph(NonNegMatrix{{0.1, 0.9}}, 1);
        CHECK(g.dense_weights().mat() == Mat{{0, 1}, {1, 0}});
        CHECK(g.laplacian().mat() == Mat{{1, -1}, {-1, 1}});
    }
    SUBCASE("three colinear points") {
        const NonNegMatrix x{{0.0, 0.5, 1.0}};
        const auto edges = brute_graph(x.mat(), 1);
        CHECK(edges.count({1, 0}) == 1);
        CHECK(edges.count({1, 2}) == 1);
        const auto g = build_graph(x, 1);
        const Mat w = g.dense_weights().mat();
        CHECK(w(1, 0) == 1.0);
        CHECK(w(1, 2) == 1.0);
        CHECK(w(0, 2) == 0.0);
        CHECK(g.degree(1) == 2.0);
    }
    SUBCASE("matches a brute-force scan on random data") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 10; ++trial) {
            const NonNegMatrix x(oracle::random_nonneg(4, 25, rng));
            const std::size_t k = 1 + static_cast<std::size_t>(trial % 5);
            const auto g = build_graph(x, k);
            const auto edges = brute_graph(x.mat(), k);
            const Mat w = g.dense_weights().mat();
            std::size_t ones = 0;
            for (Eigen::Index i = 0; i < w.rows(); ++i) {
                for (Eigen::Index j = 0; j < w.cols(); ++j) {
                    const bool edge = edges.count({static_cast<std::size_t>(i), static_cast<std::size_t>(j)}) > 0;
                    CHECK(w(i, j) == (edge ? 1.0 : 0.0));
                    ones += edge ? 1 : 0;
                }
            }
            CHECK(w == w.transpose());
            CHECK(w.diagonal().isZero(0.0));
            CHECK(g.laplacian().mat().rowwise().sum().cwiseAbs().maxCoeff() < 1e-9);
            CHECK(ones == static_cast<std::size_t>(g.degree.sum()));
        }
    }
    SUBCASE("duplicate columns are fine") {
        const NonNegMatrix x{{0.2, 0.2, 0.2, 0.9}};
        const auto g = build_graph(x, 2);
        CHECK(g.laplacian().mat().rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(build_graph(NonNegMatrix{{0.1, 0.9}}, 2), ContractError);
    CHECK_THROWS_AS(build_graph(NonNegMatrix{{0.1, 0.9}}, 0), ContractError);
}

TEST_CASE("lambda = 0 reduces GNMF and FR-NMF to base NMF") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 4; ++trial) {
        const NonNegMatrix x(oracle::random_nonneg(12, 20, rng));
        const auto config = SolverConfig{4, 100, 1e-6, static_cast<std::uint64_t>(trial)};
        const auto base = nmf_solve(x, config);
        const auto g = gnmf_solve(x, build_graph(x, 5), 0.0, config);
        const auto f = frnmf_solve(x, 0.0, config);
        REQUIRE(g.objective_trace.size() == base.objective_trace.size());
        REQUIRE(f.objective_trace.size() == base.objective_trace.size());
        for (std::size_t i = 0; i < base.objective_trace.size(); ++i) {
            CHECK(std::abs(g.objective_trace[i] - base.objective_trace[i]) <= 1e-12);
            CHECK(std::abs(f.objective_trace[i] - base.objective_trace[i]) <= 1e-12);
        }
    }
}

TEST_CASE("gnmf_solve: objective non-increasing on blob data") {
    const NonNegMatrix x = blob_matrix(3, 10, 120, 0);
    const auto graph = build_graph(x, 5);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto result = gnmf_solve(x, graph, 0.5, cfg(4, 200, seed));
        CHECK(non_increasing(result.objective_trace, 1e-6));
        CHECK(result.w.mat().minCoeff() >= 0.0);
        CHECK(result.h.mat().minCoeff() >= 0.0);
    }
}

TEST_CASE("gnmf_solve: identical connected columns get identical codes") {
    Mat x(5, 6);
    for (Eigen::Index j = 0; j < 6; ++j) x.col(j) << 0.2, 0.7, 0.4, 0.9, 0.1;
    const NonNegMatrix xm(x);
    const auto graph = build_graph(xm, 5);  // complete graph
    const auto result = gnmf_solve(xm, graph, 1.0, cfg(2, 3000, 4));
    const double penalty = graph_penalty(result.h.mat(), graph);
    CHECK(penalty < 1e-8 * std::max(1.0, result.h.mat().squaredNorm()));
}

TEST_CASE("frnmf_solve") {
    std::mt19937_64 rng(2024);
    const NonNegMatrix x(oracle::random_nonneg(20, 20, rng));
    const auto result = frnmf_solve(x, 0.3, cfg(3, 200, 1));
    REQUIRE(result.objective_trace.size() == 201);
    CHECK(result.objective_trace[200] <= result.objective_trace[1]);
    CHECK(result.w.mat().minCoeff() >= 0.0);
    CHECK(result.h.mat().minCoeff() >= 0.0);

    // trace equals the full objective minus ½‖XXᵀ‖², checked against a direct evaluation
    const Mat& w = result.w.mat();
    const Mat& h = result.h.mat();
    const Mat xxt = x.mat() * x.mat().transpose();
    const double full = 0.5 * (x.mat() - w * h).squaredNorm() + 0.5 * (xxt - 0.3 * w * w.transpose()).squaredNorm();
    CHECK(result.objective_trace.back() == doctest::Approx(full - 0.5 * xxt.squaredNorm()).epsilon(1e-9));

    CHECK_THROWS_AS(frnmf_solve(x, -0.1, cfg(3, 5, 1)), ContractError);
}

TEST_CASE("zero entries stay zero under every update rule") {
    std::mt19937_64 rng(8);
    const NonNegMatrix x(oracle::random_nonneg(10, 12, rng));
    const auto config = cfg(3, 30, 6);
    auto start = init_factors(10, 12, config);
    Mat w = start.w.mat();
    Mat h = start.h.mat();
    w(2, 1) = 0.0;
    w(7, 0) = 0.0;
    h(0, 5) = 0.0;
    h(2, 11) = 0.0;
    const FactorPair seeded{NonNegMatrix(w), NonNegMatrix(h), {}};

    const auto check = [](const FactorPair& r) {
        CHECK(r.w.mat()(2, 1) == 0.0);
        CHECK(r.w.mat()(7, 0) == 0.0);
        CHECK(r.h.mat()(0, 5) == 0.0);
        CHECK(r.h.mat()(2, 11) == 0.0);
    };
    check(nmf_solve(x, config, &seeded));
    check(gnmf_solve(x, build_graph(x, 3), 0.7, config, &seeded));
    check(frnmf_solve(x, 0.4, config, &seeded));
}

TEST_CASE("solvers are bitwise deterministic") {
    std::mt19937_64 rng(31);
    const NonNegMatrix x(oracle::random_nonneg(15, 18, rng));
    const auto graph = build_graph(x, 4);
    const auto config = cfg(4, 60, 12);
    CHECK(nmf_solve(x, config).objective_trace == nmf_solve(x, config).objective_trace);
    const auto g1 = gnmf_solve(x, graph, 0.3, config);
    const auto g2 = gnmf_solve(x, graph, 0.3, config);
    CHECK(g1.objective_trace == g2.objective_trace);
    CHECK(g1.w.mat() == g2.w.mat());
    CHECK(frnmf_solve(x, 0.6, config).h.mat() == frnmf_solve(x, 0.6, config).h.mat());
}

TEST_CASE("solver preconditions") {
    const NonNegMatrix x{{0.1, 0.2}, {0.3, 0.4}};
    CHECK_THROWS_AS(nmf_solve(x, SolverConfig{0, 10, 1e-4, 0}), ContractError);
    CHECK_THROWS_AS(nmf_solve(x, SolverConfig{1, 0, 1e-4, 0}), ContractError);
    CHECK_THROWS_AS(nmf_solve(x, SolverConfig{1, 10, 0.0, 0}), ContractError);
    const auto graph = build_graph(NonNegMatrix{{0.1, 0.2, 0.3}}, 1);
    CHECK_THROWS_AS(gnmf_solve(x, graph, 0.1, cfg(1, 5, 0)), ContractError);
}
