#include "cnmf/classifier.hpp"
#include "cnmf/data.hpp"
#include "cnmf/error.hpp"
#include "cnmf/experiment.hpp"
#include "cnmf/ga.hpp"
#include "cnmf/nmf.hpp"
#include "cnmf/trainer.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace cnmf;

namespace {

SolverConfig solver(std::size_t rank, std::size_t max_iters, double rel_tol, std::uint64_t seed) {
    return SolverConfig{rank, max_iters, rel_tol, seed};
}

py::tuple factors(const FactorPair& f) { return py::make_tuple(f.w.mat(), f.h.mat(), f.objective_trace); }

LabeledDataset dataset(const Mat& x, const std::vector<Label>& y) { return LabeledDataset(NonNegMatrix(x), y); }

TrainOptions train_options(const std::string& algo, std::size_t rank, std::size_t max_iters, std::uint64_t seed) {
    TrainOptions o;
    o.algo = parse_algo(algo);
    o.rank = rank;
    o.max_iters = max_iters;
    o.seed = seed;
    return o;
}

}  // namespace

PYBIND11_MODULE(_cnmf, m) {
    m.doc() = "Class-pairwise parameterized NMF (C++ core)";

    py::register_exception<SingularError>(m, "SingularError", PyExc_ArithmeticError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

    m.def(
        "nmf",
        [](const Mat& x, std::size_t rank, std::size_t max_iters, double rel_tol, std::uint64_t seed) {
            return factors(nmf_solve(NonNegMatrix(x), solver(rank, max_iters, rel_tol, seed)));
        },
        py::arg("x"), py::arg("rank") = 2, py::arg("max_iters") = 200, py::arg("rel_tol") = 1e-4, py::arg("seed") = 0,
        "Multiplicative-update NMF of a d×n matrix. Returns (W, H, objective_trace).");

    m.def(
        "gnmf",
        [](const Mat& x, double lam, std::size_t k, std::size_t rank, std::size_t max_iters, double rel_tol,
           std::uint64_t seed) {
            const NonNegMatrix xn(x);
            return factors(gnmf_solve(xn, build_graph(xn, k), lam, solver(rank, max_iters, rel_tol, seed)));
        },
        py::arg("x"), py::arg("lam"), py::arg("k") = 5, py::arg("rank") = 2, py::arg("max_iters") = 200,
        py::arg("rel_tol") = 1e-4, py::arg("seed") = 0);

    m.def(
        "frnmf",
        [](const Mat& x, double lam, std::size_t rank, std::size_t max_iters, double rel_tol, std::uint64_t seed) {
            return factors(frnmf_solve(NonNegMatrix(x), lam, solver(rank, max_iters, rel_tol, seed)));
        },
        py::arg("x"), py::arg("lam"), py::arg("rank") = 2, py::arg("max_iters") = 200, py::arg("rel_tol") = 1e-4,
        py::arg("seed") = 0);

    m.def(
        "knn_graph", [](const Mat& x, std::size_t k) { return build_graph(NonNegMatrix(x), k).dense_weights().mat(); },
        py::arg("x"), py::arg("k") = 5, "Symmetrized 0/1 k-NN adjacency over the columns of x.");

    m.def(
        "project",
        [](const Mat& w, const std::vector<double>& x, double ridge) { return project(NonNegMatrix(w), x, ridge); },
        py::arg("w"), py::arg("x"), py::arg("ridge") = kDefaultRidge);

    m.def(
        "knn_label",
        [](const Vec& h, const Mat& codes, const std::vector<Label>& labels, std::size_t k) {
            return knn_label(h, codes, labels, k);
        },
        py::arg("h"), py::arg("codes"), py::arg("labels"), py::arg("k") = 1);

    m.def(
        "majority_vote", [](const std::vector<Label>& votes) { return majority_vote(votes).winner; },
        py::arg("votes"));

    m.def(
        "make_blobs",
        [](std::size_t n_samples, std::size_t n_centers, std::size_t n_features, double cluster_std,
           std::uint64_t seed) {
            BlobSpec s;
            s.n_samples = n_samples;
            s.n_centers = n_centers;
            s.n_features = n_features;
            s.cluster_std = cluster_std;
            s.seed = seed;
            const RawTable t = make_blobs(s);
            return py::make_tuple(t.features.mat(), t.labels);
        },
        py::arg("n_samples") = 1000, py::arg("n_centers") = 3, py::arg("n_features") = 10,
        py::arg("cluster_std") = 1.0, py::arg("seed") = 0, "Returns (X d×n, labels).");

    m.def(
        "load_csv",
        [](const std::string& path, const std::string& label_column) {
            const RawTable t = load_csv(path, label_column);
            return py::make_tuple(t.features.mat(), t.labels, t.feature_names);
        },
        py::arg("path"), py::arg("label_column") = "label");

    m.def(
        "minmax_scale",
        [](const Mat& x, const std::vector<Label>& y) { return minmax_scale(RawTable{RealMatrix(x), y, {}}).x().mat(); },
        py::arg("x"), py::arg("labels"));

    m.def("enumerate_pairs", [](const std::vector<Label>& classes) { return enumerate_pairs(classes).pairs; },
          py::arg("classes"));

    m.def(
        "evaluate_chromosome",
        [](const Mat& x, const std::vector<Label>& y, const std::vector<double>& genes, const std::string& algo,
           std::size_t rank, std::size_t folds, std::uint64_t seed, std::size_t max_iters) {
            const LabeledDataset d = dataset(x, y);
            return evaluate_chromosome(d, genes, train_options(algo, rank, max_iters, seed), make_folds(d, folds, seed));
        },
        py::arg("x"), py::arg("labels"), py::arg("genes"), py::arg("algo") = "gnmf", py::arg("rank") = 2,
        py::arg("folds") = 5, py::arg("seed") = 0, py::arg("max_iters") = 200,
        "Cross-validated accuracy of the class-pairwise ensemble; one gene per class pair.");

    m.def(
        "evaluate_unmf",
        [](const Mat& x, const std::vector<Label>& y, double lam, const std::string& algo, std::size_t rank,
           std::size_t folds, std::uint64_t seed, std::size_t max_iters) {
            const LabeledDataset d = dataset(x, y);
            return evaluate_unmf(d, lam, train_options(algo, rank, max_iters, seed), make_folds(d, folds, seed));
        },
        py::arg("x"), py::arg("labels"), py::arg("lam"), py::arg("algo") = "gnmf", py::arg("rank") = 2,
        py::arg("folds") = 5, py::arg("seed") = 0, py::arg("max_iters") = 200);

    m.def(
        "ga_optimize",
        [](const std::function<double(std::vector<double>)>& fn, std::size_t t_len, std::size_t pop_size,
           std::size_t generations, double crossover_prob, double mutation_prob, double mutation_sigma,
           std::size_t tournament_size, std::size_t patience, std::uint64_t seed) {
            GaConfig c;
            c.pop_size = pop_size;
            c.generations = generations;
            c.crossover_prob = crossover_prob;
            c.mutation_prob = mutation_prob;
            c.mutation_sigma = mutation_sigma;
            c.tournament_size = tournament_size;
            c.patience = patience;
            c.seed = seed;
            const GaTrace t = optimize(
                [&](std::span<const double> g) { return fn(std::vector<double>(g.begin(), g.end())); }, t_len, c);
            py::dict out;
            out["best_genes"] = t.best.genes;
            out["best_fitness"] = *t.best.fitness;
            out["trace"] = t.best_fitness_per_generation;
            out["evaluations"] = t.evaluations;
            return out;
        },
        py::arg("fitness"), py::arg("t_len"), py::arg("pop_size") = 10, py::arg("generations") = 20,
        py::arg("crossover_prob") = 0.2, py::arg("mutation_prob") = 0.05, py::arg("mutation_sigma") = 0.1,
        py::arg("tournament_size") = 3, py::arg("patience") = 5, py::arg("seed") = 0);

    m.def(
        "run_experiment_json",
        [](const std::string& config_json) {
            const RunConfig config = run_config_from_json(nlohmann::json::parse(config_json));
            ExperimentReport report;
            {
                py::gil_scoped_release release;
                report = run_experiment(config);
            }
            report.wall_seconds.reset();
            return to_json(report).dump();
        },
        py::arg("config_json"), "Runs a full experiment; takes and returns JSON text.");

    m.def("default_run_config_json", [] { return to_json(RunConfig{}).dump(); });
}
