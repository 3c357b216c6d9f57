#include "cnmf/trainer.hpp"

#include "cnmf/error.hpp"

#include <algorithm>
#include <bit>
#include <random>

namespace cnmf {

std::string_view to_string(Algo a) { return a == Algo::gnmf ? "gnmf" : "frnmf"; }
std::string_view to_string(Strategy s) { return s == Strategy::cnmf ? "cnmf" : "unmf"; }

Algo parse_algo(std::string_view s) {
    if (s == "gnmf") return Algo::gnmf;
    if (s == "frnmf") return Algo::frnmf;
    throw ContractError("unknown algorithm '" + std::string(s) + "' (expected gnmf or frnmf)");
}

Strategy parse_strategy(std::string_view s) {
    if (s == "cnmf") return Strategy::cnmf;
    if (s == "unmf") return Strategy::unmf;
    throw ContractError("unknown strategy '" + std::string(s) + "' (expected cnmf or unmf)");
}

void TrainOptions::validate() const {
    SolverConfig{rank, max_iters, rel_tol, seed}.validate();
    if (graph_neighbors < 1) throw ContractError("TrainOptions: graph_neighbors must be >= 1");
    if (knn_k < 1) throw ContractError("TrainOptions: knn_k must be >= 1");
    if (ridge < 0.0) throw ContractError("TrainOptions: ridge must be >= 0");
}

PairIndex enumerate_pairs(std::span<const Label> classes) {
    const auto sorted = distinct_labels(classes);
    if (sorted.size() < 2) throw ContractError("enumerate_pairs: need at least 2 classes");
    PairIndex index;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) index.pairs.emplace_back(sorted[i], sorted[j]);
    }
    return index;
}

LabeledDataset subset(const LabeledDataset& data, std::span<const Label> classes) {
    for (Label c : classes) {
        if (!std::binary_search(data.classes().begin(), data.classes().end(), c)) {
            throw ContractError("subset: class " + std::to_string(c) + " not present");
        }
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < data.n_samples(); ++i) {
        if (std::find(classes.begin(), classes.end(), data.y()[i]) != classes.end()) keep.push_back(i);
    }
    return data.select(keep);
}

LabeledDataset subset(const LabeledDataset& data, ClassPair pair) {
    const Label both[] = {pair.first, pair.second};
    return subset(data, std::span<const Label>(both));
}

std::vector<std::size_t> FoldPlan::validation_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::training_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) out.push_back(i);
    }
    return out;
}

FoldPlan make_folds(const LabeledDataset& data, std::size_t n_folds, std::uint64_t seed) {
    if (n_folds < 2) throw ContractError("make_folds: need at least 2 folds");
    data.require_min_class_size(n_folds, "make_folds");
    FoldPlan plan{n_folds, std::vector<std::size_t>(data.n_samples()), seed};
    std::mt19937_64 rng(seed);
    std::size_t deal = 0;
    for (auto idx : indices_by_class(data.y())) {
        std::shuffle(idx.begin(), idx.end(), rng);
        for (auto i : idx) plan.assignments[i] = deal++ % n_folds;
    }
    return plan;
}

std::uint64_t factor_seed(std::uint64_t base, std::uint64_t fold, std::uint64_t group) {
    // splitmix64 finalizer over a combined key
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(base) ^ fold) ^ group);
}

PairModel fit_model(const LabeledDataset& data, double lambda, const TrainOptions& options, std::uint64_t seed) {
    options.validate();
    const SolverConfig config{options.rank, options.max_iters, options.rel_tol, seed};
    FactorPair factors;
    if (options.algo == Algo::gnmf) {
        if (data.n_samples() < 2) throw ContractError("fit_model: GNMF needs at least 2 samples");
        const auto k = std::min(options.graph_neighbors, data.n_samples() - 1);
        factors = gnmf_solve(data.x(), build_graph(data.x(), k), lambda, config);
    } else {
        factors = frnmf_solve(data.x(), lambda, config);
    }
    return PairModel{data.classes(), std::move(factors.w), std::move(factors.h), data.y(), lambda};
}

Label TrainedEnsemble::predict(std::span<const double> x) const { return cnmf::predict(x, models, knn_k, ridge); }

double TrainedEnsemble::accuracy(const LabeledDataset& data) const {
    if (data.n_samples() == 0) return 0.0;
    std::size_t correct = 0;
    Vec col;
    for (std::size_t i = 0; i < data.n_samples(); ++i) {
        col = data.x().mat().col(static_cast<Eigen::Index>(i));
        if (predict(std::span<const double>(col.data(), static_cast<std::size_t>(col.size()))) == data.y()[i]) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(data.n_samples());
}

namespace {

std::vector<std::vector<Label>> model_groups(const std::vector<Label>& classes, Strategy strategy) {
    if (strategy == Strategy::unmf) return {classes};
    std::vector<std::vector<Label>> groups;
    for (const auto& [a, b] : enumerate_pairs(classes).pairs) groups.push_back({a, b});
    return groups;
}

}  // namespace

CrossValidator::CrossValidator(const LabeledDataset& data, Strategy strategy, const TrainOptions& options,
                               FoldPlan folds)
    : strategy_(strategy), options_(options), folds_(std::move(folds)), classes_(data.classes()) {
    options_.validate();
    if (folds_.assignments.size() != data.n_samples()) {
        throw ContractError("CrossValidator: fold plan covers " + std::to_string(folds_.assignments.size()) +
                            " samples, dataset has " + std::to_string(data.n_samples()));
    }
    groups_ = model_groups(classes_, strategy_);
    for (std::size_t f = 0; f < folds_.n_folds; ++f) {
        const LabeledDataset train = data.select(folds_.training_indices(f));
        const LabeledDataset valid = data.select(folds_.validation_indices(f));
        FoldData fd{valid.x().mat(), valid.y(), {}};
        for (const auto& g : groups_) fd.group_train.push_back(subset(train, g));
        fold_data_.push_back(std::move(fd));
    }
    cache_.resize(folds_.n_folds * groups_.size());
}

const std::vector<Label>& CrossValidator::group_votes(std::size_t fold, std::size_t group, double lambda) {
    auto& slot = cache_[fold * groups_.size() + group];
    const auto key = std::bit_cast<std::uint64_t>(lambda);
    if (auto it = slot.find(key); it != slot.end()) return it->second;

    const FoldData& fd = fold_data_[fold];
    const PairModel model =
        fit_model(fd.group_train[group], lambda, options_, factor_seed(options_.seed, fold, group));
    ++factorizations_;

    std::vector<Label> labels;
    try {
        const Mat codes = project_columns(model.w.mat(), fd.validation, options_.ridge);
        labels.resize(static_cast<std::size_t>(codes.cols()));
        for (Eigen::Index j = 0; j < codes.cols(); ++j) {
            labels[static_cast<std::size_t>(j)] = knn_label(codes.col(j), model, options_.knn_k);
        }
    } catch (const SingularError&) {
        labels.clear();  // the group casts no votes in this fold
    }
    return slot.emplace(key, std::move(labels)).first->second;
}

double CrossValidator::accuracy(std::span<const double> genes) {
    if (genes.size() != groups_.size()) {
        throw ContractError("chromosome has " + std::to_string(genes.size()) + " genes, expected " +
                            std::to_string(groups_.size()));
    }
    for (double g : genes) {
        if (!(g >= 0.0)) throw ContractError("chromosome genes must be >= 0");
    }
    const std::size_t m = classes_.size();
    double total = 0.0;
    std::vector<std::size_t> counts;
    for (std::size_t f = 0; f < folds_.n_folds; ++f) {
        const FoldData& fd = fold_data_[f];
        const std::size_t nv = fd.truth.size();
        counts.assign(nv * m, 0);
        for (std::size_t t = 0; t < groups_.size(); ++t) {
            const auto& votes = group_votes(f, t, genes[t]);
            for (std::size_t i = 0; i < votes.size(); ++i) {
                const auto c = std::lower_bound(classes_.begin(), classes_.end(), votes[i]) - classes_.begin();
                ++counts[i * m + static_cast<std::size_t>(c)];
            }
        }
        std::size_t correct = 0;
        for (std::size_t i = 0; i < nv; ++i) {
            std::size_t best = 0;
            std::size_t winner = m;
            for (std::size_t c = 0; c < m; ++c) {
                if (counts[i * m + c] > best) {
                    best = counts[i * m + c];
                    winner = c;
                }
            }
            if (winner == m) throw SingularError("cross-validation: no model could label a validation sample");
            if (classes_[winner] == fd.truth[i]) ++correct;
        }
        total += nv == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(nv);
    }
    return total / static_cast<double>(folds_.n_folds);
}

double evaluate_chromosome(const LabeledDataset& data, std::span<const double> chromosome,
                           const TrainOptions& options, const FoldPlan& folds) {
    CrossValidator cv(data, Strategy::cnmf, options, folds);
    return cv.accuracy(chromosome);
}

double evaluate_unmf(const LabeledDataset& data, double lambda, const TrainOptions& options, const FoldPlan& folds) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ContractError("evaluate_unmf: lambda must lie in [0,1]");
    CrossValidator cv(data, Strategy::unmf, options, folds);
    const double genes[] = {lambda};
    return cv.accuracy(genes);
}

TrainedEnsemble fit_final(const LabeledDataset& data, std::span<const double> chromosome,
                          const TrainOptions& options, Strategy strategy) {
    const auto groups = model_groups(data.classes(), strategy);
    if (chromosome.size() != groups.size()) {
        throw ContractError("fit_final: chromosome has " + std::to_string(chromosome.size()) + " genes, expected " +
                            std::to_string(groups.size()));
    }
    constexpr std::uint64_t kFinalFold = ~std::uint64_t{0};
    TrainedEnsemble ensemble;
    ensemble.chromosome.assign(chromosome.begin(), chromosome.end());
    ensemble.strategy = strategy;
    ensemble.algo = options.algo;
    ensemble.rank = options.rank;
    ensemble.knn_k = options.knn_k;
    ensemble.ridge = options.ridge;
    for (std::size_t t = 0; t < groups.size(); ++t) {
        ensemble.models.push_back(
            fit_model(subset(data, groups[t]), chromosome[t], options, factor_seed(options.seed, kFinalFold, t)));
    }
    return ensemble;
}

}  // namespace cnmf
