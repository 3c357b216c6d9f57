#pragma once

#include "cnmf/classifier.hpp"
#include "cnmf/dataset.hpp"
#include "cnmf/nmf.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cnmf {

enum class Algo { gnmf, frnmf };
enum class Strategy { cnmf, unmf };

std::string_view to_string(Algo a);
std::string_view to_string(Strategy s);
Algo parse_algo(std::string_view s);
Strategy parse_strategy(std::string_view s);

struct TrainOptions {
    Algo algo = Algo::gnmf;
    std::size_t rank = 2;
    std::size_t max_iters = 200;
    double rel_tol = 1e-4;
    std::uint64_t seed = 0;  ///< base seed for factor initialization
    std::size_t graph_neighbors = 5;
    std::size_t knn_k = 1;
    double ridge = kDefaultRidge;

    void validate() const;
};

using ClassPair = std::pair<Label, Label>;

struct PairIndex {
    std::vector<ClassPair> pairs;  ///< lexicographic, first < second
    std::size_t size() const { return pairs.size(); }
};

/// All unordered class pairs; needs at least two classes.
PairIndex enumerate_pairs(std::span<const Label> classes);

/// Samples of the two classes, original order preserved.
LabeledDataset subset(const LabeledDataset& data, ClassPair pair);
LabeledDataset subset(const LabeledDataset& data, std::span<const Label> classes);

/// Stratified fold assignment: within each class the shuffled samples are dealt to folds
/// round-robin, continuing the deal across classes.
struct FoldPlan {
    std::size_t n_folds = 0;
    std::vector<std::size_t> assignments;  ///< fold id per sample
    std::uint64_t seed = 0;

    std::vector<std::size_t> validation_indices(std::size_t fold) const;
    std::vector<std::size_t> training_indices(std::size_t fold) const;
};

FoldPlan make_folds(const LabeledDataset& data, std::size_t n_folds, std::uint64_t seed);

/// Seed used to initialize the factors of `group` when training on `fold`.
std::uint64_t factor_seed(std::uint64_t base, std::uint64_t fold, std::uint64_t group);

/// Factorizes the samples of `data` with the configured algorithm and weight `lambda`.
PairModel fit_model(const LabeledDataset& data, double lambda, const TrainOptions& options, std::uint64_t seed);

struct TrainedEnsemble {
    std::vector<PairModel> models;
    std::vector<double> chromosome;
    Strategy strategy = Strategy::cnmf;
    Algo algo = Algo::gnmf;
    std::size_t rank = 0;
    std::size_t knn_k = 1;
    double ridge = kDefaultRidge;

    Label predict(std::span<const double> x) const;
    /// Fraction of columns of data predicted correctly.
    double accuracy(const LabeledDataset& data) const;
};

/// Cross-validated accuracy of the pairwise (cnmf) or whole-dataset (unmf) strategy.
/// Validation labels are memoized per fold, model group and lambda value.
class CrossValidator {
public:
    CrossValidator(const LabeledDataset& data, Strategy strategy, const TrainOptions& options, FoldPlan folds);

    std::size_t chromosome_length() const { return groups_.size(); }
    const std::vector<std::vector<Label>>& groups() const { return groups_; }

    /// Mean over folds of the validation accuracy; genes[t] weighs group t.
    double accuracy(std::span<const double> genes);

    std::size_t factorizations() const { return factorizations_; }

private:
    struct FoldData {
        Mat validation;
        std::vector<Label> truth;
        std::vector<LabeledDataset> group_train;
    };

    const std::vector<Label>& group_votes(std::size_t fold, std::size_t group, double lambda);

    Strategy strategy_;
    TrainOptions options_;
    FoldPlan folds_;
    std::vector<Label> classes_;
    std::vector<std::vector<Label>> groups_;
    std::vector<FoldData> fold_data_;
    std::vector<std::unordered_map<std::uint64_t, std::vector<Label>>> cache_;  // per (fold, group)
    std::size_t factorizations_ = 0;
};

double evaluate_chromosome(const LabeledDataset& data, std::span<const double> chromosome,
                           const TrainOptions& options, const FoldPlan& folds);

double evaluate_unmf(const LabeledDataset& data, double lambda, const TrainOptions& options, const FoldPlan& folds);

/// Refits every group on all of `data` with its gene from the chosen chromosome.
TrainedEnsemble fit_final(const LabeledDataset& data, std::span<const double> chromosome,
                          const TrainOptions& options, Strategy strategy = Strategy::cnmf);

}  // namespace cnmf
