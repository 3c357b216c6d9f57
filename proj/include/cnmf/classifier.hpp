#pragma once

#include "cnmf/matrix.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace cnmf {

using Label = int;

/// One trained factorization: basis W, training codes H and the label of every column of H.
/// A class-pair model has exactly two classes; the whole-dataset (uNMF) model carries all of them.
struct PairModel {
    std::vector<Label> classes;  ///< sorted, distinct
    NonNegMatrix w;              ///< d×r
    NonNegMatrix h;              ///< r×n_t
    std::vector<Label> labels;   ///< length n_t
    double lambda = 0.0;

    Label class_a() const { return classes.front(); }
    Label class_b() const { return classes.back(); }
    void validate() const;
};

struct VoteTally {
    std::map<Label, std::size_t> counts;
    Label winner = 0;
};

/// Least-squares latent coordinates h = (WᵀW + ridge·I)⁻¹ Wᵀ x. Entries may be negative.
Vec project(const NonNegMatrix& w, std::span<const double> x, double ridge = kDefaultRidge);

/// Column-wise projection of every column of xs.
Mat project_columns(const Mat& w, const Mat& xs, double ridge = kDefaultRidge);

/// Majority label among the k columns of `codes` closest to h; equal distances go to the lower index.
Label knn_label(const Vec& h, const Mat& codes, std::span<const Label> labels, std::size_t k = 1);
Label knn_label(const Vec& h, const PairModel& model, std::size_t k = 1);

/// Most frequent label; ties go to the smallest label value.
VoteTally majority_vote(std::span<const Label> votes);

/// Project + kNN against every model, then majority vote. Models whose normal equations
/// are singular cast no vote.
Label predict(std::span<const double> x, std::span<const PairModel> models, std::size_t k = 1,
              double ridge = kDefaultRidge);

/// The per-model labels `predict` would vote over, in model order; skipped models are absent.
std::vector<Label> collect_votes(std::span<const double> x, std::span<const PairModel> models,
                                 std::size_t k = 1, double ridge = kDefaultRidge);

}  // namespace cnmf
