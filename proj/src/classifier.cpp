#include "cnmf/classifier.hpp"

#include "cnmf/error.hpp"

#include <algorithm>
#include <iostream>
#include <string>
#include <utility>

namespace cnmf {

void PairModel::validate() const {
    if (classes.empty()) throw ContractError("PairModel: no classes");
    if (!std::is_sorted(classes.begin(), classes.end()) ||
        std::adjacent_find(classes.begin(), classes.end()) != classes.end()) {
        throw ContractError("PairModel: classes must be sorted and distinct");
    }
    if (w.cols() != h.rows()) throw ContractError("PairModel: W and H ranks differ");
    if (labels.size() != h.cols()) throw ContractError("PairModel: one label per column of H required");
    for (Label c : classes) {
        if (std::find(labels.begin(), labels.end(), c) == labels.end()) {
            throw ContractError("PairModel: class " + std::to_string(c) + " has no training sample");
        }
    }
    for (Label l : labels) {
        if (!std::binary_search(classes.begin(), classes.end(), l)) {
            throw ContractError("PairModel: label " + std::to_string(l) + " outside the model's classes");
        }
    }
}

Mat project_columns(const Mat& w, const Mat& xs, double ridge) {
    if (xs.rows() != w.rows()) {
        throw ContractError("project: sample has " + std::to_string(xs.rows()) + " features, basis has " +
                            std::to_string(w.rows()));
    }
    return kernel::solve_spd(w.transpose() * w, w.transpose() * xs, ridge);
}

Vec project(const NonNegMatrix& w, std::span<const double> x, double ridge) {
    if (ridge < 0.0) throw ContractError("project: ridge must be non-negative");
    const Eigen::Map<const Vec> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    return project_columns(w.mat(), xv, ridge).col(0);
}

Label knn_label(const Vec& h, const Mat& codes, std::span<const Label> labels, std::size_t k) {
    const auto n = static_cast<std::size_t>(codes.cols());
    if (k < 1 || k > n) throw ContractError("knn_label: need 1 <= k <= " + std::to_string(n));
    if (labels.size() != n) throw ContractError("knn_label: one label per column required");
    if (h.size() != codes.rows()) throw ContractError("knn_label: code dimension mismatch");

    if (k == 1) {
        std::size_t best = 0;
        double best_dist = (codes.col(0) - h).squaredNorm();
        for (std::size_t j = 1; j < n; ++j) {
            const double dist = (codes.col(static_cast<Eigen::Index>(j)) - h).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        return labels[best];
    }

    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t j = 0; j < n; ++j) {
        dist[j] = {(codes.col(static_cast<Eigen::Index>(j)) - h).squaredNorm(), j};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<Label> nearest(k);
    for (std::size_t q = 0; q < k; ++q) nearest[q] = labels[dist[q].second];
    return majority_vote(nearest).winner;
}

Label knn_label(const Vec& h, const PairModel& model, std::size_t k) {
    return knn_label(h, model.h.mat(), model.labels, k);
}

VoteTally majority_vote(std::span<const Label> votes) {
    if (votes.empty()) throw ContractError("majority_vote: no votes");
    VoteTally tally;
    for (Label v : votes) ++tally.counts[v];
    std::size_t best = 0;
    // std::map iterates in ascending label order, so strict > keeps the smallest tied label
    for (const auto& [label, count] : tally.counts) {
        if (count > best) {
            best = count;
            tally.winner = label;
        }
    }
    return tally;
}

std::vector<Label> collect_votes(std::span<const double> x, std::span<const PairModel> models,
                                 std::size_t k, double ridge) {
    std::vector<Label> votes;
    votes.reserve(models.size());
    for (std::size_t t = 0; t < models.size(); ++t) {
        const PairModel& model = models[t];
        if (model.w.rows() != x.size()) {
            throw ContractError("predict: model " + std::to_string(t) + " expects " +
                                std::to_string(model.w.rows()) + " features, sample has " +
                                std::to_string(x.size()));
        }
        try {
            votes.push_back(knn_label(project(model.w, x, ridge), model, k));
        } catch (const SingularError& e) {
            std::clog << "cnmf: skipping model (" << model.class_a() << "," << model.class_b() << "): " << e.what()
                      << '\n';
        }
    }
    return votes;
}

Label predict(std::span<const double> x, std::span<const PairModel> models, std::size_t k, double ridge) {
    if (models.empty()) throw ContractError("predict: no models");
    const auto votes = collect_votes(x, models, k, ridge);
    if (votes.empty()) throw SingularError("predict: every model failed to project the sample");
    return majority_vote(votes).winner;
}

}  // namespace cnmf
