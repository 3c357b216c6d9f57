#include "cnmf/dataset.hpp"

#include "cnmf/error.hpp"

#include <algorithm>
#include <string>

namespace cnmf {

std::vector<Label> distinct_labels(std::span<const Label> y) {
    std::vector<Label> out(y.begin(), y.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::vector<std::size_t>> indices_by_class(std::span<const Label> y) {
    const auto classes = distinct_labels(y);
    std::vector<std::vector<std::size_t>> out(classes.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto pos = std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin();
        out[static_cast<std::size_t>(pos)].push_back(i);
    }
    return out;
}

LabeledDataset::LabeledDataset(NonNegMatrix x, std::vector<Label> y)
    : x_(std::move(x)), y_(std::move(y)), classes_(distinct_labels(y_)) {
    if (y_.size() != x_.cols()) {
        throw ContractError("LabeledDataset: " + std::to_string(x_.cols()) + " samples but " +
                            std::to_string(y_.size()) + " labels");
    }
    if (x_.mat().maxCoeff() > 1.0) throw ContractError("LabeledDataset: features must lie in [0,1]");
}

void LabeledDataset::require_min_class_size(std::size_t n, const char* what) const {
    for (Label c : classes_) {
        if (count(c) < n) {
            throw ContractError(std::string(what) + ": class " + std::to_string(c) + " has " +
                                std::to_string(count(c)) + " samples, needs at least " + std::to_string(n));
        }
    }
}

std::size_t LabeledDataset::count(Label c) const {
    return static_cast<std::size_t>(std::count(y_.begin(), y_.end(), c));
}

LabeledDataset LabeledDataset::select(std::span<const std::size_t> indices) const {
    Mat sub(x_.mat().rows(), static_cast<Eigen::Index>(indices.size()));
    std::vector<Label> labels(indices.size());
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (indices[j] >= n_samples()) throw ContractError("LabeledDataset::select: index out of range");
        sub.col(static_cast<Eigen::Index>(j)) = x_.mat().col(static_cast<Eigen::Index>(indices[j]));
        labels[j] = y_[indices[j]];
    }
    return LabeledDataset(NonNegMatrix(std::move(sub)), std::move(labels));
}

}  // namespace cnmf
