#pragma once

#include "cnmf/classifier.hpp"
#include "cnmf/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace cnmf {

/// Features scaled to [0,1], one sample per column, plus labels.
/// Splitting operations check their own per-class minimums via require_min_class_size.
class LabeledDataset {
public:
    LabeledDataset(NonNegMatrix x, std::vector<Label> y);

    const NonNegMatrix& x() const { return x_; }
    const std::vector<Label>& y() const { return y_; }
    const std::vector<Label>& classes() const { return classes_; }

    std::size_t n_samples() const { return y_.size(); }
    std::size_t n_features() const { return x_.rows(); }
    std::size_t n_classes() const { return classes_.size(); }
    std::size_t count(Label c) const;
    /// Throws ContractError naming the first class with fewer than n samples.
    void require_min_class_size(std::size_t n, const char* what) const;

    /// Columns at `indices`, in the given order.
    LabeledDataset select(std::span<const std::size_t> indices) const;

private:
    NonNegMatrix x_;
    std::vector<Label> y_;
    std::vector<Label> classes_;
};

/// Sorted distinct labels.
std::vector<Label> distinct_labels(std::span<const Label> y);

/// Per class, the sample indices carrying that label, in original order; classes sorted.
std::vector<std::vector<std::size_t>> indices_by_class(std::span<const Label> y);

}  // namespace cnmf
