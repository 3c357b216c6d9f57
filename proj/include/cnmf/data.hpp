#pragma once

#include "cnmf/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace cnmf {

/// Unscaled features (d×n, one sample per column) as read or generated.
struct RawTable {
    RealMatrix features;
    std::vector<Label> labels;
    std::vector<std::string> feature_names;

    std::size_t n_samples() const { return labels.size(); }
    std::size_t n_features() const { return features.rows(); }
    RawTable select_samples(const std::vector<std::size_t>& indices) const;
};

/// Isotropic Gaussian blobs around centers drawn uniformly from a box.
struct BlobSpec {
    std::size_t n_samples = 1000;
    std::size_t n_centers = 3;
    std::size_t n_features = 10;
    double cluster_std = 1.0;
    double box_low = 1.0;
    double box_high = 5.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Headered CSV, one sample per row. Integer label cells are used as-is; any other label
/// text is mapped to 0..m-1 in sorted order.
RawTable load_csv(const std::filesystem::path& path, const std::string& label_column);
void save_csv(const RawTable& table, const std::filesystem::path& path, const std::string& label_column = "label");

/// Sample i belongs to center i mod n_centers.
RawTable make_blobs(const BlobSpec& spec);

/// Per-feature affine map onto [0,1]; constant features map to 0.
LabeledDataset minmax_scale(const RawTable& table);

/// One-way ANOVA F statistic of every feature against the labels.
std::vector<double> anova_f_scores(const RawTable& table);

/// Keeps the k features with the largest F statistic (ties to the lower index), in original order.
RawTable select_k_best(const RawTable& table, std::size_t k);

/// Stratified split: per class, round(n_c·test_fraction) samples (clamped to [1, n_c-1]) go to test.
std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& data, double test_fraction,
                                                           std::uint64_t seed);

/// Stratified sample indices with class shares proportional to the class sizes.
std::vector<std::size_t> stratified_subsample(const std::vector<Label>& labels, std::size_t n, std::uint64_t seed);

}  // namespace cnmf
