#include "cnmf/data.hpp"

#include "cnmf/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace cnmf {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// Comma-separated fields; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

bool parse_double(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_int(const std::string& cell, Label& out) {
    if (cell.empty()) return false;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

void BlobSpec::validate() const {
    if (n_samples < 1 || n_centers < 1 || n_features < 1) {
        throw ContractError("BlobSpec: sample, center and feature counts must be >= 1");
    }
    if (!(box_low < box_high)) throw ContractError("BlobSpec: center box low must be below high");
    if (!(cluster_std >= 0.0)) throw ContractError("BlobSpec: cluster_std must be >= 0");
}

RawTable RawTable::select_samples(const std::vector<std::size_t>& indices) const {
    Mat sub(features.mat().rows(), static_cast<Eigen::Index>(indices.size()));
    std::vector<Label> ls(indices.size());
    for (std::size_t j = 0; j < indices.size(); ++j) {
        sub.col(static_cast<Eigen::Index>(j)) = features.mat().col(static_cast<Eigen::Index>(indices.at(j)));
        ls[j] = labels.at(indices[j]);
    }
    return RawTable{RealMatrix(std::move(sub)), std::move(ls), feature_names};
}

RawTable load_csv(const std::filesystem::path& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_csv_line(line);
            break;
        }
    }
    if (header.empty()) throw ParseError(path.string() + ": empty file");
    if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

    const auto label_it = std::find(header.begin(), header.end(), label_column);
    if (label_it == header.end()) {
        throw SchemaError(path.string() + ": no label column '" + label_column + "' in header");
    }
    const auto label_idx = static_cast<std::size_t>(label_it - header.begin());

    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != label_idx) names.push_back(header[c]);
    }

    std::vector<double> values;  // sample-major
    std::vector<std::string> label_cells;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_idx) {
                if (cells[c].empty()) {
                    throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty label");
                }
                label_cells.push_back(cells[c]);
                continue;
            }
            double v = 0.0;
            if (!parse_double(cells[c], v)) {
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ", column '" + header[c] +
                                 "': not a finite number: '" + cells[c] + "'");
            }
            values.push_back(v);
        }
    }
    if (label_cells.empty()) throw ParseError(path.string() + ": no data rows");

    std::vector<Label> labels(label_cells.size());
    bool all_int = true;
    for (std::size_t i = 0; i < label_cells.size() && all_int; ++i) all_int = parse_int(label_cells[i], labels[i]);
    if (!all_int) {
        std::map<std::string, Label> codes;
        for (const auto& cell : label_cells) codes.emplace(cell, 0);
        Label next = 0;
        for (auto& [name, code] : codes) code = next++;
        for (std::size_t i = 0; i < label_cells.size(); ++i) labels[i] = codes.at(label_cells[i]);
    }

    const std::size_t n = label_cells.size();
    const std::size_t d = names.size();
    if (d == 0) throw SchemaError(path.string() + ": no feature columns");
    Mat features(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < d; ++f) {
            features(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(i)) = values[i * d + f];
        }
    }
    return RawTable{RealMatrix(std::move(features)), std::move(labels), std::move(names)};
}

void save_csv(const RawTable& table, const std::filesystem::path& path, const std::string& label_column) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    const Mat& x = table.features.mat();
    for (Eigen::Index f = 0; f < x.rows(); ++f) {
        const auto fi = static_cast<std::size_t>(f);
        out << (fi < table.feature_names.size() ? table.feature_names[fi] : "f" + std::to_string(f)) << ',';
    }
    out << label_column << '\n';
    char buf[32];
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        for (Eigen::Index f = 0; f < x.rows(); ++f) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x(f, i));
            out.write(buf, ptr - buf);
            out << ',';
        }
        out << table.labels[static_cast<std::size_t>(i)] << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

RawTable make_blobs(const BlobSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> box(spec.box_low, spec.box_high);
    std::normal_distribution<double> noise(0.0, 1.0);

    const auto d = static_cast<Eigen::Index>(spec.n_features);
    Mat centers(d, static_cast<Eigen::Index>(spec.n_centers));
    for (Eigen::Index c = 0; c < centers.cols(); ++c) {
        for (Eigen::Index f = 0; f < d; ++f) centers(f, c) = box(rng);
    }

    Mat x(d, static_cast<Eigen::Index>(spec.n_samples));
    std::vector<Label> labels(spec.n_samples);
    for (std::size_t i = 0; i < spec.n_samples; ++i) {
        const auto c = static_cast<Eigen::Index>(i % spec.n_centers);
        labels[i] = static_cast<Label>(c);
        for (Eigen::Index f = 0; f < d; ++f) {
            x(f, static_cast<Eigen::Index>(i)) = centers(f, c) + spec.cluster_std * noise(rng);
        }
    }
    std::vector<std::string> names(spec.n_features);
    for (std::size_t f = 0; f < names.size(); ++f) names[f] = "f" + std::to_string(f);
    return RawTable{RealMatrix(std::move(x)), std::move(labels), std::move(names)};
}

LabeledDataset minmax_scale(const RawTable& table) {
    const Mat& x = table.features.mat();
    if (x.cols() < 1 || x.rows() < 1) throw ContractError("minmax_scale: empty table");
    if (!kernel::all_finite(x)) throw DataError("minmax_scale: NaN or infinite feature value");
    Mat scaled(x.rows(), x.cols());
    for (Eigen::Index f = 0; f < x.rows(); ++f) {
        const double lo = x.row(f).minCoeff();
        const double hi = x.row(f).maxCoeff();
        if (hi > lo) {
            scaled.row(f) = (x.row(f).array() - lo) / (hi - lo);
        } else {
            scaled.row(f).setZero();
        }
    }
    return LabeledDataset(NonNegMatrix(std::move(scaled)), table.labels);
}

std::vector<double> anova_f_scores(const RawTable& table) {
    const Mat& x = table.features.mat();
    const auto groups = indices_by_class(table.labels);
    const double n = static_cast<double>(table.n_samples());
    const double k = static_cast<double>(groups.size());
    std::vector<double> scores(static_cast<std::size_t>(x.rows()), 0.0);
    if (groups.size() < 2 || n <= k) return scores;

    for (Eigen::Index f = 0; f < x.rows(); ++f) {
        const double grand = x.row(f).mean();
        double between = 0.0;
        double within = 0.0;
        for (const auto& idx : groups) {
            double mean = 0.0;
            for (auto i : idx) mean += x(f, static_cast<Eigen::Index>(i));
            mean /= static_cast<double>(idx.size());
            between += static_cast<double>(idx.size()) * (mean - grand) * (mean - grand);
            for (auto i : idx) {
                const double dev = x(f, static_cast<Eigen::Index>(i)) - mean;
                within += dev * dev;
            }
        }
        double& score = scores[static_cast<std::size_t>(f)];
        if (within > 0.0) {
            score = (between / (k - 1.0)) / (within / (n - k));
        } else {
            score = between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        }
    }
    return scores;
}

RawTable select_k_best(const RawTable& table, std::size_t k) {
    const std::size_t d = table.n_features();
    if (k < 1 || k > d) {
        throw ContractError("select_k_best: k=" + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
    }
    const auto scores = anova_f_scores(table);
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(k);
    std::sort(order.begin(), order.end());

    const Mat& x = table.features.mat();
    Mat kept(static_cast<Eigen::Index>(k), x.cols());
    std::vector<std::string> names;
    for (std::size_t q = 0; q < k; ++q) {
        kept.row(static_cast<Eigen::Index>(q)) = x.row(static_cast<Eigen::Index>(order[q]));
        if (order[q] < table.feature_names.size()) names.push_back(table.feature_names[order[q]]);
    }
    return RawTable{RealMatrix(std::move(kept)), table.labels, std::move(names)};
}

std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& data, double test_fraction,
                                                           std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ContractError("train_test_split: test_fraction must be in (0,1)");
    }
    data.require_min_class_size(2, "train_test_split");
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> train, test;
    for (auto idx : indices_by_class(data.y())) {
        std::shuffle(idx.begin(), idx.end(), rng);
        auto n_test = static_cast<std::size_t>(std::lround(static_cast<double>(idx.size()) * test_fraction));
        n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
        test.insert(test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
        train.insert(train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {data.select(train), data.select(test)};
}

std::vector<std::size_t> stratified_subsample(const std::vector<Label>& labels, std::size_t n, std::uint64_t seed) {
    if (n < 1 || n > labels.size()) {
        throw ContractError("stratified_subsample: n=" + std::to_string(n) + " outside [1, " +
                            std::to_string(labels.size()) + "]");
    }
    auto groups = indices_by_class(labels);
    const double total = static_cast<double>(labels.size());

    // largest-remainder apportionment of n across classes
    std::vector<std::size_t> quota(groups.size());
    std::vector<std::pair<double, std::size_t>> remainder;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        const double exact = static_cast<double>(n) * static_cast<double>(groups[c].size()) / total;
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[c];
        remainder.emplace_back(-(exact - std::floor(exact)), c);
    }
    std::sort(remainder.begin(), remainder.end());
    for (std::size_t q = 0; assigned < n; ++q) {
        ++quota[remainder[q % remainder.size()].second];
        ++assigned;
    }

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        std::shuffle(groups[c].begin(), groups[c].end(), rng);
        const auto take = std::min(quota[c], groups[c].size());
        out.insert(out.end(), groups[c].begin(), groups[c].begin() + static_cast<std::ptrdiff_t>(take));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace cnmf
