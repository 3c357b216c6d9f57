#pragma once

#include "cnmf/data.hpp"
#include "cnmf/ga.hpp"
#include "cnmf/trainer.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cnmf {

struct CsvSource {
    std::filesystem::path path;
};

/// Where a run's samples come from: a CSV file or a synthetic blob recipe.
using DatasetSource = std::variant<CsvSource, BlobSpec>;

/// "blob:cl=10,f=40[,n=1000,std=1,low=1,high=5,seed=0]" or a CSV path.
DatasetSource parse_dataset_source(const std::string& text);

struct RunConfig {
    std::string dataset;
    std::string label_column = "label";
    std::size_t select_k = 0;         ///< 0 keeps every feature
    std::size_t subsample = 0;        ///< 0 keeps every sample
    std::uint64_t subsample_seed = 0;
    Algo algo = Algo::gnmf;
    std::vector<Strategy> strategies{Strategy::cnmf, Strategy::unmf};
    std::vector<std::size_t> ranks{2, 4, 6, 8, 10};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::size_t folds = 5;
    double test_fraction = 0.3;
    bool test_eval = false;
    std::size_t max_iters = 200;
    double rel_tol = 1e-4;
    std::size_t graph_neighbors = 5;
    GaConfig ga;  ///< ga.seed is replaced by each run seed

    void validate() const;
};

/// Loads (and optionally subsamples / feature-selects) the configured dataset, then min-max scales it.
LabeledDataset load_dataset(const RunConfig& config);

/// One GA-tuned training run for a (strategy, rank, seed) cell.
struct CellResult {
    Strategy strategy = Strategy::cnmf;
    std::size_t rank = 0;
    std::uint64_t seed = 0;
    double cv_accuracy = 0.0;
    std::optional<double> test_accuracy;
    GaTrace ga;
    std::size_t factorizations = 0;
};

struct ExperimentReport {
    RunConfig config;
    std::vector<CellResult> cells;
    std::optional<double> wall_seconds;

    // Derived from cells by summarize().
    std::map<Strategy, std::map<std::size_t, double>> per_rank_accuracy;  ///< mean over seeds
    std::map<Strategy, std::map<std::size_t, double>> per_rank_test_accuracy;
    std::map<Strategy, double> mean_acc;      ///< mean of per_rank_accuracy over ranks
    std::map<Strategy, double> mean_acc_std;  ///< std over seeds of the per-seed meanAcc
    std::map<std::size_t, double> gap_per_rank;

    void summarize();
};

/// Runs one GA-tuned cell on an already split training set.
CellResult run_cell(const LabeledDataset& train, const std::optional<LabeledDataset>& test, Strategy strategy,
                    std::size_t rank, std::uint64_t seed, const RunConfig& config);

/// Every (seed, rank, strategy) cell. `checkpoint` sees the partial report after each cell.
ExperimentReport run_experiment(const RunConfig& config,
                                const std::function<void(const ExperimentReport&)>& checkpoint = {});

/// Per-rank mean of the cNMF − uNMF gap across reports.
std::map<std::size_t, double> aggregate_gap(const std::vector<ExperimentReport>& reports);

enum class ReportFormat { json, csv };

nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

/// rank,<strategy columns>[,gap] with one row per rank and a final meanAcc row.
std::string report_csv(const ExperimentReport& report);

void emit_report(const ExperimentReport& report, ReportFormat format, const std::filesystem::path& path);
ExperimentReport read_report(const std::filesystem::path& path);

}  // namespace cnmf
