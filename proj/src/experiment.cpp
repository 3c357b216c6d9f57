#include "cnmf/experiment.hpp"

#include "cnmf/error.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cnmf {

using nlohmann::json;

namespace {

std::size_t parse_count(const std::string& key, const std::string& value) {
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ContractError("dataset spec: '" + key + "' expects a non-negative integer, got '" + value + "'");
    }
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ContractError("dataset spec: '" + key + "' expects a number, got '" + value + "'");
    }
    return out;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

DatasetSource parse_dataset_source(const std::string& text) {
    constexpr std::string_view prefix = "blob:";
    if (text.rfind(prefix, 0) != 0) {
        if (text.empty()) throw ContractError("dataset: empty source");
        return CsvSource{text};
    }
    BlobSpec spec;
    bool have_cl = false;
    bool have_f = false;
    std::stringstream fields(text.substr(prefix.size()));
    std::string field;
    while (std::getline(fields, field, ',')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw ContractError("dataset spec: expected key=value, got '" + field + "'");
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "cl") {
            spec.n_centers = parse_count(key, value);
            have_cl = true;
        } else if (key == "f") {
            spec.n_features = parse_count(key, value);
            have_f = true;
        } else if (key == "n") {
            spec.n_samples = parse_count(key, value);
        } else if (key == "std") {
            spec.cluster_std = parse_real(key, value);
        } else if (key == "low") {
            spec.box_low = parse_real(key, value);
        } else if (key == "high") {
            spec.box_high = parse_real(key, value);
        } else if (key == "seed") {
            spec.seed = parse_count(key, value);
        } else {
            throw ContractError("dataset spec: unknown key '" + key + "'");
        }
    }
    if (!have_cl || !have_f) throw ContractError("dataset spec: blob sources need cl= and f=");
    spec.validate();
    return spec;
}

void RunConfig::validate() const {
    parse_dataset_source(dataset);
    if (strategies.empty()) throw ContractError("run config: no strategy selected");
    if (ranks.empty()) throw ContractError("run config: rank list is empty");
    for (auto r : ranks) {
        if (r < 1) throw ContractError("run config: ranks must be >= 1");
    }
    if (seeds.empty()) throw ContractError("run config: seed list is empty");
    if (folds < 2) throw ContractError("run config: need at least 2 folds");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ContractError("run config: test fraction outside (0,1)");
    TrainOptions{algo, ranks.front(), max_iters, rel_tol, 0, graph_neighbors}.validate();
    ga.validate();
}

LabeledDataset load_dataset(const RunConfig& config) {
    const DatasetSource source = parse_dataset_source(config.dataset);
    RawTable table = std::holds_alternative<CsvSource>(source)
                         ? load_csv(std::get<CsvSource>(source).path, config.label_column)
                         : make_blobs(std::get<BlobSpec>(source));
    if (config.subsample > 0 && config.subsample < table.n_samples()) {
        table = table.select_samples(stratified_subsample(table.labels, config.subsample, config.subsample_seed));
    }
    if (config.select_k > 0) table = select_k_best(table, config.select_k);
    return minmax_scale(table);
}

CellResult run_cell(const LabeledDataset& train, const std::optional<LabeledDataset>& test, Strategy strategy,
                    std::size_t rank, std::uint64_t seed, const RunConfig& config) {
    TrainOptions options;
    options.algo = config.algo;
    options.rank = rank;
    options.max_iters = config.max_iters;
    options.rel_tol = config.rel_tol;
    options.seed = seed;
    options.graph_neighbors = config.graph_neighbors;

    CrossValidator cv(train, strategy, options, make_folds(train, config.folds, seed));
    GaConfig ga = config.ga;
    ga.seed = seed;

    CellResult cell;
    cell.strategy = strategy;
    cell.rank = rank;
    cell.seed = seed;
    cell.ga = optimize([&](std::span<const double> genes) { return cv.accuracy(genes); }, cv.chromosome_length(), ga);
    cell.cv_accuracy = *cell.ga.best.fitness;
    cell.factorizations = cv.factorizations();
    if (test) {
        const TrainedEnsemble ensemble = fit_final(train, cell.ga.best.genes, options, strategy);
        cell.test_accuracy = ensemble.accuracy(*test);
    }
    return cell;
}

ExperimentReport run_experiment(const RunConfig& config,
                                const std::function<void(const ExperimentReport&)>& checkpoint) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const LabeledDataset data = load_dataset(config);

    ExperimentReport report;
    report.config = config;
    for (auto seed : config.seeds) {
        auto [train, test] = train_test_split(data, config.test_fraction, seed);
        const std::optional<LabeledDataset> held_out =
            config.test_eval ? std::optional<LabeledDataset>(std::move(test)) : std::nullopt;
        for (auto rank : config.ranks) {
            for (auto strategy : config.strategies) {
                report.cells.push_back(run_cell(train, held_out, strategy, rank, seed, config));
                report.summarize();
                if (checkpoint) checkpoint(report);
            }
        }
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.summarize();
    return report;
}

void ExperimentReport::summarize() {
    per_rank_accuracy.clear();
    per_rank_test_accuracy.clear();
    mean_acc.clear();
    mean_acc_std.clear();
    gap_per_rank.clear();

    std::map<Strategy, std::map<std::size_t, std::vector<double>>> cv, held_out;
    std::map<Strategy, std::map<std::uint64_t, std::vector<double>>> by_seed;
    for (const auto& c : cells) {
        cv[c.strategy][c.rank].push_back(c.cv_accuracy);
        if (c.test_accuracy) held_out[c.strategy][c.rank].push_back(*c.test_accuracy);
        by_seed[c.strategy][c.seed].push_back(c.cv_accuracy);
    }
    for (const auto& [strategy, ranks] : cv) {
        double sum = 0.0;
        for (const auto& [rank, accs] : ranks) {
            per_rank_accuracy[strategy][rank] = mean(accs);
            sum += per_rank_accuracy[strategy][rank];
        }
        mean_acc[strategy] = sum / static_cast<double>(ranks.size());
        std::vector<double> seed_means;
        for (const auto& [seed, accs] : by_seed[strategy]) seed_means.push_back(mean(accs));
        mean_acc_std[strategy] = sample_std(seed_means);
    }
    for (const auto& [strategy, ranks] : held_out) {
        for (const auto& [rank, accs] : ranks) per_rank_test_accuracy[strategy][rank] = mean(accs);
    }
    if (per_rank_accuracy.count(Strategy::cnmf) && per_rank_accuracy.count(Strategy::unmf)) {
        const auto& u = per_rank_accuracy.at(Strategy::unmf);
        for (const auto& [rank, acc] : per_rank_accuracy.at(Strategy::cnmf)) {
            if (auto it = u.find(rank); it != u.end()) gap_per_rank[rank] = acc - it->second;
        }
    }
}

std::map<std::size_t, double> aggregate_gap(const std::vector<ExperimentReport>& reports) {
    if (reports.empty()) throw ContractError("aggregate_gap: no reports");
    std::map<std::size_t, double> sum;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& gaps = reports[i].gap_per_rank;
        if (gaps.empty()) throw ContractError("aggregate_gap: report " + std::to_string(i) + " lacks both strategies");
        if (i == 0) {
            for (const auto& [rank, g] : gaps) sum[rank] = 0.0;
        }
        if (gaps.size() != sum.size()) throw ContractError("aggregate_gap: rank grids differ between reports");
        for (const auto& [rank, g] : gaps) {
            auto it = sum.find(rank);
            if (it == sum.end()) throw ContractError("aggregate_gap: rank grids differ between reports");
            it->second += g;
        }
    }
    for (auto& [rank, s] : sum) s /= static_cast<double>(reports.size());
    return sum;
}

json to_json(const RunConfig& c) {
    json strategies = json::array();
    for (auto s : c.strategies) strategies.push_back(std::string(to_string(s)));
    return json{
        {"dataset", c.dataset},
        {"label_column", c.label_column},
        {"select_k", c.select_k},
        {"subsample", c.subsample},
        {"subsample_seed", c.subsample_seed},
        {"algo", std::string(to_string(c.algo))},
        {"strategies", strategies},
        {"ranks", c.ranks},
        {"seeds", c.seeds},
        {"folds", c.folds},
        {"test_fraction", c.test_fraction},
        {"test_eval", c.test_eval},
        {"max_iters", c.max_iters},
        {"rel_tol", c.rel_tol},
        {"graph_neighbors", c.graph_neighbors},
        {"ga",
         {{"pop_size", c.ga.pop_size},
          {"generations", c.ga.generations},
          {"crossover_prob", c.ga.crossover_prob},
          {"mutation_prob", c.ga.mutation_prob},
          {"mutation_sigma", c.ga.mutation_sigma},
          {"tournament_size", c.ga.tournament_size},
          {"patience", c.ga.patience}}},
    };
}

RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    c.dataset = j.at("dataset").get<std::string>();
    c.label_column = j.at("label_column").get<std::string>();
    c.select_k = j.at("select_k").get<std::size_t>();
    c.subsample = j.at("subsample").get<std::size_t>();
    c.subsample_seed = j.at("subsample_seed").get<std::uint64_t>();
    c.algo = parse_algo(j.at("algo").get<std::string>());
    c.strategies.clear();
    for (const auto& s : j.at("strategies")) c.strategies.push_back(parse_strategy(s.get<std::string>()));
    c.ranks = j.at("ranks").get<std::vector<std::size_t>>();
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.folds = j.at("folds").get<std::size_t>();
    c.test_fraction = j.at("test_fraction").get<double>();
    c.test_eval = j.at("test_eval").get<bool>();
    c.max_iters = j.at("max_iters").get<std::size_t>();
    c.rel_tol = j.at("rel_tol").get<double>();
    c.graph_neighbors = j.at("graph_neighbors").get<std::size_t>();
    const auto& ga = j.at("ga");
    c.ga.pop_size = ga.at("pop_size").get<std::size_t>();
    c.ga.generations = ga.at("generations").get<std::size_t>();
    c.ga.crossover_prob = ga.at("crossover_prob").get<double>();
    c.ga.mutation_prob = ga.at("mutation_prob").get<double>();
    c.ga.mutation_sigma = ga.at("mutation_sigma").get<double>();
    c.ga.tournament_size = ga.at("tournament_size").get<std::size_t>();
    c.ga.patience = ga.at("patience").get<std::size_t>();
    return c;
}

json to_json(const ExperimentReport& r) {
    json per_rank = json::array();
    std::map<std::size_t, json> rows;
    for (const auto& [strategy, ranks] : r.per_rank_accuracy) {
        for (const auto& [rank, acc] : ranks) {
            auto& row = rows[rank];
            row["rank"] = rank;
            row["accuracy"][std::string(to_string(strategy))] = acc;
        }
    }
    for (const auto& [strategy, ranks] : r.per_rank_test_accuracy) {
        for (const auto& [rank, acc] : ranks) rows[rank]["test_accuracy"][std::string(to_string(strategy))] = acc;
    }
    for (const auto& [rank, gap] : r.gap_per_rank) rows[rank]["gap"] = gap;
    for (auto& [rank, row] : rows) per_rank.push_back(std::move(row));

    json mean_acc = json::object();
    json mean_std = json::object();
    for (const auto& [strategy, v] : r.mean_acc) mean_acc[std::string(to_string(strategy))] = v;
    for (const auto& [strategy, v] : r.mean_acc_std) mean_std[std::string(to_string(strategy))] = v;

    json cells = json::array();
    for (const auto& c : r.cells) {
        json cell{
            {"strategy", std::string(to_string(c.strategy))},
            {"rank", c.rank},
            {"seed", c.seed},
            {"cv_accuracy", c.cv_accuracy},
            {"factorizations", c.factorizations},
            {"ga",
             {{"best_fitness_per_generation", c.ga.best_fitness_per_generation},
              {"best_chromosome", c.ga.best.genes},
              {"evaluations", c.ga.evaluations}}},
        };
        if (c.test_accuracy) cell["test_accuracy"] = *c.test_accuracy;
        cells.push_back(std::move(cell));
    }

    json out{
        {"config", to_json(r.config)},
        {"per_rank", per_rank},
        {"mean_acc", mean_acc},
        {"mean_acc_std", mean_std},
        {"cells", cells},
    };
    if (r.wall_seconds) out["wall_seconds"] = *r.wall_seconds;
    return out;
}

ExperimentReport report_from_json(const json& j) {
    ExperimentReport r;
    r.config = run_config_from_json(j.at("config"));
    for (const auto& cj : j.at("cells")) {
        CellResult c;
        c.strategy = parse_strategy(cj.at("strategy").get<std::string>());
        c.rank = cj.at("rank").get<std::size_t>();
        c.seed = cj.at("seed").get<std::uint64_t>();
        c.cv_accuracy = cj.at("cv_accuracy").get<double>();
        c.factorizations = cj.at("factorizations").get<std::size_t>();
        if (cj.contains("test_accuracy")) c.test_accuracy = cj.at("test_accuracy").get<double>();
        const auto& ga = cj.at("ga");
        c.ga.best_fitness_per_generation = ga.at("best_fitness_per_generation").get<std::vector<double>>();
        c.ga.best.genes = ga.at("best_chromosome").get<std::vector<double>>();
        c.ga.best.fitness = c.cv_accuracy;
        c.ga.evaluations = ga.at("evaluations").get<std::size_t>();
        r.cells.push_back(std::move(c));
    }
    if (j.contains("wall_seconds")) r.wall_seconds = j.at("wall_seconds").get<double>();
    r.summarize();
    return r;
}

std::string report_csv(const ExperimentReport& r) {
    std::ostringstream out;
    out.precision(17);
    const bool gap = !r.gap_per_rank.empty();
    out << "rank";
    for (const auto& [strategy, ranks] : r.per_rank_accuracy) out << ',' << to_string(strategy);
    if (gap) out << ",gap";
    out << '\n';

    std::map<std::size_t, bool> ranks;
    for (const auto& [strategy, per_rank] : r.per_rank_accuracy) {
        for (const auto& [rank, acc] : per_rank) ranks[rank] = true;
    }
    for (const auto& [rank, unused] : ranks) {
        out << rank;
        for (const auto& [strategy, per_rank] : r.per_rank_accuracy) {
            out << ',';
            if (auto it = per_rank.find(rank); it != per_rank.end()) out << it->second;
        }
        if (gap) {
            out << ',';
            if (auto it = r.gap_per_rank.find(rank); it != r.gap_per_rank.end()) out << it->second;
        }
        out << '\n';
    }
    out << "meanAcc";
    for (const auto& [strategy, v] : r.mean_acc) out << ',' << v;
    if (gap) out << ',' << r.mean_acc.at(Strategy::cnmf) - r.mean_acc.at(Strategy::unmf);
    out << '\n';
    return out.str();
}

void emit_report(const ExperimentReport& report, ReportFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write report " + path.string());
    if (format == ReportFormat::json) {
        out << to_json(report).dump(2) << '\n';
    } else {
        out << report_csv(report);
    }
    if (!out) throw DataError("write failed: " + path.string());
}

ExperimentReport read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open report " + path.string());
    try {
        return report_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace cnmf
