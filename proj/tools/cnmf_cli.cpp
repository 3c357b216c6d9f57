// cnmf: run cNMF / uNMF experiments, aggregate gaps, export synthetic datasets.

#include "cnmf/data.hpp"
#include "cnmf/error.hpp"
#include "cnmf/experiment.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class T>
T parse_number(const std::string& text, const char* what) {
    T out{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw UsageError(std::string(what) + ": not a number: '" + text + "'");
    }
    return out;
}

// "2,4,6" or "0..4" (inclusive) or a mix such as "0..2,7"
template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (const auto dots = item.find(".."); dots != std::string::npos) {
            const T lo = parse_number<T>(item.substr(0, dots), what);
            const T hi = parse_number<T>(item.substr(dots + 2), what);
            if (hi < lo) throw UsageError(std::string(what) + ": empty range '" + item + "'");
            for (T v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(parse_number<T>(item, what));
        }
    }
    if (out.empty()) throw UsageError(std::string(what) + ": empty list");
    return out;
}

cnmf::ReportFormat format_for(const std::string& requested, const std::filesystem::path& out) {
    if (requested == "json") return cnmf::ReportFormat::json;
    if (requested == "csv") return cnmf::ReportFormat::csv;
    if (!requested.empty()) throw UsageError("--format must be json or csv");
    return out.extension() == ".csv" ? cnmf::ReportFormat::csv : cnmf::ReportFormat::json;
}

struct RunArgs {
    cnmf::RunConfig config;
    std::string algo = "gnmf";
    std::string strategy = "both";
    std::string ranks = "2,4,6,8,10";
    std::string seeds = "0..4";
    std::string out = "report.json";
    std::string format;
    std::string config_file;
    bool record_time = false;
    bool quiet = false;
};

// Values from the file fill only the options not given on the command line.
void apply_config_file(CLI::App& cmd, const std::string& path) {
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_file(path);
    } catch (const CLI::FileError& e) {
        throw UsageError(e.what());
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;
        CLI::Option* opt = cmd.get_option_no_throw("--" + item.name);
        if (opt == nullptr || item.name == "config") {
            throw UsageError(path + ": unknown key '" + item.fullname() + "'");
        }
        if (opt->count() > 0) continue;
        // the INI reader splits on commas; every run option takes a single string
        std::string value;
        for (const auto& part : item.inputs) value += (value.empty() ? "" : ",") + part;
        opt->add_result(value);
        try {
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw UsageError(path + ": " + item.name + ": " + e.what());
        }
    }
}

int run_command(CLI::App& cmd, RunArgs& args) {
    if (!args.config_file.empty()) apply_config_file(cmd, args.config_file);
    cnmf::RunConfig& config = args.config;
    if (config.dataset.empty()) throw UsageError("--dataset is required (on the command line or in --config)");
    try {
        config.algo = cnmf::parse_algo(args.algo);
        if (args.strategy == "both") {
            config.strategies = {cnmf::Strategy::cnmf, cnmf::Strategy::unmf};
        } else {
            config.strategies = {cnmf::parse_strategy(args.strategy)};
        }
        config.ranks = parse_list<std::size_t>(args.ranks, "--ranks");
        config.seeds = parse_list<std::uint64_t>(args.seeds, "--seeds");
        config.validate();
    } catch (const cnmf::ContractError& e) {
        throw UsageError(e.what());
    }
    const std::filesystem::path out = args.out;
    const auto format = format_for(args.format, out);

    auto write = [&](cnmf::ExperimentReport report) {
        if (!args.record_time) report.wall_seconds.reset();
        cnmf::emit_report(report, format, out);
    };
    cnmf::ExperimentReport partial;
    partial.config = config;
    try {
        const auto report = cnmf::run_experiment(config, [&](const cnmf::ExperimentReport& r) {
            partial = r;
            if (!args.quiet) {
                const auto& c = r.cells.back();
                std::cerr << cnmf::to_string(c.strategy) << " rank=" << c.rank << " seed=" << c.seed
                          << " cv_acc=" << c.cv_accuracy << " generations=" << c.ga.best_fitness_per_generation.size()
                          << " factorizations=" << c.factorizations << '\n';
            }
        });
        write(report);
        if (!args.quiet) std::cout << cnmf::report_csv(report);
    } catch (...) {
        if (!partial.cells.empty()) {
            try {
                write(partial);
            } catch (...) {
            }
        }
        throw;
    }
    return kOk;
}

int gap_command(const std::vector<std::string>& inputs, const std::string& out_path) {
    std::vector<cnmf::ExperimentReport> reports;
    for (const auto& p : inputs) reports.push_back(cnmf::read_report(p));
    std::map<std::size_t, double> gaps;
    try {
        gaps = cnmf::aggregate_gap(reports);
    } catch (const cnmf::ContractError& e) {
        throw cnmf::DataError(e.what());
    }
    std::ostringstream csv;
    csv.precision(17);
    csv << "rank,mean_gap\n";
    for (const auto& [rank, g] : gaps) csv << rank << ',' << g << '\n';
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw cnmf::DataError("cannot write " + out_path);
        out << csv.str();
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Class-pairwise parameterized NMF experiments"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "GA-tuned cNMF / uNMF cross-validation over a rank grid");
    run_cmd->add_option("--config", run.config_file, "key=value file, one flag per line; command-line flags win");
    run_cmd->add_option("--dataset", run.config.dataset, "CSV path or blob:cl=<n>,f=<n>[,n=,std=,low=,high=,seed=]");
    run_cmd->add_option("--label-column", run.config.label_column, "label column name for CSV input")
        ->capture_default_str();
    run_cmd->add_option("--select-k", run.config.select_k, "keep the k best features by ANOVA F (0: all)");
    run_cmd->add_option("--subsample", run.config.subsample, "stratified subsample size (0: all)");
    run_cmd->add_option("--subsample-seed", run.config.subsample_seed);
    run_cmd->add_option("--algo", run.algo, "gnmf | frnmf")->capture_default_str();
    run_cmd->add_option("--strategy", run.strategy, "cnmf | unmf | both")->capture_default_str();
    run_cmd->add_option("--ranks", run.ranks, "comma list, ranges a..b allowed")->capture_default_str();
    run_cmd->add_option("--seeds", run.seeds, "comma list, ranges a..b allowed")->capture_default_str();
    run_cmd->add_option("--folds", run.config.folds)->capture_default_str();
    run_cmd->add_option("--test-fraction", run.config.test_fraction)->capture_default_str();
    run_cmd->add_flag("--test-eval", run.config.test_eval, "also score the refit ensemble on the held-out split");
    run_cmd->add_option("--max-iters", run.config.max_iters)->capture_default_str();
    run_cmd->add_option("--rel-tol", run.config.rel_tol)->capture_default_str();
    run_cmd->add_option("--graph-k", run.config.graph_neighbors, "GNMF neighbourhood size")->capture_default_str();
    run_cmd->add_option("--pop-size", run.config.ga.pop_size)->capture_default_str();
    run_cmd->add_option("--generations", run.config.ga.generations)->capture_default_str();
    run_cmd->add_option("--crossover-prob", run.config.ga.crossover_prob)->capture_default_str();
    run_cmd->add_option("--mutation-prob", run.config.ga.mutation_prob)->capture_default_str();
    run_cmd->add_option("--mutation-sigma", run.config.ga.mutation_sigma)->capture_default_str();
    run_cmd->add_option("--tournament-size", run.config.ga.tournament_size)->capture_default_str();
    run_cmd->add_option("--patience", run.config.ga.patience, "0 disables early stopping")->capture_default_str();
    run_cmd->add_option("--out", run.out, "report path")->capture_default_str();
    run_cmd->add_option("--format", run.format, "json | csv (default: from --out extension)");
    run_cmd->add_flag("--record-time", run.record_time, "store wall time in the report (breaks bitwise reruns)");
    run_cmd->add_flag("-q,--quiet", run.quiet);

    std::vector<std::string> gap_inputs;
    std::string gap_out;
    auto* gap_cmd = app.add_subcommand("gap", "mean cNMF - uNMF gap per rank across JSON reports");
    gap_cmd->add_option("reports", gap_inputs, "JSON reports")->required();
    gap_cmd->add_option("--out", gap_out, "CSV output (default: stdout)");

    cnmf::BlobSpec blob;
    std::string blob_out;
    auto* blob_cmd = app.add_subcommand("blobs", "write a synthetic Gaussian blob dataset as CSV");
    blob_cmd->add_option("--cl", blob.n_centers)->capture_default_str();
    blob_cmd->add_option("--f", blob.n_features)->capture_default_str();
    blob_cmd->add_option("--n", blob.n_samples)->capture_default_str();
    blob_cmd->add_option("--std", blob.cluster_std)->capture_default_str();
    blob_cmd->add_option("--seed", blob.seed)->capture_default_str();
    blob_cmd->add_option("--out", blob_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*run_cmd) return run_command(*run_cmd, run);
        if (*gap_cmd) return gap_command(gap_inputs, gap_out);
        if (*blob_cmd) {
            try {
                blob.validate();
            } catch (const cnmf::ContractError& e) {
                throw UsageError(e.what());
            }
            cnmf::save_csv(cnmf::make_blobs(blob), blob_out);
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const cnmf::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const cnmf::ContractError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    }
    return kUsage;
}
