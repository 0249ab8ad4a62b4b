#include "gbkmv/dataset.hpp"
#include "gbkmv/eval.hpp"
#include "gbkmv/gbkmv_sketch.hpp"
#include "gbkmv/persist.hpp"
#include "gbkmv/search.hpp"
#include "gbkmv/tuner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace gbkmv;

std::unordered_map<ElementId, double> load_fixture_table(
    const std::string& path, Dataset& ds) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture file " + path);
    std::unordered_map<ElementId, double> table;
    std::string token;
    double value;
    while (in >> token >> value) {
        auto [it, inserted] = ds.token_ids.try_emplace(
            token, static_cast<ElementId>(ds.tokens.size()));
        if (inserted) ds.tokens.push_back(token);
        table[it->second] = value;
    }
    return table;
}

// Maps query tokens through the index dictionary; unknown tokens get fresh
// ids past the dictionary and are hashed on the fly.
Record map_query_tokens(const std::vector<std::string>& toks,
                        const GbkmvIndex& index,
                        std::unordered_map<std::string, ElementId>& extra) {
    std::unordered_map<std::string, ElementId> lookup;
    lookup.reserve(index.tokens.size());
    for (std::size_t i = 0; i < index.tokens.size(); ++i)
        lookup.emplace(index.tokens[i], static_cast<ElementId>(i));

    Record rec;
    for (const auto& tok : toks) {
        auto it = lookup.find(tok);
        if (it != lookup.end()) {
            rec.push_back(it->second);
            continue;
        }
        auto [eit, inserted] = extra.try_emplace(
            tok, static_cast<ElementId>(index.tokens.size() + extra.size()));
        rec.push_back(eit->second);
    }
    std::sort(rec.begin(), rec.end());
    rec.erase(std::unique(rec.begin(), rec.end()), rec.end());
    return rec;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) toks.push_back(tok);
    return toks;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GB-KMV containment similarity search"};
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    double budget_ratio = 0.10;
    double threshold = 0.5;
    std::uint32_t min_size = 10;
    app.add_option("--seed", seed, "hash and sampling seed")->capture_default_str();
    app.add_option("--budget", budget_ratio, "space budget as a ratio of N")
        ->capture_default_str();
    app.add_option("--threshold", threshold, "containment threshold t*")
        ->capture_default_str();
    app.add_option("--min-size", min_size, "drop records shorter than this")
        ->capture_default_str();

    // build
    auto* build = app.add_subcommand("build", "build a GB-KMV index");
    std::string build_input, build_output, build_fixture;
    std::int64_t build_r = -1;
    build->add_option("--input", build_input, "dataset, one record per line")->required();
    build->add_option("--output", build_output, "index file")->required();
    build->add_option("--r", build_r, "buffer bits; -1 lets the tuner choose")
        ->capture_default_str();
    build->add_option("--fixture", build_fixture, "two-column (token hash) fixture file");

    // query
    auto* qcmd = app.add_subcommand("query", "containment similarity search");
    std::string q_index, q_file;
    std::uint32_t q_partitions = 32;
    qcmd->add_option("--index", q_index, "index file")->required();
    qcmd->add_option("--query-file", q_file, "one query record per line")->required();
    qcmd->add_option("--partitions", q_partitions, "size partitions")->capture_default_str();

    // eval
    auto* ecmd = app.add_subcommand("eval", "accuracy/space/time evaluation");
    std::string e_input, e_method = "gbkmv", e_report, e_csv;
    std::uint32_t e_queries = 200, e_kprime = 256, e_partitions = 32;
    ecmd->add_option("--input", e_input, "dataset file")->required();
    ecmd->add_option("--method", e_method, "gbkmv|gkmv|kmv|lshe|exact")
        ->capture_default_str();
    ecmd->add_option("--queries", e_queries, "number of sampled queries")
        ->capture_default_str();
    ecmd->add_option("--k-prime", e_kprime, "lshe signature size")->capture_default_str();
    ecmd->add_option("--partitions", e_partitions, "partition count")->capture_default_str();
    ecmd->add_option("--report", e_report, "JSON-lines output path");
    ecmd->add_option("--csv", e_csv, "per-query CSV output path");

    // tune
    auto* tcmd = app.add_subcommand("tune", "buffer-size cost model sweep");
    std::string t_input, t_csv;
    tcmd->add_option("--input", t_input, "dataset file")->required();
    tcmd->add_option("--csv", t_csv, "CSV output path (default stdout)");

    // baseline
    auto* bcmd = app.add_subcommand("baseline", "LSH-Ensemble baseline evaluation");
    std::string b_input, b_report, b_csv;
    std::uint32_t b_queries = 200, b_kprime = 256, b_partitions = 32;
    bcmd->add_option("--input", b_input, "dataset file")->required();
    bcmd->add_option("--queries", b_queries, "number of sampled queries")
        ->capture_default_str();
    bcmd->add_option("--k-prime", b_kprime, "signature size")->capture_default_str();
    bcmd->add_option("--partitions", b_partitions, "partition count")->capture_default_str();
    bcmd->add_option("--report", b_report, "JSON-lines output path");
    bcmd->add_option("--csv", b_csv, "per-query CSV output path");

    // gen-zipf
    auto* gcmd = app.add_subcommand("gen-zipf", "synthetic Zipf workload");
    std::string g_output;
    std::uint64_t g_records = 10000, g_universe = 10000;
    double g_alpha1 = 1.1, g_alpha2 = 2.5;
    std::uint32_t g_min = 10, g_max = 100;
    gcmd->add_option("--output", g_output, "dataset file to write")->required();
    gcmd->add_option("--records", g_records, "record count")->capture_default_str();
    gcmd->add_option("--universe", g_universe, "distinct element count")
        ->capture_default_str();
    gcmd->add_option("--alpha1", g_alpha1, "element frequency exponent")
        ->capture_default_str();
    gcmd->add_option("--alpha2", g_alpha2, "record size exponent")->capture_default_str();
    gcmd->add_option("--size-min", g_min, "minimum record size")->capture_default_str();
    gcmd->add_option("--size-max", g_max, "maximum record size")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            Dataset ds = ingest_file(build_input, min_size);
            HashSource h = HashSource::computed(seed);
            if (!build_fixture.empty()) {
                auto table = load_fixture_table(build_fixture, ds);
                h = HashSource::fixture(seed, std::move(table));
            }
            const double budget = budget_ratio * static_cast<double>(ds.stats.total);
            std::optional<std::uint32_t> r;
            if (build_r >= 0) r = static_cast<std::uint32_t>(build_r);
            const auto index = build_gbkmv_index(ds, budget, r, h);
            save_index_file(index, build_output);
            std::cout << "records=" << index.record_count() << " r=" << index.r
                      << " tau=" << index.tau
                      << " units=" << stored_element_units(index)
                      << " budget=" << budget << '\n';
        } else if (qcmd->parsed()) {
            const auto index = load_index_file(q_index);
            SizePartitionIndex accel(index, q_partitions);
            std::ifstream qin(q_file);
            if (!qin) throw std::runtime_error("cannot open " + q_file);
            std::unordered_map<std::string, ElementId> extra;
            std::string line;
            std::size_t qnum = 0;
            while (std::getline(qin, line)) {
                const auto toks = split_line(line);
                if (toks.empty()) continue;
                const Record q = map_query_tokens(toks, index, extra);
                for (const auto& hit : query(index, accel, q, threshold)) {
                    std::cout << qnum << '\t' << hit.record_id << '\t'
                              << hit.estimate << '\n';
                }
                ++qnum;
            }
        } else if (ecmd->parsed() || bcmd->parsed()) {
            const bool is_baseline = bcmd->parsed();
            Dataset ds = ingest_file(is_baseline ? b_input : e_input, min_size);
            EvalConfig cfg;
            cfg.method = is_baseline ? Method::Lshe : parse_method(e_method);
            cfg.budget_ratio = budget_ratio;
            cfg.t_star = threshold;
            cfg.num_queries = is_baseline ? b_queries : e_queries;
            cfg.seed = seed;
            cfg.k_prime = is_baseline ? b_kprime : e_kprime;
            cfg.partitions = is_baseline ? b_partitions : e_partitions;
            const auto report = run_eval(ds, cfg);

            const std::string report_path = is_baseline ? b_report : e_report;
            const std::string csv_path = is_baseline ? b_csv : e_csv;
            if (!report_path.empty()) {
                std::ofstream out(report_path);
                write_jsonl(report, out);
            }
            if (!csv_path.empty()) {
                std::ofstream out(csv_path);
                write_csv(report, out);
            }
            std::cout << "method=" << method_name(cfg.method)
                      << " precision=" << report.precision
                      << " recall=" << report.recall << " f1=" << report.f1
                      << " f05=" << report.f05
                      << " mean_latency_us=" << report.mean_latency_us
                      << " build_ms=" << report.build_ms
                      << " space_units=" << report.space_units << '\n';
        } else if (tcmd->parsed()) {
            Dataset ds = ingest_file(t_input, min_size);
            const double budget = budget_ratio * static_cast<double>(ds.stats.total);
            const auto inputs =
                make_cost_model_inputs(ds.stats, budget, 10000,
                                       avalanche64(seed ^ 0x746175ull));
            std::ostream* out = &std::cout;
            std::ofstream file;
            if (!t_csv.empty()) {
                file.open(t_csv);
                out = &file;
            }
            *out << "r,predicted_variance\n";
            for (std::uint32_t r : inputs.grid) {
                try {
                    *out << r << ',' << predict_var_gbkmv(inputs, r) << '\n';
                } catch (const std::invalid_argument&) {
                    // infeasible width: skip
                }
            }
            std::cout << "chosen_r=" << choose_buffer_size(inputs) << '\n';
        } else if (gcmd->parsed()) {
            ZipfConfig cfg;
            cfg.records = g_records;
            cfg.alpha1 = g_alpha1;
            cfg.alpha2 = g_alpha2;
            cfg.universe = g_universe;
            cfg.min_size = g_min;
            cfg.max_size = g_max;
            cfg.seed = seed;
            const auto records = generate_zipf(cfg);
            std::ofstream out(g_output);
            if (!out) throw std::runtime_error("cannot open " + g_output);
            for (const auto& rec : records) {
                for (std::size_t i = 0; i < rec.size(); ++i) {
                    if (i) out << ' ';
                    out << 't' << rec[i];
                }
                out << '\n';
            }
            std::cout << "wrote " << records.size() << " records to " << g_output
                      << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
