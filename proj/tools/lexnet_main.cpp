#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "lexnet/corpus_io.hpp"
#include "lexnet/runner.hpp"

namespace {

using lexnet::io::Format;
using lexnet::io::RunError;
using lexnet::io::RunOptions;

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kIoError = 2;

nlohmann::json read_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RunError(RunError::Kind::io, "cannot read config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw RunError(RunError::Kind::domain, path + ": " + e.what());
    }
}

/// Runs a handler and maps every failure onto the documented exit codes:
/// 1 for domain problems (invalid corpus, config, parameters), 2 for I/O.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const RunError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == RunError::Kind::io ? kIoError : kDomainError;
    } catch (const lexnet::io::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDomainError;
    }
}

int cmd_validate(const std::string& corpus_path) {
    return guarded([&]() {
        lexnet::BaseNetwork net;
        try {
            net = lexnet::io::load_corpus(corpus_path, false);
        } catch (const lexnet::io::CorpusError& e) {
            std::cerr << corpus_path << ": " << e.what() << '\n';
            std::cerr << "1 violation\n";
            return kDomainError;
        }
        std::vector<lexnet::Violation> violations = net.validate();
        for (const lexnet::Violation& v : violations)
            std::cerr << v.subject << ": " << v.message << '\n';
        if (!violations.empty()) {
            std::cerr << violations.size() << " violation"
                      << (violations.size() == 1 ? "" : "s") << '\n';
            return kDomainError;
        }
        return kOk;
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Citation-network laboratory: corpus tooling, perspective grids, projections, "
                 "and metric reports"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::string format;
    std::uint64_t seed = 0;
    int threads = 0;
    auto* config_opt =
        app.add_option("--config", config_path, "JSON config file (schema depends on the "
                                                "subcommand; see README)");
    auto* out_opt = app.add_option("--out", out_dir, "Output directory");
    auto* seed_opt = app.add_option("--seed", seed, "Override the generator seed");
    auto* format_opt = app.add_option("--format", format, "Table format: csv or json")
                           ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "Worker threads for run (0 = hardware count)")
        ->check(CLI::NonNegativeNumber);

    std::string corpus_path;
    auto* validate =
        app.add_subcommand("validate", "Check a corpus file; violations go to stderr");
    validate->add_option("corpus", corpus_path, "Corpus JSON-lines file")->required();

    auto* generate = app.add_subcommand(
        "generate", "Write a deterministic synthetic corpus as <out>/corpus.jsonl");
    auto* run = app.add_subcommand(
        "run", "Execute a full run config: perspective grid, projections, metrics, manifest");
    auto* derive =
        app.add_subcommand("derive", "Derive one perspective's bipartite edge list");
    auto* project = app.add_subcommand("project", "Compute one one-mode projection");
    auto* metric = app.add_subcommand("metric", "Compute one metric table");

    CLI11_PARSE(app, argc, argv);

    auto options = [&]() {
        RunOptions opts;
        opts.out_dir = out_dir;
        opts.threads = threads;
        if (format_opt->count() > 0) opts.format = lexnet::io::parse_format(format);
        if (seed_opt->count() > 0) opts.seed = seed;
        return opts;
    };
    auto need = [&](const CLI::Option* opt, const char* flag) {
        if (opt->count() == 0)
            throw RunError(RunError::Kind::domain,
                           std::string("this subcommand requires ") + flag);
    };

    if (validate->parsed()) return cmd_validate(corpus_path);

    if (generate->parsed()) {
        return guarded([&]() {
            need(config_opt, "--config");
            need(out_opt, "--out");
            nlohmann::json config = read_config(config_path);
            nlohmann::json wrapped;
            wrapped["synth"] = config.contains("synth") ? config.at("synth") : config;
            auto opts = options();
            lexnet::io::LoadedCorpus corpus = lexnet::io::load_run_corpus(wrapped, opts.seed);
            std::filesystem::create_directories(opts.out_dir);
            lexnet::io::write_file(opts.out_dir / "corpus.jsonl", corpus.bytes);
            std::cout << "nodes=" << corpus.net.node_count()
                      << " references=" << corpus.net.refs().size()
                      << " multiplicity=" << corpus.net.total_multiplicity();
            if (!corpus.procedural_id.empty())
                std::cout << " procedural=" << corpus.procedural_id;
            if (!corpus.cluster_ids.empty()) {
                std::cout << " cluster=";
                for (std::size_t i = 0; i < corpus.cluster_ids.size(); ++i)
                    std::cout << (i ? ";" : "") << corpus.cluster_ids[i];
            }
            std::cout << '\n';
            return kOk;
        });
    }

    if (run->parsed()) {
        return guarded([&]() {
            need(config_opt, "--config");
            need(out_opt, "--out");
            auto opts = options();
            lexnet::io::RunResult result =
                lexnet::io::run_config(read_config(config_path), opts);
            std::cout << "perspectives=" << result.perspectives << " files=" << result.files
                      << " manifest=" << (opts.out_dir / "manifest.json").string() << '\n';
            return kOk;
        });
    }

    auto single = [&](auto&& fn) {
        return guarded([&]() {
            need(config_opt, "--config");
            need(out_opt, "--out");
            std::filesystem::path written = fn(read_config(config_path), options());
            std::cout << written.string() << '\n';
            return kOk;
        });
    };
    if (derive->parsed()) return single(lexnet::io::derive_once);
    if (project->parsed()) return single(lexnet::io::project_once);
    if (metric->parsed()) return single(lexnet::io::metric_once);

    return kDomainError;  // unreachable: a subcommand is required
}
