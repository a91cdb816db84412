#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexnet/emit.hpp"
#include "lexnet/synth.hpp"

namespace lexnet::io {

/// Failures split into what exit codes need: domain covers config and corpus
/// validity, io covers the filesystem.
class RunError : public std::runtime_error {
public:
    enum class Kind { domain, io };
    RunError(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct RunOptions {
    std::filesystem::path out_dir;
    int threads = 0;                          // 0 picks the hardware count
    std::optional<Format> format;             // overrides the config's formats
    std::optional<std::uint64_t> seed;        // overrides synth seed
};

struct RunResult {
    std::size_t perspectives = 0;
    std::size_t files = 0;  // files listed in the manifest
};

/// Executes a full run config: resolves the corpus, enumerates perspectives,
/// emits every requested artifact under opts.out_dir, and writes
/// manifest.json last. An INCOMPLETE marker exists for exactly the duration
/// of the run, so its presence flags an aborted tree. Output bytes are a pure
/// function of (config, seed); thread count never changes them.
RunResult run_config(const nlohmann::json& config, const RunOptions& opts);

/// Single-shot variants sharing the run config schema. Each writes one file
/// (plus corpus.jsonl for synthetic corpora) and returns its path.
std::filesystem::path derive_once(const nlohmann::json& config, const RunOptions& opts);
std::filesystem::path project_once(const nlohmann::json& config, const RunOptions& opts);
std::filesystem::path metric_once(const nlohmann::json& config, const RunOptions& opts);

/// Corpus material a config resolves to: either a file load or a synthetic
/// build. `bytes` is exactly what corpus_hash digests.
struct LoadedCorpus {
    BaseNetwork net;
    std::string bytes;
    bool synthetic = false;
    std::string procedural_id;
    std::vector<std::string> cluster_ids;
};

LoadedCorpus load_run_corpus(const nlohmann::json& config,
                             const std::optional<std::uint64_t>& seed_override);

/// {"judicial_rank": J, "legislative_rank": L, "judicial_filter"?: F,
///  "legislative_filter"?: F}; filters default to pass-all.
Perspective parse_perspective(const nlohmann::json& j);

/// {"side"?: S, "mode": M, "witness_rank": R, "k"?: int, "presence"?: P};
/// parse_weightings additionally accepts an integer array under "k" and
/// expands it into one spec per value.
WeightingSpec parse_weighting(const nlohmann::json& j);
std::vector<WeightingSpec> parse_weightings(const nlohmann::json& j);

/// Stable directory / file name stems. A filter contributes a positional
/// suffix only when it actually restricts nodes.
std::string perspective_slug(const Perspective& p);
std::string weighting_slug(const WeightingSpec& w);

}  // namespace lexnet::io
