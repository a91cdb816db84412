#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexnet/model.hpp"
#include "lexnet/rational.hpp"

namespace lexnet::io {

/// Reproducible bounded draws on top of std::mt19937_64. The engine is fully
/// specified by the standard; distribution classes are not, so bounded draws
/// are hand-rolled to keep corpora byte-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, bound); bound > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound);
    /// Uniform in [lo, hi] inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

struct PlantedProcedural {
    std::string target;           // section id; empty picks the first section
    Rational decision_fraction = Rational(93, 100);
    int max_mentions = 2;         // per covered decision
};

struct PlantedCluster {
    int sections = 3;             // distinct sections co-referenced together
    int paragraphs = 10;          // paragraphs hosting the full cluster
};

struct SynthConfig {
    std::uint64_t seed = 1;
    // counts per level, coarse to fine
    std::vector<std::int64_t> judicial_counts{1, 2, 10, 40};
    std::vector<std::int64_t> legislative_counts{2, 10, 15, 5, 2};
    // children-per-parent bounds used when attaching each level
    std::int64_t judicial_branch_min = 1, judicial_branch_max = 64;
    std::int64_t legislative_branch_min = 0, legislative_branch_max = 64;
    // background references: exact total multiplicity, split across target
    // ranks by exact fractions, mention multiplicities drawn in [min, max]
    std::int64_t reference_total = 100;
    std::int64_t multiplicity_min = 1, multiplicity_max = 1;
    std::vector<Rational> rank_fractions{Rational(0), Rational(1, 2), Rational(1, 4),
                                         Rational(1, 4), Rational(0)};
    std::optional<PlantedProcedural> procedural;
    std::optional<PlantedCluster> cluster;

    static SynthConfig from_json(const nlohmann::json& j);
};

class SynthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SynthResult {
    BaseNetwork net;
    std::string procedural_id;             // planted norm, empty when not requested
    std::vector<std::string> cluster_ids;  // planted co-reference sections
};

/// Deterministic for a fixed config+seed. Background references sum to
/// exactly reference_total; planted patterns add on top. Throws SynthError
/// when counts cannot satisfy the branching bounds or a positive rank
/// fraction has no target nodes.
SynthResult generate_synthetic(const SynthConfig& config);

}  // namespace lexnet::io
