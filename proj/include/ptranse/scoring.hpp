#pragma once
// Test-time scores.
//
//   G(h, r, t) = ||h + r - t|| + (1/Z) sum_p Pr(r|p) R(p|h,t) ||p - r||
//   S(h, r, t) = G(h, r, t) + G(t, r^-1, h)
//
// Lower is more plausible. The scoring modes switch individual terms on or
// off to reproduce the ablation configurations.

#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ptranse/kg_store.hpp"
#include "ptranse/model.hpp"
#include "ptranse/path_miner.hpp"

namespace ptranse {

enum class ScoreMode {
    ptranse,               // direct + path, both directions
    transe,                // forward direct term only
    transe_rev,            // direct term, both directions
    transe_rev_path,       // direct + path, both directions (TransE-trained store)
    ptranse_minus_path,    // direct term, both directions
    ptranse_minus_transe,  // path term, both directions
};

std::string_view to_string(ScoreMode mode);
ScoreMode parse_score_mode(std::string_view text);

struct ScoreTerms {
    bool both_directions;
    bool direct;
    bool path;
};

ScoreTerms score_terms(ScoreMode mode);

// (1/Z) sum_p Pr(r|p) R(p|h,t) ||p - r|| over one pair's paths.
double path_term(const EmbeddingStore& store, const CompositionOp& op,
                 const PathRelationStats& stats, const PairPaths& paths, RelationId relation);

// G over mined pairs only; absent pairs contribute no path term.
double score_G(const EmbeddingStore& store, const CompositionOp& op, const PathSet& paths,
               const PathRelationStats& stats, const Triple& triple);
double score_S(const EmbeddingStore& store, const CompositionOp& op, const KnowledgeGraph& graph,
               const PathSet& paths, const PathRelationStats& stats, const Triple& triple);

// Paths for arbitrary pairs: stored entries first, otherwise mined on the
// training graph on demand (never cached, so lookups are thread-safe).
class PathLookup {
public:
    explicit PathLookup(const PathSet& mined) : mined_(mined) {}
    PathLookup(const PathSet& mined, const KnowledgeGraph& graph, MiningConfig config)
        : mined_(mined), graph_(&graph), config_(config) {}

    const PairPaths& find(EntityId head, EntityId tail, PairPaths& scratch) const;

private:
    const PathSet& mined_;
    const KnowledgeGraph* graph_ = nullptr;
    MiningConfig config_;
};

// Composed path vectors of one pair, reusable across candidate relations.
class ComposedPaths {
public:
    ComposedPaths(const EmbeddingStore& store, const CompositionOp& op,
                  const PathRelationStats& stats, const PairPaths& paths);

    double term(const EmbeddingStore& store, RelationId relation) const;
    bool empty() const noexcept { return items_.empty(); }

private:
    struct Item {
        std::vector<double> vector;
        double reliability;
        const std::unordered_map<RelationId, double>* confidence;
    };
    std::vector<Item> items_;
    double normalizer_ = 0.0;
};

class Scorer {
public:
    Scorer(const Model& model, const KnowledgeGraph& graph, const PathLookup& paths,
           const PathRelationStats& stats, ScoreMode mode);

    ScoreMode mode() const noexcept { return mode_; }
    const Model& model() const noexcept { return model_; }

    // Direct-energy ranking used before re-ranking: forward only in TransE mode,
    // both directions otherwise.
    double stage1(const Triple& triple) const;
    // Full score under the mode.
    double full(const Triple& triple) const;
    // full() for every relation id in [0, count) between head and tail.
    std::vector<double> relation_scores(EntityId head, EntityId tail, std::size_t count) const;

private:
    double direct_part(const Triple& triple) const;

    const Model& model_;
    const KnowledgeGraph& graph_;
    const PathLookup& paths_;
    const PathRelationStats& stats_;
    ScoreMode mode_;
    ScoreTerms terms_;
};

}  // namespace ptranse
