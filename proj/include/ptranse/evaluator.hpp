#pragma once
// Link prediction protocols: entity prediction with two-stage re-ranking and
// relation prediction, each under the raw and filter settings.

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "ptranse/kg_store.hpp"
#include "ptranse/scoring.hpp"

namespace ptranse {

enum class Task { entity, relation };

std::string_view to_string(Task task);
Task parse_task(std::string_view text);

struct RankPair {
    std::size_t raw = 0;
    std::size_t filter = 0;
};

inline constexpr std::size_t kDefaultRerank = 500;

// Stage 1 orders every entity by `stage1` direct energies; the best `rerank`
// candidates are then re-ordered by the full score and placed ahead of the
// rest. The true entity sorts after every equal-scored competitor. The
// filter rank skips competitors forming a known triple.
RankPair rank_entities(const Scorer& scorer, const KnowledgeGraph& graph, const Triple& triple,
                       Slot slot, std::size_t rerank = kDefaultRerank,
                       const Scorer* stage1 = nullptr);

// Ranks the original relations (or all, with include_reverse) between the
// pair with the full score.
RankPair rank_relations(const Scorer& scorer, const KnowledgeGraph& graph, const Triple& triple,
                        bool include_reverse = false);

struct QueryRank {
    Triple triple;
    Slot slot;
    std::size_t raw;
    std::size_t filter;
};

struct CategoryCell {
    std::size_t queries = 0;
    std::size_t hits = 0;  // filter hits@N

    double percent() const { return queries ? 100.0 * hits / queries : 0.0; }
};

struct RankingReport {
    Task task = Task::entity;
    ScoreMode mode = ScoreMode::ptranse;
    std::size_t hits_n = 10;
    std::vector<QueryRank> ranks;
    double mean_rank_raw = 0.0;
    double mean_rank_filter = 0.0;
    double hits_raw = 0.0;  // percent
    double hits_filter = 0.0;
    // [category][0 = predicting head, 1 = predicting tail]; entity task only.
    std::array<std::array<CategoryCell, 2>, 4> categories{};
    std::size_t uncategorized = 0;
};

struct EvalConfig {
    std::size_t rerank = kDefaultRerank;
    std::size_t threads = 1;
    bool include_reverse_relations = false;
    // 0 picks 10 for entities and 1 for relations.
    std::size_t hits_n = 0;
};

RankingReport evaluate(const Scorer& scorer, const KnowledgeGraph& graph, Task task,
                       std::span<const Triple> split, const EvalConfig& config = {},
                       const Scorer* stage1 = nullptr);

// Aggregates per-query ranks into the report's metrics.
void summarize(RankingReport& report, const KnowledgeGraph& graph);

void write_report(const std::filesystem::path& path, const RankingReport& report);
std::string format_report(const RankingReport& report);
// "head<TAB>relation<TAB>tail<TAB>slot<TAB>raw<TAB>filter" per query.
void write_rank_dump(const std::filesystem::path& path, const RankingReport& report);

}  // namespace ptranse
