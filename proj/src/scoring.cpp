#include "ptranse/scoring.hpp"

#include <cmath>
#include <string>

namespace ptranse {

std::string_view to_string(ScoreMode mode) {
    switch (mode) {
        case ScoreMode::ptranse: return "ptranse";
        case ScoreMode::transe: return "transe";
        case ScoreMode::transe_rev: return "transe+rev";
        case ScoreMode::transe_rev_path: return "transe+rev+path";
        case ScoreMode::ptranse_minus_path: return "ptranse-minus-path";
        case ScoreMode::ptranse_minus_transe: return "ptranse-minus-transe";
    }
    return "?";
}

ScoreMode parse_score_mode(std::string_view text) {
    for (auto m : {ScoreMode::ptranse, ScoreMode::transe, ScoreMode::transe_rev,
                   ScoreMode::transe_rev_path, ScoreMode::ptranse_minus_path,
                   ScoreMode::ptranse_minus_transe})
        if (to_string(m) == text) return m;
    throw Error("unknown scoring mode: " + std::string(text));
}

ScoreTerms score_terms(ScoreMode mode) {
    switch (mode) {
        case ScoreMode::transe: return {false, true, false};
        case ScoreMode::transe_rev:
        case ScoreMode::ptranse_minus_path: return {true, true, false};
        case ScoreMode::ptranse:
        case ScoreMode::transe_rev_path: return {true, true, true};
        case ScoreMode::ptranse_minus_transe: return {true, false, true};
    }
    return {true, true, true};
}

namespace {

double distance_to_relation(const EmbeddingStore& store, std::span<const double> p,
                            RelationId relation) {
    auto r = store.relation(relation);
    double acc = 0.0;
    if (store.norm == Dissimilarity::l1) {
        for (std::size_t j = 0; j < p.size(); ++j) acc += std::fabs(p[j] - r[j]);
        return acc;
    }
    for (std::size_t j = 0; j < p.size(); ++j) acc += (p[j] - r[j]) * (p[j] - r[j]);
    return std::sqrt(acc);
}

}  // namespace

double path_term(const EmbeddingStore& store, const CompositionOp& op,
                 const PathRelationStats& stats, const PairPaths& paths, RelationId relation) {
    if (paths.paths.empty() || paths.normalizer <= 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& p : paths.paths) {
        const double confidence = stats.confidence(p.relations, relation);
        if (confidence == 0.0) continue;
        sum += confidence * p.reliability * energy_path(store, op, p.relations, relation);
    }
    return sum / paths.normalizer;
}

double score_G(const EmbeddingStore& store, const CompositionOp& op, const PathSet& paths,
               const PathRelationStats& stats, const Triple& triple) {
    double g = energy_direct(store, triple);
    if (const auto* entry = paths.find(triple.head, triple.tail))
        g += path_term(store, op, stats, *entry, triple.relation);
    return g;
}

double score_S(const EmbeddingStore& store, const CompositionOp& op, const KnowledgeGraph& graph,
               const PathSet& paths, const PathRelationStats& stats, const Triple& triple) {
    const Triple back{triple.tail, graph.reverse(triple.relation), triple.head};
    return score_G(store, op, paths, stats, triple) + score_G(store, op, paths, stats, back);
}

const PairPaths& PathLookup::find(EntityId head, EntityId tail, PairPaths& scratch) const {
    if (const auto* entry = mined_.find(head, tail)) return *entry;
    scratch = PairPaths{};
    if (graph_) {
        scratch.paths = mine_pair(*graph_, head, tail, config_);
        for (const auto& p : scratch.paths) scratch.normalizer += p.reliability;
    }
    return scratch;
}

ComposedPaths::ComposedPaths(const EmbeddingStore& store, const CompositionOp& op,
                             const PathRelationStats& stats, const PairPaths& paths)
    : normalizer_(paths.normalizer) {
    if (normalizer_ <= 0.0) return;
    for (const auto& p : paths.paths) {
        const auto* conf = stats.relations_for(p.relations);
        if (!conf || conf->empty()) continue;
        items_.push_back({compose_path(store, op, p.relations), p.reliability, conf});
    }
}

double ComposedPaths::term(const EmbeddingStore& store, RelationId relation) const {
    double sum = 0.0;
    for (const auto& item : items_) {
        auto it = item.confidence->find(relation);
        if (it == item.confidence->end() || it->second == 0.0) continue;
        sum += it->second * item.reliability * distance_to_relation(store, item.vector, relation);
    }
    return items_.empty() ? 0.0 : sum / normalizer_;
}

Scorer::Scorer(const Model& model, const KnowledgeGraph& graph, const PathLookup& paths,
               const PathRelationStats& stats, ScoreMode mode)
    : model_(model), graph_(graph), paths_(paths), stats_(stats), mode_(mode),
      terms_(score_terms(mode)) {
    if (terms_.both_directions && !graph.augmented())
        throw Error("scoring mode requires reverse relations in the graph");
}

double Scorer::direct_part(const Triple& triple) const {
    const auto& store = model_.embeddings;
    double s = energy_direct(store, triple);
    if (terms_.both_directions)
        s += energy_direct(store, {triple.tail, graph_.reverse(triple.relation), triple.head});
    return s;
}

double Scorer::stage1(const Triple& triple) const { return direct_part(triple); }

double Scorer::full(const Triple& triple) const {
    double s = terms_.direct ? direct_part(triple) : 0.0;
    if (!terms_.path) return s;
    const auto& store = model_.embeddings;
    const auto& op = model_.composition;
    PairPaths scratch;
    s += path_term(store, op, stats_, paths_.find(triple.head, triple.tail, scratch),
                   triple.relation);
    if (terms_.both_directions)
        s += path_term(store, op, stats_, paths_.find(triple.tail, triple.head, scratch),
                       graph_.reverse(triple.relation));
    return s;
}

std::vector<double> Scorer::relation_scores(EntityId head, EntityId tail,
                                            std::size_t count) const {
    const auto& store = model_.embeddings;
    std::vector<double> scores(count, 0.0);
    for (std::size_t r = 0; r < count; ++r)
        if (terms_.direct) scores[r] = direct_part({head, static_cast<RelationId>(r), tail});
    if (!terms_.path) return scores;

    PairPaths fwd_scratch, bwd_scratch;
    ComposedPaths forward(store, model_.composition, stats_,
                          paths_.find(head, tail, fwd_scratch));
    std::optional<ComposedPaths> backward;
    if (terms_.both_directions)
        backward.emplace(store, model_.composition, stats_,
                         paths_.find(tail, head, bwd_scratch));
    for (std::size_t r = 0; r < count; ++r) {
        const auto rel = static_cast<RelationId>(r);
        scores[r] += forward.term(store, rel);
        if (backward) scores[r] += backward->term(store, graph_.reverse(rel));
    }
    return scores;
}

}  // namespace ptranse
