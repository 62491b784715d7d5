#pragma once
// Triple datasets, vocabularies and the adjacency indexes used by mining,
// training and evaluation. A graph is built once and then only read.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ptranse/types.hpp"

namespace ptranse {

// Bidirectional name <-> id map; ids are dense and assigned in insertion order.
class Vocabulary {
public:
    std::int32_t get_or_add(std::string_view name);
    std::optional<std::int32_t> find(std::string_view name) const;
    const std::string& name(std::int32_t id) const;
    std::size_t size() const noexcept { return names_.size(); }
    std::span<const std::string> names() const noexcept { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::int32_t> ids_;
};

// Reads "head<TAB>relation<TAB>tail" lines. Unseen names extend the
// vocabularies; duplicate lines are dropped (first occurrence kept).
std::vector<Triple> load_triples(const std::filesystem::path& path, Vocabulary& entities,
                                 Vocabulary& relations);

// Writes "name<TAB>id" per line.
void write_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);

// Adjacency entry; `entity` is the far endpoint (tail for out-edges, head for
// in-edges).
struct Edge {
    RelationId relation;
    EntityId entity;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class RelationCategory { one_to_one, one_to_many, many_to_one, many_to_many };

inline constexpr std::array<RelationCategory, 4> kAllCategories = {
    RelationCategory::one_to_one, RelationCategory::one_to_many,
    RelationCategory::many_to_one, RelationCategory::many_to_many};

std::string_view to_string(RelationCategory category);

// Fan-out threshold separating "1" from "N" sides of a relation.
inline constexpr double kCategoryThreshold = 1.5;

class KnowledgeGraph {
public:
    KnowledgeGraph() = default;
    KnowledgeGraph(Vocabulary entities, Vocabulary relations, std::vector<Triple> train,
                   std::vector<Triple> valid = {}, std::vector<Triple> test = {});

    // Ingests the three split files into shared vocabularies (train first).
    // An empty valid or test path stands for an empty split.
    static KnowledgeGraph load(const std::filesystem::path& train,
                               const std::filesystem::path& valid,
                               const std::filesystem::path& test);

    // Adds (t, r + N_r, h) for every training triple and doubles the relation
    // vocabulary. Throws if the graph is already augmented.
    void augment_reverse();

    bool augmented() const noexcept { return augmented_; }

    std::size_t num_entities() const noexcept { return entities_.size(); }
    // Current relation count (2 * N_r once augmented).
    std::size_t num_relations() const noexcept { return relations_.size(); }
    std::size_t num_original_relations() const noexcept { return original_relations_; }

    // r <-> r^-1 under the block-offset layout. Requires an augmented graph.
    RelationId reverse(RelationId relation) const;

    const Vocabulary& entities() const noexcept { return entities_; }
    const Vocabulary& relations() const noexcept { return relations_; }

    std::span<const Triple> train() const noexcept { return train_; }
    std::span<const Triple> valid() const noexcept { return valid_; }
    std::span<const Triple> test() const noexcept { return test_; }

    // Outgoing training edges of an entity, sorted by (relation, tail).
    std::span<const Edge> out_edges(EntityId entity) const;
    // Outgoing training edges restricted to one relation.
    std::span<const Edge> out_edges(EntityId entity, RelationId relation) const;
    std::vector<EntityId> successors(EntityId entity, RelationId relation) const;
    // Incoming training edges, sorted by (relation, head).
    std::span<const Edge> in_edges(EntityId entity) const;

    // Sorted relation ids r with (head, r, tail) in train; empty if none.
    std::span<const RelationId> relations_between(EntityId head, EntityId tail) const;

    bool in_train(const Triple& triple) const { return train_set_.contains(triple); }
    // Membership over train (with reverses once augmented), valid and test.
    bool is_known(const Triple& triple) const {
        return train_set_.contains(triple) || held_out_set_.contains(triple);
    }

private:
    void check_ids(std::span<const Triple> triples, const char* split) const;
    void rebuild_indexes();

    Vocabulary entities_;
    Vocabulary relations_;
    std::size_t original_relations_ = 0;
    bool augmented_ = false;

    std::vector<Triple> train_;
    std::vector<Triple> valid_;
    std::vector<Triple> test_;

    std::vector<std::size_t> edge_offsets_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> in_offsets_;
    std::vector<Edge> in_edges_;
    std::unordered_map<std::uint64_t, std::vector<RelationId>> pair_index_;
    std::unordered_set<Triple, TripleHash> train_set_;
    std::unordered_set<Triple, TripleHash> held_out_set_;
};

// Convenience wrapper with value semantics.
KnowledgeGraph augment_reverse(KnowledgeGraph graph);

std::vector<EntityId> successors(const KnowledgeGraph& graph, EntityId entity,
                                 RelationId relation);

// Classifies an original relation by average tails-per-head and
// heads-per-tail over train. Throws for reverse ids or unused relations.
RelationCategory classify_relation(const KnowledgeGraph& graph, RelationId relation);

// Categories for all original relations; relations without training triples
// are reported as nullopt.
std::vector<std::optional<RelationCategory>> classify_relations(const KnowledgeGraph& graph);

}  // namespace ptranse
