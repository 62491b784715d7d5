#pragma once
// Bounded-length relation path enumeration with path-constraint resource
// allocation (PCRA) reliabilities, plus the global Pr(r | p) statistics.
//
// Resource starts at 1 on the head entity and is split evenly among the
// successors of every node along each relation of the path; what reaches the
// tail is the path's reliability for that pair.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ptranse/kg_store.hpp"

namespace ptranse {

using PathSignature = std::vector<RelationId>;

struct RelationPath {
    PathSignature relations;
    double reliability = 0.0;

    friend bool operator==(const RelationPath&, const RelationPath&) = default;
};

struct PairPaths {
    std::vector<RelationPath> paths;
    double normalizer = 0.0;  // sum of stored reliabilities
};

// Reliable paths per ordered entity pair. Immutable once mining has finished.
class PathSet {
public:
    // Stores the paths for (head, tail) and sets Z to their total reliability.
    // An empty list leaves the pair absent.
    void insert(EntityId head, EntityId tail, std::vector<RelationPath> paths);

    const PairPaths* find(EntityId head, EntityId tail) const;

    std::size_t num_pairs() const noexcept { return pairs_.size(); }
    std::size_t num_paths() const noexcept;
    bool empty() const noexcept { return pairs_.empty(); }
    // Longest stored path, 0 when empty.
    std::size_t max_length() const noexcept;

    // Pair keys in ascending (head, tail) order.
    std::vector<std::uint64_t> sorted_keys() const;

private:
    std::unordered_map<std::uint64_t, PairPaths> pairs_;
};

// Removes every edge between two entities, in both directions, from traversal.
struct PairExclusion {
    EntityId a;
    EntityId b;

    bool blocks(EntityId from, EntityId to) const noexcept {
        return (from == a && to == b) || (from == b && to == a);
    }
};

struct MiningConfig {
    std::size_t max_len = 3;
    double threshold = 0.01;
    std::size_t threads = 1;
};

inline constexpr std::size_t kMinPathLength = 2;

using ResourceMap = std::map<EntityId, double>;

// Resource reaching every entity at the end of `path` when one unit starts at
// `head`. Entities receiving nothing are omitted.
ResourceMap pcra(const KnowledgeGraph& graph, EntityId head, std::span<const RelationId> path,
                 std::optional<PairExclusion> exclude = std::nullopt);

// All relation sequences of length 2..max_len from head to tail whose
// reliability exceeds `threshold`, in lexicographic order.
std::vector<RelationPath> enumerate_paths(const KnowledgeGraph& graph, EntityId head,
                                          EntityId tail, std::size_t max_len,
                                          double threshold = 0.01,
                                          std::optional<PairExclusion> exclude = std::nullopt);

// enumerate_paths with the direct edges between head and tail removed.
std::vector<RelationPath> mine_pair(const KnowledgeGraph& graph, EntityId head, EntityId tail,
                                    const MiningConfig& config);

// Mines every (head, tail) pair that carries a training triple.
PathSet mine_training_paths(const KnowledgeGraph& graph, const MiningConfig& config);

// Drops paths longer than max_len; equals mining with that bound directly.
PathSet restrict_length(const PathSet& paths, std::size_t max_len);

struct SignatureHash {
    std::size_t operator()(const PathSignature& sig) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (auto r : sig) {
            h ^= static_cast<std::uint32_t>(r);
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

// Pr(r | p): fraction of pairs connected by p that also hold relation r.
class PathRelationStats {
public:
    double confidence(const PathSignature& path, RelationId relation) const;
    // Relations observed with `path`, or nullptr if the path was never seen.
    const std::unordered_map<RelationId, double>* relations_for(const PathSignature& path) const;
    void set(const PathSignature& path, RelationId relation, double confidence);

    std::size_t size() const noexcept;
    std::size_t num_signatures() const noexcept { return table_.size(); }

    // (signature, relation, confidence) in ascending order.
    struct Entry {
        PathSignature path;
        RelationId relation;
        double confidence;
    };
    std::vector<Entry> entries() const;

private:
    std::unordered_map<PathSignature, std::unordered_map<RelationId, double>, SignatureHash>
        table_;
};

PathRelationStats path_relation_confidence(const KnowledgeGraph& graph, const PathSet& paths);

// Plain-text persistence. One pathset line per pair:
//   head tail n  len r_1 .. r_len reliability  ...
// Stats lines: "r_1,...,r_len relation confidence". Reals use 6 significant
// digits.
void write_path_set(const std::filesystem::path& path, const PathSet& paths);
PathSet read_path_set(const std::filesystem::path& path);
void write_path_stats(const std::filesystem::path& path, const PathRelationStats& stats);
PathRelationStats read_path_stats(const std::filesystem::path& path);

}  // namespace ptranse
