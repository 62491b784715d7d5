#include "ptranse/kg_store.hpp"

#include <algorithm>
#include <fstream>

namespace ptranse {

std::string_view to_string(Slot slot) {
    switch (slot) {
        case Slot::head: return "head";
        case Slot::relation: return "relation";
        case Slot::tail: return "tail";
    }
    return "?";
}

std::string_view to_string(RelationCategory category) {
    switch (category) {
        case RelationCategory::one_to_one: return "1-to-1";
        case RelationCategory::one_to_many: return "1-to-N";
        case RelationCategory::many_to_one: return "N-to-1";
        case RelationCategory::many_to_many: return "N-to-N";
    }
    return "?";
}

std::int32_t Vocabulary::get_or_add(std::string_view name) {
    auto [it, inserted] =
        ids_.try_emplace(std::string(name), static_cast<std::int32_t>(names_.size()));
    if (inserted) names_.emplace_back(name);
    return it->second;
}

std::optional<std::int32_t> Vocabulary::find(std::string_view name) const {
    auto it = ids_.find(std::string(name));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

const std::string& Vocabulary::name(std::int32_t id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= names_.size())
        throw Error("vocabulary id out of range: " + std::to_string(id));
    return names_[static_cast<std::size_t>(id)];
}

std::vector<Triple> load_triples(const std::filesystem::path& path, Vocabulary& entities,
                                 Vocabulary& relations) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open triple file: " + path.string());

    std::vector<Triple> triples;
    std::unordered_set<Triple, TripleHash> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::array<std::string_view, 3> fields;
        std::size_t count = 0;
        std::string_view rest = line;
        while (true) {
            auto tab = rest.find('\t');
            if (count == fields.size())
                throw ParseError(path.string(), line_no, "expected 3 tab-separated fields");
            fields[count++] = rest.substr(0, tab);
            if (tab == std::string_view::npos) break;
            rest.remove_prefix(tab + 1);
        }
        if (count != 3)
            throw ParseError(path.string(), line_no, "expected 3 tab-separated fields, got " +
                                                          std::to_string(count));
        for (auto f : fields)
            if (f.empty()) throw ParseError(path.string(), line_no, "empty field");

        Triple t;
        t.head = entities.get_or_add(fields[0]);
        t.relation = relations.get_or_add(fields[1]);
        t.tail = entities.get_or_add(fields[2]);
        if (seen.insert(t).second) triples.push_back(t);
    }
    return triples;
}

void write_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write vocabulary: " + path.string());
    for (std::size_t i = 0; i < vocab.size(); ++i) out << vocab.names()[i] << '\t' << i << '\n';
}

KnowledgeGraph::KnowledgeGraph(Vocabulary entities, Vocabulary relations,
                               std::vector<Triple> train, std::vector<Triple> valid,
                               std::vector<Triple> test)
    : entities_(std::move(entities)),
      relations_(std::move(relations)),
      original_relations_(relations_.size()),
      valid_(std::move(valid)),
      test_(std::move(test)) {
    train_.reserve(train.size());
    std::unordered_set<Triple, TripleHash> seen;
    for (const auto& t : train)
        if (seen.insert(t).second) train_.push_back(t);

    check_ids(train_, "train");
    check_ids(valid_, "valid");
    check_ids(test_, "test");
    for (const auto& t : valid_) held_out_set_.insert(t);
    for (const auto& t : test_) held_out_set_.insert(t);
    rebuild_indexes();
}

KnowledgeGraph KnowledgeGraph::load(const std::filesystem::path& train,
                                    const std::filesystem::path& valid,
                                    const std::filesystem::path& test) {
    Vocabulary entities;
    Vocabulary relations;
    auto read = [&](const std::filesystem::path& p) {
        return p.empty() ? std::vector<Triple>{} : load_triples(p, entities, relations);
    };
    auto tr = read(train);
    auto va = read(valid);
    auto te = read(test);
    return KnowledgeGraph(std::move(entities), std::move(relations), std::move(tr),
                          std::move(va), std::move(te));
}

void KnowledgeGraph::check_ids(std::span<const Triple> triples, const char* split) const {
    const auto ne = static_cast<EntityId>(entities_.size());
    const auto nr = static_cast<RelationId>(relations_.size());
    for (const auto& t : triples) {
        if (t.head < 0 || t.head >= ne || t.tail < 0 || t.tail >= ne || t.relation < 0 ||
            t.relation >= nr)
            throw Error(std::string("triple id out of vocabulary range in ") + split);
    }
}

void KnowledgeGraph::augment_reverse() {
    if (augmented_) throw Error("graph already contains reverse relations");
    const auto nr = static_cast<RelationId>(original_relations_);
    for (RelationId r = 0; r < nr; ++r) {
        auto name = relations_.name(r) + "^-1";
        if (relations_.find(name)) throw Error("reverse relation name collides: " + name);
        relations_.get_or_add(name);
    }
    const std::size_t n = train_.size();
    train_.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const Triple t = train_[i];
        train_.push_back({t.tail, t.relation + nr, t.head});
    }
    augmented_ = true;
    rebuild_indexes();
}

RelationId KnowledgeGraph::reverse(RelationId relation) const {
    if (!augmented_) throw Error("reverse() requires an augmented graph");
    const auto nr = static_cast<RelationId>(original_relations_);
    if (relation < 0 || relation >= 2 * nr)
        throw Error("relation id out of range: " + std::to_string(relation));
    return relation < nr ? relation + nr : relation - nr;
}

namespace {

// Compressed adjacency keyed by `from`, each block sorted by (relation, entity).
template <typename From, typename To>
void build_csr(std::span<const Triple> triples, std::size_t n, From from, To to,
               std::vector<std::size_t>& offsets, std::vector<Edge>& edges) {
    offsets.assign(n + 1, 0);
    for (const auto& t : triples) ++offsets[static_cast<std::size_t>(from(t)) + 1];
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    edges.assign(triples.size(), Edge{});
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& t : triples)
        edges[cursor[static_cast<std::size_t>(from(t))]++] = Edge{t.relation, to(t)};
    for (std::size_t i = 0; i < n; ++i)
        std::sort(edges.begin() + static_cast<std::ptrdiff_t>(offsets[i]),
                  edges.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]));
}

}  // namespace

void KnowledgeGraph::rebuild_indexes() {
    const std::size_t ne = entities_.size();
    auto head = [](const Triple& t) { return t.head; };
    auto tail = [](const Triple& t) { return t.tail; };
    build_csr(train_, ne, head, tail, edge_offsets_, edges_);
    build_csr(train_, ne, tail, head, in_offsets_, in_edges_);

    pair_index_.clear();
    train_set_.clear();
    train_set_.reserve(train_.size());
    for (const auto& t : train_) {
        pair_index_[pair_key(t.head, t.tail)].push_back(t.relation);
        train_set_.insert(t);
    }
    for (auto& [key, rels] : pair_index_) std::sort(rels.begin(), rels.end());
}

std::span<const Edge> KnowledgeGraph::out_edges(EntityId entity) const {
    if (entity < 0 || static_cast<std::size_t>(entity) >= entities_.size()) return {};
    const auto e = static_cast<std::size_t>(entity);
    return std::span<const Edge>(edges_).subspan(edge_offsets_[e],
                                                 edge_offsets_[e + 1] - edge_offsets_[e]);
}

std::span<const Edge> KnowledgeGraph::out_edges(EntityId entity, RelationId relation) const {
    auto all = out_edges(entity);
    auto lo = std::lower_bound(all.begin(), all.end(), relation,
                               [](const Edge& e, RelationId r) { return e.relation < r; });
    auto hi = std::upper_bound(lo, all.end(), relation,
                               [](RelationId r, const Edge& e) { return r < e.relation; });
    return {lo, hi};
}

std::vector<EntityId> KnowledgeGraph::successors(EntityId entity, RelationId relation) const {
    std::vector<EntityId> out;
    for (const auto& e : out_edges(entity, relation)) out.push_back(e.entity);
    return out;
}

std::span<const Edge> KnowledgeGraph::in_edges(EntityId entity) const {
    if (entity < 0 || static_cast<std::size_t>(entity) >= entities_.size()) return {};
    const auto e = static_cast<std::size_t>(entity);
    return std::span<const Edge>(in_edges_).subspan(in_offsets_[e],
                                                    in_offsets_[e + 1] - in_offsets_[e]);
}

std::span<const RelationId> KnowledgeGraph::relations_between(EntityId head,
                                                              EntityId tail) const {
    auto it = pair_index_.find(pair_key(head, tail));
    if (it == pair_index_.end()) return {};
    return it->second;
}

KnowledgeGraph augment_reverse(KnowledgeGraph graph) {
    graph.augment_reverse();
    return graph;
}

std::vector<EntityId> successors(const KnowledgeGraph& graph, EntityId entity,
                                 RelationId relation) {
    return graph.successors(entity, relation);
}

namespace {

struct FanOut {
    std::size_t triples = 0;
    std::unordered_set<EntityId> heads;
    std::unordered_set<EntityId> tails;
};

RelationCategory categorize(const FanOut& f) {
    const double tails_per_head = static_cast<double>(f.triples) / f.heads.size();
    const double heads_per_tail = static_cast<double>(f.triples) / f.tails.size();
    const bool many_tails = tails_per_head >= kCategoryThreshold;
    const bool many_heads = heads_per_tail >= kCategoryThreshold;
    if (!many_tails && !many_heads) return RelationCategory::one_to_one;
    if (many_tails && !many_heads) return RelationCategory::one_to_many;
    if (!many_tails && many_heads) return RelationCategory::many_to_one;
    return RelationCategory::many_to_many;
}

}  // namespace

RelationCategory classify_relation(const KnowledgeGraph& graph, RelationId relation) {
    if (relation < 0 || static_cast<std::size_t>(relation) >= graph.num_original_relations())
        throw Error("classify_relation expects an original relation id");
    FanOut f;
    for (const auto& t : graph.train()) {
        if (t.relation != relation) continue;
        ++f.triples;
        f.heads.insert(t.head);
        f.tails.insert(t.tail);
    }
    if (f.triples == 0)
        throw Error("relation has no training triples: " + std::to_string(relation));
    return categorize(f);
}

std::vector<std::optional<RelationCategory>> classify_relations(const KnowledgeGraph& graph) {
    const std::size_t nr = graph.num_original_relations();
    std::vector<FanOut> stats(nr);
    for (const auto& t : graph.train()) {
        if (static_cast<std::size_t>(t.relation) >= nr) continue;
        auto& f = stats[static_cast<std::size_t>(t.relation)];
        ++f.triples;
        f.heads.insert(t.head);
        f.tails.insert(t.tail);
    }
    std::vector<std::optional<RelationCategory>> out(nr);
    for (std::size_t r = 0; r < nr; ++r)
        if (stats[r].triples > 0) out[r] = categorize(stats[r]);
    return out;
}

}  // namespace ptranse
