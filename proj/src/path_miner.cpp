#include "ptranse/path_miner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace ptranse {

void PathSet::insert(EntityId head, EntityId tail, std::vector<RelationPath> paths) {
    if (paths.empty()) return;
    PairPaths entry;
    for (const auto& p : paths) entry.normalizer += p.reliability;
    entry.paths = std::move(paths);
    pairs_[pair_key(head, tail)] = std::move(entry);
}

const PairPaths* PathSet::find(EntityId head, EntityId tail) const {
    auto it = pairs_.find(pair_key(head, tail));
    return it == pairs_.end() ? nullptr : &it->second;
}

std::size_t PathSet::num_paths() const noexcept {
    std::size_t n = 0;
    for (const auto& [key, entry] : pairs_) n += entry.paths.size();
    return n;
}

std::size_t PathSet::max_length() const noexcept {
    std::size_t n = 0;
    for (const auto& [key, entry] : pairs_)
        for (const auto& p : entry.paths) n = std::max(n, p.relations.size());
    return n;
}

std::vector<std::uint64_t> PathSet::sorted_keys() const {
    std::vector<std::uint64_t> keys;
    keys.reserve(pairs_.size());
    for (const auto& [key, entry] : pairs_) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    return keys;
}

namespace {

bool blocked(const std::optional<PairExclusion>& exclude, EntityId from, EntityId to) {
    return exclude && exclude->blocks(from, to);
}

std::size_t open_degree(std::span<const Edge> edges, EntityId from,
                        const std::optional<PairExclusion>& exclude) {
    std::size_t d = 0;
    for (const auto& e : edges)
        if (!blocked(exclude, from, e.entity)) ++d;
    return d;
}

using Layer = std::vector<std::pair<EntityId, double>>;

// Depth-first walk over relation prefixes carrying the full resource
// distribution of each prefix. Entities that cannot reach the tail within the
// remaining budget are dropped; they cannot contribute to the tail later.
class PairMiner {
public:
    PairMiner(const KnowledgeGraph& graph, EntityId head, EntityId tail, std::size_t max_len,
              double threshold, std::optional<PairExclusion> exclude)
        : graph_(graph),
          head_(head),
          tail_(tail),
          max_len_(max_len),
          threshold_(threshold),
          exclude_(exclude) {}

    std::vector<RelationPath> run() {
        if (max_len_ < kMinPathLength) return {};
        compute_steps_to_tail();
        if (!within_budget(head_, 0)) return {};
        expand(Layer{{head_, 1.0}}, 0);
        return std::move(found_);
    }

private:
    // Minimum number (>= 1) of steps from an entity to the tail, searched
    // backwards up to max_len - 1 hops.
    void compute_steps_to_tail() {
        std::vector<EntityId> frontier{tail_};
        for (std::size_t step = 1; step <= max_len_ && !frontier.empty(); ++step) {
            std::vector<EntityId> next;
            for (EntityId x : frontier) {
                for (const auto& e : graph_.in_edges(x)) {
                    if (blocked(exclude_, e.entity, x)) continue;
                    if (steps_.try_emplace(e.entity, step).second) next.push_back(e.entity);
                }
            }
            frontier = std::move(next);
        }
    }

    bool within_budget(EntityId entity, std::size_t depth) const {
        if (depth >= max_len_) return false;
        auto it = steps_.find(entity);
        return it != steps_.end() && it->second <= max_len_ - depth;
    }

    void visit(Layer layer, std::size_t depth) {
        if (depth >= kMinPathLength) {
            auto it = std::lower_bound(layer.begin(), layer.end(), tail_,
                                       [](const auto& a, EntityId b) { return a.first < b; });
            if (it != layer.end() && it->first == tail_ && it->second > threshold_)
                found_.push_back({prefix_, it->second});
        }
        if (depth >= max_len_) return;
        std::erase_if(layer, [&](const auto& er) { return !within_budget(er.first, depth); });
        double total = 0.0;
        for (const auto& [e, r] : layer) total += r;
        if (layer.empty() || total <= threshold_) return;
        expand(std::move(layer), depth);
    }

    void expand(const Layer& layer, std::size_t depth) {
        const std::size_t next_depth = depth + 1;
        std::map<RelationId, std::map<EntityId, double>> next;
        for (const auto& [node, resource] : layer) {
            auto edges = graph_.out_edges(node);
            for (std::size_t lo = 0; lo < edges.size();) {
                std::size_t hi = lo;
                while (hi < edges.size() && edges[hi].relation == edges[lo].relation) ++hi;
                auto group = edges.subspan(lo, hi - lo);
                const std::size_t degree = open_degree(group, node, exclude_);
                if (degree > 0) {
                    const double share = resource / static_cast<double>(degree);
                    for (const auto& e : group) {
                        if (blocked(exclude_, node, e.entity)) continue;
                        const bool keep = (e.entity == tail_ && next_depth >= kMinPathLength) ||
                                          within_budget(e.entity, next_depth);
                        if (keep) next[group.front().relation][e.entity] += share;
                    }
                }
                lo = hi;
            }
        }
        for (auto& [relation, dist] : next) {
            prefix_.push_back(relation);
            visit(Layer(dist.begin(), dist.end()), next_depth);
            prefix_.pop_back();
        }
    }

    const KnowledgeGraph& graph_;
    EntityId head_;
    EntityId tail_;
    std::size_t max_len_;
    double threshold_;
    std::optional<PairExclusion> exclude_;
    std::unordered_map<EntityId, std::size_t> steps_;
    PathSignature prefix_;
    std::vector<RelationPath> found_;
};

}  // namespace

ResourceMap pcra(const KnowledgeGraph& graph, EntityId head, std::span<const RelationId> path,
                 std::optional<PairExclusion> exclude) {
    ResourceMap layer{{head, 1.0}};
    for (RelationId relation : path) {
        ResourceMap next;
        for (const auto& [node, resource] : layer) {
            auto edges = graph.out_edges(node, relation);
            const std::size_t degree = open_degree(edges, node, exclude);
            if (degree == 0) continue;
            const double share = resource / static_cast<double>(degree);
            for (const auto& e : edges)
                if (!blocked(exclude, node, e.entity)) next[e.entity] += share;
        }
        layer = std::move(next);
        if (layer.empty()) break;
    }
    return layer;
}

std::vector<RelationPath> enumerate_paths(const KnowledgeGraph& graph, EntityId head,
                                          EntityId tail, std::size_t max_len, double threshold,
                                          std::optional<PairExclusion> exclude) {
    return PairMiner(graph, head, tail, max_len, threshold, exclude).run();
}

std::vector<RelationPath> mine_pair(const KnowledgeGraph& graph, EntityId head, EntityId tail,
                                    const MiningConfig& config) {
    return enumerate_paths(graph, head, tail, config.max_len, config.threshold,
                           PairExclusion{head, tail});
}

PathSet mine_training_paths(const KnowledgeGraph& graph, const MiningConfig& config) {
    std::vector<std::uint64_t> keys;
    keys.reserve(graph.train().size());
    for (const auto& t : graph.train()) keys.push_back(pair_key(t.head, t.tail));
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    std::vector<std::vector<RelationPath>> results(keys.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(config.threads, keys.size()));
    auto work = [&](std::size_t worker) {
        for (std::size_t i = worker; i < keys.size(); i += workers)
            results[i] = mine_pair(graph, pair_first(keys[i]), pair_second(keys[i]), config);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    PathSet out;
    for (std::size_t i = 0; i < keys.size(); ++i)
        out.insert(pair_first(keys[i]), pair_second(keys[i]), std::move(results[i]));
    return out;
}

PathSet restrict_length(const PathSet& paths, std::size_t max_len) {
    PathSet out;
    for (auto key : paths.sorted_keys()) {
        const auto* entry = paths.find(pair_first(key), pair_second(key));
        std::vector<RelationPath> kept;
        for (const auto& p : entry->paths)
            if (p.relations.size() <= max_len) kept.push_back(p);
        out.insert(pair_first(key), pair_second(key), std::move(kept));
    }
    return out;
}

double PathRelationStats::confidence(const PathSignature& path, RelationId relation) const {
    auto it = table_.find(path);
    if (it == table_.end()) return 0.0;
    auto jt = it->second.find(relation);
    return jt == it->second.end() ? 0.0 : jt->second;
}

const std::unordered_map<RelationId, double>* PathRelationStats::relations_for(
    const PathSignature& path) const {
    auto it = table_.find(path);
    return it == table_.end() ? nullptr : &it->second;
}

void PathRelationStats::set(const PathSignature& path, RelationId relation, double confidence) {
    table_[path][relation] = confidence;
}

std::size_t PathRelationStats::size() const noexcept {
    std::size_t n = 0;
    for (const auto& [sig, rels] : table_) n += rels.size();
    return n;
}

std::vector<PathRelationStats::Entry> PathRelationStats::entries() const {
    std::vector<Entry> out;
    out.reserve(size());
    for (const auto& [sig, rels] : table_)
        for (const auto& [r, c] : rels) out.push_back({sig, r, c});
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
        return a.path != b.path ? a.path < b.path : a.relation < b.relation;
    });
    return out;
}

PathRelationStats path_relation_confidence(const KnowledgeGraph& graph, const PathSet& paths) {
    std::unordered_map<PathSignature, std::size_t, SignatureHash> pairs_with_path;
    std::unordered_map<PathSignature, std::map<RelationId, std::size_t>, SignatureHash> joint;
    for (auto key : paths.sorted_keys()) {
        const EntityId h = pair_first(key);
        const EntityId t = pair_second(key);
        const auto direct = graph.relations_between(h, t);
        for (const auto& p : paths.find(h, t)->paths) {
            ++pairs_with_path[p.relations];
            auto& counts = joint[p.relations];
            for (RelationId r : direct) ++counts[r];
        }
    }
    PathRelationStats stats;
    for (const auto& [sig, counts] : joint) {
        const double denom = static_cast<double>(pairs_with_path[sig]);
        for (const auto& [r, n] : counts) stats.set(sig, r, static_cast<double>(n) / denom);
    }
    return stats;
}

namespace {

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

void write_path_set(const std::filesystem::path& path, const PathSet& paths) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write path set: " + path.string());
    for (auto key : paths.sorted_keys()) {
        const EntityId h = pair_first(key);
        const EntityId t = pair_second(key);
        const auto* entry = paths.find(h, t);
        out << h << ' ' << t << ' ' << entry->paths.size();
        for (const auto& p : entry->paths) {
            out << ' ' << p.relations.size();
            for (auto r : p.relations) out << ' ' << r;
            out << ' ' << format_real(p.reliability);
        }
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

PathSet read_path_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open path set: " + path.string());
    PathSet out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        EntityId h = 0, t = 0;
        std::size_t n = 0;
        if (!(fields >> h >> t >> n)) throw ParseError(path.string(), line_no, "bad pair header");
        std::vector<RelationPath> paths(n);
        for (auto& p : paths) {
            std::size_t len = 0;
            if (!(fields >> len) || len == 0)
                throw ParseError(path.string(), line_no, "bad path length");
            p.relations.resize(len);
            for (auto& r : p.relations)
                if (!(fields >> r)) throw ParseError(path.string(), line_no, "bad relation id");
            if (!(fields >> p.reliability) || !(p.reliability > 0.0 && p.reliability <= 1.0))
                throw ParseError(path.string(), line_no, "bad reliability");
        }
        std::string extra;
        if (fields >> extra) throw ParseError(path.string(), line_no, "trailing fields");
        if (out.find(h, t)) throw ParseError(path.string(), line_no, "duplicate pair");
        out.insert(h, t, std::move(paths));
    }
    return out;
}

void write_path_stats(const std::filesystem::path& path, const PathRelationStats& stats) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write path stats: " + path.string());
    for (const auto& e : stats.entries()) {
        for (std::size_t i = 0; i < e.path.size(); ++i) out << (i ? "," : "") << e.path[i];
        out << ' ' << e.relation << ' ' << format_real(e.confidence) << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

PathRelationStats read_path_stats(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open path stats: " + path.string());
    PathRelationStats stats;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string sig_text;
        RelationId relation = 0;
        double confidence = 0.0;
        if (!(fields >> sig_text >> relation >> confidence))
            throw ParseError(path.string(), line_no, "expected: signature relation confidence");
        PathSignature sig;
        std::istringstream parts(sig_text);
        std::string part;
        while (std::getline(parts, part, ',')) {
            try {
                sig.push_back(static_cast<RelationId>(std::stol(part)));
            } catch (const std::exception&) {
                throw ParseError(path.string(), line_no, "bad signature");
            }
        }
        if (sig.empty()) throw ParseError(path.string(), line_no, "empty signature");
        stats.set(sig, relation, confidence);
    }
    return stats;
}

}  // namespace ptranse
