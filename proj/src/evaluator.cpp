#include "ptranse/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

namespace ptranse {

std::string_view to_string(Task task) { return task == Task::entity ? "entity" : "relation"; }

Task parse_task(std::string_view text) {
    if (text == "entity") return Task::entity;
    if (text == "relation") return Task::relation;
    throw Error("unknown task: " + std::string(text));
}

namespace {

struct Candidate {
    double score;
    EntityId id;
    bool is_true;
};

// Ascending score; the true answer goes last among ties.
bool ranks_before(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.is_true != b.is_true) return b.is_true;
    return a.id < b.id;
}

Triple with_entity(Triple t, Slot slot, EntityId e) {
    (slot == Slot::head ? t.head : t.tail) = e;
    return t;
}

}  // namespace

RankPair rank_entities(const Scorer& scorer, const KnowledgeGraph& graph, const Triple& triple,
                       Slot slot, std::size_t rerank, const Scorer* stage1) {
    if (slot == Slot::relation) throw Error("rank_entities expects a head or tail slot");
    const auto n = static_cast<EntityId>(graph.num_entities());
    const EntityId truth = slot == Slot::head ? triple.head : triple.tail;
    if (truth < 0 || truth >= n) throw Error("true entity is not in the vocabulary");
    const Scorer& first = stage1 ? *stage1 : scorer;

    std::vector<Candidate> all;
    all.reserve(static_cast<std::size_t>(n));
    for (EntityId e = 0; e < n; ++e)
        all.push_back({first.stage1(with_entity(triple, slot, e)), e, e == truth});

    const std::size_t k = std::min(rerank, all.size());
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                     ranks_before);
    auto top_end = all.begin() + static_cast<std::ptrdiff_t>(k);
    for (auto it = all.begin(); it != top_end; ++it)
        it->score = scorer.full(with_entity(triple, slot, it->id));
    std::sort(all.begin(), top_end, ranks_before);

    auto is_filtered = [&](EntityId e) { return graph.is_known(with_entity(triple, slot, e)); };

    RankPair out;
    std::size_t position = 0, unfiltered = 0;
    for (auto it = all.begin(); it != top_end; ++it) {
        ++position;
        if (it->is_true) {
            out.raw = position;
            out.filter = unfiltered + 1;
            return out;
        }
        if (!is_filtered(it->id)) ++unfiltered;
    }
    // True entity outside the re-ranked block: count stage-1 competitors
    // ahead of it among the remainder.
    auto truth_it = std::find_if(top_end, all.end(), [](const Candidate& c) { return c.is_true; });
    for (auto it = top_end; it != all.end(); ++it) {
        if (it == truth_it || !ranks_before(*it, *truth_it)) continue;
        ++position;
        if (!is_filtered(it->id)) ++unfiltered;
    }
    out.raw = position + 1;
    out.filter = unfiltered + 1;
    return out;
}

RankPair rank_relations(const Scorer& scorer, const KnowledgeGraph& graph, const Triple& triple,
                        bool include_reverse) {
    const std::size_t count =
        include_reverse ? graph.num_relations() : graph.num_original_relations();
    if (triple.relation < 0 || static_cast<std::size_t>(triple.relation) >= count)
        throw Error("true relation is outside the candidate set");
    const auto scores = scorer.relation_scores(triple.head, triple.tail, count);
    const double s_true = scores[static_cast<std::size_t>(triple.relation)];
    RankPair out{1, 1};
    for (std::size_t r = 0; r < count; ++r) {
        const auto rel = static_cast<RelationId>(r);
        if (rel == triple.relation || scores[r] > s_true) continue;
        ++out.raw;
        if (!graph.is_known({triple.head, rel, triple.tail})) ++out.filter;
    }
    return out;
}

void summarize(RankingReport& report, const KnowledgeGraph& graph) {
    const std::size_t n = report.ranks.size();
    report.mean_rank_raw = report.mean_rank_filter = report.hits_raw = report.hits_filter = 0.0;
    report.categories = {};
    report.uncategorized = 0;
    if (n == 0) return;

    std::vector<std::optional<RelationCategory>> categories;
    if (report.task == Task::entity) categories = classify_relations(graph);

    double raw_sum = 0.0, filter_sum = 0.0;
    std::size_t raw_hits = 0, filter_hits = 0;
    for (const auto& q : report.ranks) {
        raw_sum += static_cast<double>(q.raw);
        filter_sum += static_cast<double>(q.filter);
        if (q.raw <= report.hits_n) ++raw_hits;
        const bool hit = q.filter <= report.hits_n;
        if (hit) ++filter_hits;
        if (report.task != Task::entity) continue;
        const auto r = static_cast<std::size_t>(q.triple.relation);
        if (r >= categories.size() || !categories[r]) {
            ++report.uncategorized;
            continue;
        }
        auto& cell = report.categories[static_cast<std::size_t>(*categories[r])]
                                      [q.slot == Slot::head ? 0 : 1];
        ++cell.queries;
        if (hit) ++cell.hits;
    }
    report.mean_rank_raw = raw_sum / n;
    report.mean_rank_filter = filter_sum / n;
    report.hits_raw = 100.0 * raw_hits / n;
    report.hits_filter = 100.0 * filter_hits / n;
}

RankingReport evaluate(const Scorer& scorer, const KnowledgeGraph& graph, Task task,
                       std::span<const Triple> split, const EvalConfig& config,
                       const Scorer* stage1) {
    if (split.empty()) throw Error("evaluation split is empty");
    RankingReport report;
    report.task = task;
    report.mode = scorer.mode();
    report.hits_n = config.hits_n ? config.hits_n : (task == Task::entity ? 10 : 1);

    const std::size_t per_triple = task == Task::entity ? 2 : 1;
    report.ranks.resize(split.size() * per_triple);
    auto run_query = [&](std::size_t i) {
        const Triple& t = split[i];
        if (task == Task::entity) {
            auto h = rank_entities(scorer, graph, t, Slot::head, config.rerank, stage1);
            auto tl = rank_entities(scorer, graph, t, Slot::tail, config.rerank, stage1);
            report.ranks[2 * i] = {t, Slot::head, h.raw, h.filter};
            report.ranks[2 * i + 1] = {t, Slot::tail, tl.raw, tl.filter};
        } else {
            auto r = rank_relations(scorer, graph, t, config.include_reverse_relations);
            report.ranks[i] = {t, Slot::relation, r.raw, r.filter};
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(config.threads, split.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < split.size(); ++i) run_query(i);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t i = w; i < split.size(); i += workers) run_query(i);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    summarize(report, graph);
    return report;
}

std::string format_report(const RankingReport& report) {
    std::ostringstream out;
    char buf[160];
    out << "task: " << to_string(report.task) << "\n";
    out << "mode: " << to_string(report.mode) << "\n";
    out << "queries: " << report.ranks.size() << "\n\n";
    std::snprintf(buf, sizeof buf, "%-14s %10s %10s\n", "metric", "raw", "filter");
    out << buf;
    std::snprintf(buf, sizeof buf, "%-14s %10.2f %10.2f\n", "mean rank", report.mean_rank_raw,
                  report.mean_rank_filter);
    out << buf;
    const std::string hits = "hits@" + std::to_string(report.hits_n) + " (%)";
    std::snprintf(buf, sizeof buf, "%-14s %10.2f %10.2f\n", hits.c_str(), report.hits_raw,
                  report.hits_filter);
    out << buf;

    if (report.task == Task::entity) {
        out << "\nfilter hits@" << report.hits_n << " (%) by relation category\n";
        std::snprintf(buf, sizeof buf, "%-16s %8s %8s %8s %8s\n", "predicting", "1-to-1",
                      "1-to-N", "N-to-1", "N-to-N");
        out << buf;
        for (int side = 0; side < 2; ++side) {
            std::snprintf(buf, sizeof buf, "%-16s", side == 0 ? "head" : "tail");
            out << buf;
            for (std::size_t c = 0; c < 4; ++c) {
                std::snprintf(buf, sizeof buf, " %8.1f",
                              report.categories[c][static_cast<std::size_t>(side)].percent());
                out << buf;
            }
            out << '\n';
        }
        if (report.uncategorized)
            out << "uncategorized queries: " << report.uncategorized << '\n';
    }
    return out.str();
}

void write_report(const std::filesystem::path& path, const RankingReport& report) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write report: " + path.string());
    out << format_report(report);
}

void write_rank_dump(const std::filesystem::path& path, const RankingReport& report) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write rank dump: " + path.string());
    for (const auto& q : report.ranks)
        out << q.triple.head << '\t' << q.triple.relation << '\t' << q.triple.tail << '\t'
            << to_string(q.slot) << '\t' << q.raw << '\t' << q.filter << '\n';
}

}  // namespace ptranse
