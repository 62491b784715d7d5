#include "ptranse/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <string>
#include <thread>

namespace ptranse {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
    if (!(margin > 0.0)) throw Error("margin must be positive");
    if (dim == 0) throw Error("dimension must be positive");
    if (threads == 0) throw Error("thread count must be positive");
    if (checkpoint_every == 0) throw Error("checkpoint interval must be positive");
}

NegativeSample sample_negative(const KnowledgeGraph& graph, const Triple& triple, Slot slot,
                               std::mt19937_64& rng, std::size_t relation_count) {
    const std::size_t pool =
        slot == Slot::relation ? (relation_count ? relation_count : graph.num_relations())
                               : graph.num_entities();
    if (pool == 0) throw Error("cannot corrupt a triple in an empty vocabulary");
    std::uniform_int_distribution<std::int32_t> pick(0, static_cast<std::int32_t>(pool) - 1);
    for (std::size_t attempt = 0; attempt <= kMaxNegativeRejections; ++attempt) {
        Triple c = triple;
        switch (slot) {
            case Slot::head: c.head = pick(rng); break;
            case Slot::relation: c.relation = pick(rng); break;
            case Slot::tail: c.tail = pick(rng); break;
        }
        if (!graph.in_train(c)) return {c, slot};
    }
    throw Error("negative sampling saturated: every " + std::string(to_string(slot)) +
                " replacement tried is a training triple");
}

void GradientSet::accumulate(ParamKind kind, std::int32_t row, std::span<const double> grad,
                             double scale) {
    for (auto& r : rows) {
        if (r.kind == kind && r.row == row) {
            for (std::size_t j = 0; j < grad.size(); ++j) r.grad[j] += scale * grad[j];
            return;
        }
    }
    RowGradient r{kind, row, std::vector<double>(grad.size())};
    for (std::size_t j = 0; j < grad.size(); ++j) r.grad[j] = scale * grad[j];
    rows.push_back(std::move(r));
}

const RowGradient* GradientSet::find(ParamKind kind, std::int32_t row) const {
    for (const auto& r : rows)
        if (r.kind == kind && r.row == row) return &r;
    return nullptr;
}

namespace {

// d||x|| / dx with the subgradient 0 at kinks.
std::vector<double> norm_gradient(Dissimilarity norm, std::span<const double> x) {
    std::vector<double> g(x.size(), 0.0);
    if (norm == Dissimilarity::l1) {
        for (std::size_t j = 0; j < x.size(); ++j) g[j] = x[j] > 0.0 ? 1.0 : (x[j] < 0.0 ? -1.0 : 0.0);
        return g;
    }
    const double len = dissimilarity(Dissimilarity::l2, x);
    if (len == 0.0) return g;
    for (std::size_t j = 0; j < x.size(); ++j) g[j] = x[j] / len;
    return g;
}

std::vector<double> translation_residual(const EmbeddingStore& store, const Triple& t) {
    auto h = store.entity(t.head);
    auto r = store.relation(t.relation);
    auto tl = store.entity(t.tail);
    std::vector<double> d(h.size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = h[j] + r[j] - tl[j];
    return d;
}

}  // namespace

LossResult loss_direct(const EmbeddingStore& store, const Triple& positive,
                       const NegativeSample& negative, double margin) {
    const auto dp = translation_residual(store, positive);
    const auto dn = translation_residual(store, negative.corrupted);
    const double value =
        margin + dissimilarity(store.norm, dp) - dissimilarity(store.norm, dn);
    LossResult out;
    if (value <= 0.0) return out;
    out.loss = value;

    const auto gp = norm_gradient(store.norm, dp);
    const auto gn = norm_gradient(store.norm, dn);
    const auto& n = negative.corrupted;
    auto& g = out.gradients;
    g.accumulate(ParamKind::entity, positive.head, gp, 1.0);
    g.accumulate(ParamKind::relation, positive.relation, gp, 1.0);
    g.accumulate(ParamKind::entity, positive.tail, gp, -1.0);
    g.accumulate(ParamKind::entity, n.head, gn, -1.0);
    g.accumulate(ParamKind::relation, n.relation, gn, -1.0);
    g.accumulate(ParamKind::entity, n.tail, gn, 1.0);
    return out;
}

LossResult loss_path(const EmbeddingStore& store, const CompositionOp& op,
                     std::span<const RelationId> path, RelationId relation,
                     RelationId negative_relation, double margin, double weight) {
    std::vector<VectorView> rows;
    rows.reserve(path.size());
    for (RelationId r : path) rows.push_back(store.relation(r));
    const auto p = compose(op, rows);

    auto r_pos = store.relation(relation);
    auto r_neg = store.relation(negative_relation);
    std::vector<double> dp(p.size()), dn(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        dp[j] = p[j] - r_pos[j];
        dn[j] = p[j] - r_neg[j];
    }
    const double value =
        margin + dissimilarity(store.norm, dp) - dissimilarity(store.norm, dn);
    LossResult out;
    if (value <= 0.0) return out;
    out.loss = weight * value;

    const auto gp = norm_gradient(store.norm, dp);
    const auto gn = norm_gradient(store.norm, dn);
    std::vector<double> upstream(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) upstream[j] = weight * (gp[j] - gn[j]);

    auto& g = out.gradients;
    g.accumulate(ParamKind::relation, relation, gp, -weight);
    g.accumulate(ParamKind::relation, negative_relation, gn, weight);
    auto composed = compose_gradient(op, rows, upstream);
    for (std::size_t i = 0; i < path.size(); ++i)
        g.accumulate(ParamKind::relation, path[i], composed.relations[i]);
    g.weight = std::move(composed.weight);
    return out;
}

void apply_gradients(EmbeddingStore& store, CompositionOp& op, const GradientSet& gradients,
                     double learning_rate) {
    for (const auto& rg : gradients.rows) {
        auto row = rg.kind == ParamKind::entity ? store.entity(rg.row) : store.relation(rg.row);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] -= learning_rate * rg.grad[j];
    }
    for (const auto& rg : gradients.rows)
        project_row(rg.kind == ParamKind::entity ? store.entity(rg.row) : store.relation(rg.row));
    if (gradients.weight) {
        auto w = op.weight().data();
        auto dw = gradients.weight->data();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= learning_rate * dw[i];
    }
}

std::vector<Triple> training_pool(const KnowledgeGraph& graph, const TrainConfig& config) {
    std::vector<Triple> pool;
    pool.reserve(graph.train().size());
    const auto nr = static_cast<RelationId>(graph.num_original_relations());
    for (const auto& t : graph.train())
        if (config.use_reverse || t.relation < nr) pool.push_back(t);
    return pool;
}

Model initial_model(const KnowledgeGraph& graph, const TrainConfig& config) {
    Model m;
    m.embeddings = init_embeddings(graph.num_entities(), graph.num_relations(), config.dim,
                                   config.seed, config.norm);
    m.composition = CompositionOp::make(config.compose, config.dim,
                                        config.seed ^ 0x5DEECE66DULL, config.activation);
    return m;
}

namespace {

std::size_t negative_relation_pool(const KnowledgeGraph& graph, const TrainConfig& config) {
    return config.use_reverse ? graph.num_relations() : graph.num_original_relations();
}

constexpr Slot kSlots[] = {Slot::head, Slot::relation, Slot::tail};

// One SGD step in deterministic mode: losses are evaluated and applied in
// sequence on the shared model.
double direct_step(Model& model, const KnowledgeGraph& graph, const PathSet& paths,
                   const TrainConfig& config, const Triple& triple, std::mt19937_64& rng) {
    const std::size_t rel_pool = negative_relation_pool(graph, config);
    double total = 0.0;
    for (Slot slot : kSlots) {
        auto neg = sample_negative(graph, triple, slot, rng, rel_pool);
        auto res = loss_direct(model.embeddings, triple, neg, config.margin);
        total += res.loss;
        if (!res.gradients.empty())
            apply_gradients(model.embeddings, model.composition, res.gradients,
                            config.learning_rate);
    }
    if (!config.use_paths) return total;
    const auto* entry = paths.find(triple.head, triple.tail);
    if (!entry || entry->normalizer <= 0.0) return total;
    for (const auto& p : entry->paths) {
        const double weight = p.reliability / entry->normalizer;
        auto neg = sample_negative(graph, triple, Slot::relation, rng, rel_pool);
        auto res = loss_path(model.embeddings, model.composition, p.relations, triple.relation,
                             neg.corrupted.relation, config.margin, weight);
        total += res.loss;
        if (!res.gradients.empty())
            apply_gradients(model.embeddings, model.composition, res.gradients,
                            config.learning_rate);
    }
    return total;
}

// Throughput mode: each loss is evaluated on a private copy of the rows it
// reads, and the update is written back with relaxed atomics. Concurrent
// writers may overwrite each other's updates; no lock is taken.
class SharedStepper {
public:
    SharedStepper(Model& shared, const KnowledgeGraph& graph, const PathSet& paths,
                  const TrainConfig& config)
        : shared_(shared), graph_(graph), paths_(paths), config_(config) {}

    double step(const Triple& triple, std::mt19937_64& rng) {
        const std::size_t rel_pool = negative_relation_pool(graph_, config_);
        double total = 0.0;
        for (Slot slot : kSlots) {
            auto neg = sample_negative(graph_, triple, slot, rng, rel_pool);
            Frame f(shared_, config_.dim, false);
            const Triple lp = f.map(triple);
            const NegativeSample ln{f.map(neg.corrupted), slot};
            f.gather();
            auto res = loss_direct(f.local.embeddings, lp, ln, config_.margin);
            total += res.loss;
            if (!res.gradients.empty()) f.scatter(res.gradients, config_.learning_rate);
        }
        if (!config_.use_paths) return total;
        const auto* entry = paths_.find(triple.head, triple.tail);
        if (!entry || entry->normalizer <= 0.0) return total;
        for (const auto& p : entry->paths) {
            const double weight = p.reliability / entry->normalizer;
            auto neg = sample_negative(graph_, triple, Slot::relation, rng, rel_pool);
            Frame f(shared_, config_.dim, shared_.composition.has_weight());
            std::vector<RelationId> local_path;
            for (RelationId r : p.relations) local_path.push_back(f.relation(r));
            const RelationId lr = f.relation(triple.relation);
            const RelationId ln = f.relation(neg.corrupted.relation);
            f.gather();
            auto res = loss_path(f.local.embeddings, f.local.composition, local_path, lr, ln,
                                 config_.margin, weight);
            total += res.loss;
            if (!res.gradients.empty()) f.scatter(res.gradients, config_.learning_rate);
        }
        return total;
    }

private:
    static double load(double& x) { return std::atomic_ref<double>(x).load(std::memory_order_relaxed); }
    static void store(double& x, double v) {
        std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
    }

    struct Frame {
        Frame(Model& shared, std::size_t dim, bool with_weight) : shared(shared), dim(dim) {
            local.embeddings.norm = shared.embeddings.norm;
            if (with_weight) {
                DenseMatrix w(dim, 2 * dim);
                auto src = shared.composition.weight().data();
                auto dst = w.data();
                for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = load(src[i]);
                local.composition =
                    CompositionOp::rnn(std::move(w), shared.composition.activation());
            } else {
                local.composition = shared.composition.kind() == CompositionKind::mul
                                        ? CompositionOp::mul()
                                        : CompositionOp::add();
            }
        }

        std::int32_t intern(std::vector<std::int32_t>& ids, std::int32_t id) {
            for (std::size_t i = 0; i < ids.size(); ++i)
                if (ids[i] == id) return static_cast<std::int32_t>(i);
            ids.push_back(id);
            return static_cast<std::int32_t>(ids.size() - 1);
        }

        EntityId entity(EntityId e) { return intern(entity_ids, e); }
        RelationId relation(RelationId r) { return intern(relation_ids, r); }

        Triple map(const Triple& t) {
            return {entity(t.head), relation(t.relation), entity(t.tail)};
        }

        // Copies the referenced rows; must run after all ids are interned.
        void gather() {
            local.embeddings.entities = DenseMatrix(entity_ids.size(), dim);
            local.embeddings.relations = DenseMatrix(relation_ids.size(), dim);
            for (std::size_t i = 0; i < entity_ids.size(); ++i) {
                auto src = shared.embeddings.entity(entity_ids[i]);
                auto dst = local.embeddings.entities.row(i);
                for (std::size_t j = 0; j < dim; ++j) dst[j] = load(src[j]);
            }
            for (std::size_t i = 0; i < relation_ids.size(); ++i) {
                auto src = shared.embeddings.relation(relation_ids[i]);
                auto dst = local.embeddings.relations.row(i);
                for (std::size_t j = 0; j < dim; ++j) dst[j] = load(src[j]);
            }
        }

        void scatter(const GradientSet& g, double rate) {
            for (const auto& rg : g.rows) {
                auto row = rg.kind == ParamKind::entity
                               ? shared.embeddings.entity(entity_ids[static_cast<std::size_t>(rg.row)])
                               : shared.embeddings.relation(
                                     relation_ids[static_cast<std::size_t>(rg.row)]);
                double sq = 0.0;
                for (std::size_t j = 0; j < dim; ++j) {
                    const double v = load(row[j]) - rate * rg.grad[j];
                    store(row[j], v);
                    sq += v * v;
                }
                if (sq > 1.0) {
                    const double scale = 1.0 / std::sqrt(sq);
                    for (std::size_t j = 0; j < dim; ++j) store(row[j], load(row[j]) * scale);
                }
            }
            if (g.weight) {
                auto w = shared.composition.weight().data();
                auto dw = g.weight->data();
                for (std::size_t i = 0; i < w.size(); ++i) store(w[i], load(w[i]) - rate * dw[i]);
            }
        }

        Model& shared;
        std::size_t dim;
        Model local;
        std::vector<std::int32_t> entity_ids;
        std::vector<std::int32_t> relation_ids;
    };

    Model& shared_;
    const KnowledgeGraph& graph_;
    const PathSet& paths_;
    const TrainConfig& config_;
};

void check_finite(const Model& model, std::size_t epoch) {
    auto bad = [](std::span<const double> xs) {
        return std::any_of(xs.begin(), xs.end(), [](double v) { return !std::isfinite(v); });
    };
    const auto& s = model.embeddings;
    if (bad(s.entities.data()) || bad(s.relations.data()) ||
        (model.composition.has_weight() && bad(model.composition.weight().data())))
        throw Error("non-finite parameter after epoch " + std::to_string(epoch) +
                    "; lower the learning rate or check the input data");
}

}  // namespace

void write_train_config(const std::filesystem::path& path, const TrainConfig& c) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    char lr[32], margin[32];
    std::snprintf(lr, sizeof lr, "%.17g", c.learning_rate);
    std::snprintf(margin, sizeof margin, "%.17g", c.margin);
    out << "lr=" << lr << '\n'
        << "margin=" << margin << '\n'
        << "dim=" << c.dim << '\n'
        << "epochs=" << c.epochs << '\n'
        << "compose=" << to_string(c.compose) << '\n'
        << "activation=" << to_string(c.activation) << '\n'
        << "max-len=" << c.max_path_len << '\n'
        << "norm=" << to_string(c.norm) << '\n'
        << "seed=" << c.seed << '\n'
        << "use-paths=" << (c.use_paths ? "true" : "false") << '\n'
        << "use-reverse=" << (c.use_reverse ? "true" : "false") << '\n'
        << "threads=" << c.threads << '\n'
        << "checkpoint-every=" << c.checkpoint_every << '\n';
}

void train_in_place(Model& model, const KnowledgeGraph& graph, const PathSet& paths,
                    const TrainConfig& config,
                    const std::optional<std::filesystem::path>& checkpoint_dir,
                    const EpochCallback& on_epoch) {
    config.validate();
    if (config.use_reverse && !graph.augmented())
        throw Error("training with reverse relations requires an augmented graph");
    if (model.embeddings.dim() != config.dim ||
        model.embeddings.num_entities() != graph.num_entities() ||
        model.embeddings.num_relations() != graph.num_relations())
        throw Error("model shape does not match graph and config");

    const auto pool = training_pool(graph, config);
    if (pool.empty()) throw Error("no training triples");
    if (checkpoint_dir) {
        std::filesystem::create_directories(*checkpoint_dir);
        write_train_config(*checkpoint_dir / "config.txt", config);
    }

    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::mt19937_64 rng(config.seed);
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        EpochStats stats{epoch, 0.0, pool.size()};
        if (config.threads == 1) {
            for (std::size_t s = 0; s < pool.size(); ++s)
                stats.loss += direct_step(model, graph, paths, config, pool[pick(rng)], rng);
        } else {
            SharedStepper stepper(model, graph, paths, config);
            std::vector<double> losses(config.threads, 0.0);
            {
                std::vector<std::jthread> workers;
                for (std::size_t w = 0; w < config.threads; ++w) {
                    workers.emplace_back([&, w] {
                        std::mt19937_64 local_rng(config.seed + 0x9E3779B97F4A7C15ULL * epoch +
                                                  w);
                        std::uniform_int_distribution<std::size_t> local_pick(0, pool.size() - 1);
                        const std::size_t steps =
                            pool.size() / config.threads + (w == 0 ? pool.size() % config.threads : 0);
                        for (std::size_t s = 0; s < steps; ++s)
                            losses[w] += stepper.step(pool[local_pick(local_rng)], local_rng);
                    });
                }
            }
            for (double l : losses) stats.loss += l;
        }
        if (!std::isfinite(stats.loss))
            throw Error("non-finite loss in epoch " + std::to_string(epoch));
        check_finite(model, epoch);
        if (checkpoint_dir && (epoch % config.checkpoint_every == 0 || epoch == config.epochs))
            save_model(*checkpoint_dir / ("epoch_" + std::to_string(epoch) + ".emb"), model);
        if (on_epoch) on_epoch(stats, model);
    }
    if (checkpoint_dir && config.epochs == 0)
        save_model(*checkpoint_dir / "epoch_0.emb", model);
}

Model train(const KnowledgeGraph& graph, const PathSet& paths, const TrainConfig& config,
            const std::optional<std::filesystem::path>& checkpoint_dir,
            const EpochCallback& on_epoch) {
    config.validate();
    Model model = initial_model(graph, config);
    train_in_place(model, graph, paths, config, checkpoint_dir, on_epoch);
    return model;
}

double objective(const KnowledgeGraph& graph, const PathSet& paths, const Model& model,
                 const TrainConfig& config, const ObjectiveOptions& options) {
    auto pool = training_pool(graph, config);
    if (pool.size() > options.max_triples) {
        std::mt19937_64 rng(options.seed);
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(options.max_triples);
    }
    const auto& store = model.embeddings;
    const auto ne = static_cast<EntityId>(graph.num_entities());
    const auto nr = static_cast<RelationId>(negative_relation_pool(graph, config));
    auto hinge = [&](double x) { return x > 0.0 ? x : 0.0; };

    double total = 0.0;
    for (const auto& t : pool) {
        const double pos = energy_direct(store, t);
        for (EntityId e = 0; e < ne; ++e) {
            Triple h{e, t.relation, t.tail};
            if (!graph.in_train(h)) total += hinge(config.margin + pos - energy_direct(store, h));
            Triple tl{t.head, t.relation, e};
            if (!graph.in_train(tl)) total += hinge(config.margin + pos - energy_direct(store, tl));
        }
        for (RelationId r = 0; r < nr; ++r) {
            Triple c{t.head, r, t.tail};
            if (!graph.in_train(c)) total += hinge(config.margin + pos - energy_direct(store, c));
        }
        if (!config.use_paths) continue;
        const auto* entry = paths.find(t.head, t.tail);
        if (!entry || entry->normalizer <= 0.0) continue;
        for (const auto& p : entry->paths) {
            const double ep = energy_path(store, model.composition, p.relations, t.relation);
            double lp = 0.0;
            for (RelationId r = 0; r < nr; ++r) {
                if (graph.in_train({t.head, r, t.tail})) continue;
                lp += hinge(config.margin + ep -
                            energy_path(store, model.composition, p.relations, r));
            }
            total += p.reliability / entry->normalizer * lp;
        }
    }
    return total;
}

}  // namespace ptranse
