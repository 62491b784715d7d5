#pragma once
// Per-triple SGD on the margin ranking objective
//
//   L(S) = sum_{(h,r,t)} [ L(h,r,t) + (1/Z) sum_{p in P(h,t)} R(p|h,t) L(p,r) ]
//
// with hinge losses against corrupted heads, relations and tails, and unit
// ball projection of every row an update touches.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ptranse/kg_store.hpp"
#include "ptranse/model.hpp"
#include "ptranse/path_miner.hpp"

namespace ptranse {

struct TrainConfig {
    double learning_rate = 0.001;
    double margin = 1.0;
    std::size_t dim = 100;
    std::size_t epochs = 500;
    CompositionKind compose = CompositionKind::add;
    Activation activation = Activation::identity;
    std::size_t max_path_len = 3;
    Dissimilarity norm = Dissimilarity::l1;
    std::uint64_t seed = 1;
    bool use_paths = true;
    // Train on the materialized reverse triples as well.
    bool use_reverse = true;
    // 1 = deterministic single worker; more = lock-free throughput mode.
    std::size_t threads = 1;
    std::size_t checkpoint_every = 50;

    // Throws on non-positive rates, margins or sizes.
    void validate() const;
};

struct NegativeSample {
    Triple corrupted;
    Slot slot;
};

inline constexpr std::size_t kMaxNegativeRejections = 100;

// Replaces `slot` uniformly at random, resampling while the result is a
// training triple. Relation replacements are drawn from [0, relation_count)
// (all relations when 0). Throws after kMaxNegativeRejections rejections.
NegativeSample sample_negative(const KnowledgeGraph& graph, const Triple& triple, Slot slot,
                               std::mt19937_64& rng, std::size_t relation_count = 0);

enum class ParamKind { entity, relation };

struct RowGradient {
    ParamKind kind;
    std::int32_t row;
    std::vector<double> grad;
};

// Sparse gradient of one loss term. Rows are unique.
struct GradientSet {
    std::vector<RowGradient> rows;
    std::optional<DenseMatrix> weight;

    bool empty() const noexcept { return rows.empty() && !weight; }
    void accumulate(ParamKind kind, std::int32_t row, std::span<const double> grad,
                    double scale = 1.0);
    const RowGradient* find(ParamKind kind, std::int32_t row) const;
};

struct LossResult {
    double loss = 0.0;
    GradientSet gradients;
};

// [margin + E(h,r,t) - E(h',r',t')]_+ and its subgradient.
LossResult loss_direct(const EmbeddingStore& store, const Triple& positive,
                       const NegativeSample& negative, double margin);

// weight * [margin + E(p,r) - E(p,r')]_+; gradients reach relation rows and
// the RNN weights only.
LossResult loss_path(const EmbeddingStore& store, const CompositionOp& op,
                     std::span<const RelationId> path, RelationId relation,
                     RelationId negative_relation, double margin, double weight);

// x -= rate * grad for every row in the set, then projects the touched rows.
void apply_gradients(EmbeddingStore& store, CompositionOp& op, const GradientSet& gradients,
                     double learning_rate);

struct EpochStats {
    std::size_t epoch = 0;
    double loss = 0.0;  // sum of hinge values seen during the epoch
    std::size_t steps = 0;
};

using EpochCallback = std::function<void(const EpochStats&, const Model&)>;

// Fresh parameters for the graph: init_embeddings plus the composition op.
Model initial_model(const KnowledgeGraph& graph, const TrainConfig& config);

// Runs config.epochs passes of |train| sampled steps each. Writes
// epoch_<n>.emb every checkpoint_every epochs and at the end, plus
// config.txt, when a checkpoint directory is given.
Model train(const KnowledgeGraph& graph, const PathSet& paths, const TrainConfig& config,
            const std::optional<std::filesystem::path>& checkpoint_dir = std::nullopt,
            const EpochCallback& on_epoch = {});

// Continues training an existing model for config.epochs epochs.
void train_in_place(Model& model, const KnowledgeGraph& graph, const PathSet& paths,
                    const TrainConfig& config,
                    const std::optional<std::filesystem::path>& checkpoint_dir = std::nullopt,
                    const EpochCallback& on_epoch = {});

// Training triples the trainer samples from under the config.
std::vector<Triple> training_pool(const KnowledgeGraph& graph, const TrainConfig& config);

struct ObjectiveOptions {
    std::size_t max_triples = 10000;  // fixed subsample above this size
    std::uint64_t seed = 0;
};

// Recomputes the full objective with every valid corruption in S^- for each
// (possibly subsampled) training triple.
double objective(const KnowledgeGraph& graph, const PathSet& paths, const Model& model,
                 const TrainConfig& config, const ObjectiveOptions& options = {});

void write_train_config(const std::filesystem::path& path, const TrainConfig& config);

}  // namespace ptranse
