#pragma once
// Embedding store and energy functions.
//
//   E(h, r, t) = ||h + r - t||           direct triple
//   E(p, r)    = ||p - r||               path triple, entity-free
//
// Every row is kept inside the unit L2 ball.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "ptranse/composition.hpp"
#include "ptranse/dense.hpp"
#include "ptranse/types.hpp"

namespace ptranse {

enum class Dissimilarity { l1, l2 };

std::string_view to_string(Dissimilarity norm);
Dissimilarity parse_dissimilarity(std::string_view text);

struct EmbeddingStore {
    DenseMatrix entities;
    DenseMatrix relations;  // reverse relations own independent rows
    Dissimilarity norm = Dissimilarity::l1;

    std::size_t dim() const noexcept { return entities.cols(); }
    std::size_t num_entities() const noexcept { return entities.rows(); }
    std::size_t num_relations() const noexcept { return relations.rows(); }

    std::span<const double> entity(EntityId e) const {
        return entities.row(static_cast<std::size_t>(e));
    }
    std::span<double> entity(EntityId e) { return entities.row(static_cast<std::size_t>(e)); }
    std::span<const double> relation(RelationId r) const {
        return relations.row(static_cast<std::size_t>(r));
    }
    std::span<double> relation(RelationId r) {
        return relations.row(static_cast<std::size_t>(r));
    }

    friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;
};

// Coordinates uniform in [-6/sqrt(k), 6/sqrt(k)], rows then projected into
// the unit ball. Entities are drawn before relations.
EmbeddingStore init_embeddings(std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                               std::uint64_t seed, Dissimilarity norm = Dissimilarity::l1);

double dissimilarity(Dissimilarity norm, std::span<const double> diff);

double energy_direct(const EmbeddingStore& store, const Triple& triple);

std::vector<double> compose_path(const EmbeddingStore& store, const CompositionOp& op,
                                 std::span<const RelationId> path);

double energy_path(const EmbeddingStore& store, const CompositionOp& op,
                   std::span<const RelationId> path, RelationId relation);

// Rescales a row onto the unit sphere if its squared norm exceeds 1 + 1e-12.
// Returns true if the row changed.
bool project_row(std::span<double> row);
void project_norms(EmbeddingStore& store);
double max_row_norm(const EmbeddingStore& store);

// Everything a trained run produces: embeddings plus the composition operator
// (which carries the RNN weights).
struct Model {
    EmbeddingStore embeddings;
    CompositionOp composition = CompositionOp::add();

    friend bool operator==(const Model&, const Model&) = default;
};

// Text format:
//   ptranse v1 <n_entities> <n_relations> <k> <l1|l2> <add|mul|rnn>
//   <entity rows> <relation rows>
//   [rnn <identity|tanh>  followed by k rows of 2k weights]
// Values are written with 17 significant digits so reloading is exact.
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace ptranse
