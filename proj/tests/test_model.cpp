#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ptranse/model.hpp"
#include "support.hpp"

using namespace ptranse;

namespace {

EmbeddingStore store_2d(std::vector<std::vector<double>> ents, std::vector<std::vector<double>> rels,
                        Dissimilarity norm = Dissimilarity::l1) {
    EmbeddingStore s;
    s.norm = norm;
    s.entities = DenseMatrix(ents.size(), 2);
    s.relations = DenseMatrix(rels.size(), 2);
    for (std::size_t i = 0; i < ents.size(); ++i)
        for (std::size_t j = 0; j < 2; ++j) s.entities(i, j) = ents[i][j];
    for (std::size_t i = 0; i < rels.size(); ++i)
        for (std::size_t j = 0; j < 2; ++j) s.relations(i, j) = rels[i][j];
    return s;
}

}  // namespace

TEST(InitEmbeddings, RowsInsideUnitBall) {
    auto s = init_embeddings(50, 7, 100, 3);
    EXPECT_LE(max_row_norm(s), 1.0 + 1e-9);
    EXPECT_EQ(s.dim(), 100u);
    EXPECT_EQ(s.num_entities(), 50u);
    EXPECT_EQ(s.num_relations(), 7u);
}

TEST(InitEmbeddings, DeterministicAndRanged) {
    EXPECT_EQ(init_embeddings(10, 3, 8, 42), init_embeddings(10, 3, 8, 42));
    EXPECT_NE(init_embeddings(10, 3, 8, 42), init_embeddings(10, 3, 8, 43));
    auto s = init_embeddings(10, 3, 400, 1);
    const double bound = 6.0 / std::sqrt(400.0);
    for (double v : s.entities.data()) EXPECT_LE(std::fabs(v), bound);
    EXPECT_THROW(init_embeddings(10, 3, 0, 1), Error);
    EXPECT_THROW(init_embeddings(0, 3, 4, 1), Error);
}

TEST(InitEmbeddings, EntitiesDrawnBeforeRelations) {
    auto a = init_embeddings(4, 2, 3, 9);
    auto b = init_embeddings(4, 5, 3, 9);
    EXPECT_EQ(a.entities, b.entities);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(a.relations(i, j), b.relations(i, j));
}

TEST(EnergyDirect, Examples) {
    auto s = store_2d({{0, 0}, {1, 1}}, {{1, 1}});
    EXPECT_EQ(energy_direct(s, {0, 0, 1}), 0.0);
    EXPECT_EQ(energy_direct(s, {0, 0, 0}), 2.0);
    s.norm = Dissimilarity::l2;
    EXPECT_DOUBLE_EQ(energy_direct(s, {0, 0, 0}), std::sqrt(2.0));
}

TEST(EnergyDirect, MatchesOracleAndIsNonNegative) {
    std::mt19937_64 rng(5);
    for (auto norm : {Dissimilarity::l1, Dissimilarity::l2}) {
        auto s = init_embeddings(8, 4, 6, 11, norm);
        for (EntityId h = 0; h < 8; ++h)
            for (RelationId r = 0; r < 4; ++r)
                for (EntityId t = 0; t < 8; ++t) {
                    const double e = energy_direct(s, {h, r, t});
                    EXPECT_GE(e, 0.0);
                    EXPECT_NEAR(e, oracle::energy(s, {h, r, t}), 1e-12);
                }
    }
}

TEST(EnergyPath, Examples) {
    auto s = store_2d({{0, 0}}, {{1, 0}, {0, 1}, {1, 1}});
    const RelationId single[] = {2};
    EXPECT_EQ(energy_path(s, CompositionOp::add(), single, 2), 0.0);
    const RelationId two[] = {0, 1};
    EXPECT_EQ(energy_path(s, CompositionOp::add(), two, 2), 0.0);
    EXPECT_EQ(energy_path(s, CompositionOp::mul(), two, 2), 2.0);
}

TEST(EnergyPath, IndependentOfEntityRows) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    auto s = init_embeddings(6, 5, 4, 2);
    auto op = CompositionOp::rnn(4, Activation::tanh, 1, 0.2);
    const RelationId path[] = {0, 3, 1};
    const double before = energy_path(s, op, path, 4);
    for (auto& v : s.entities.data()) v = u(rng);
    EXPECT_EQ(energy_path(s, op, path, 4), before);
    EXPECT_NEAR(before, oracle::path_energy(s, op, {0, 3, 1}, 4), 1e-12);
}

TEST(ProjectNorms, Examples) {
    auto s = store_2d({{3, 4}, {0.1, 0.1}}, {{0, 2}});
    project_norms(s);
    EXPECT_DOUBLE_EQ(s.entities(0, 0), 0.6);
    EXPECT_DOUBLE_EQ(s.entities(0, 1), 0.8);
    EXPECT_EQ(s.entities(1, 0), 0.1);
    EXPECT_EQ(s.entities(1, 1), 0.1);
    EXPECT_EQ(s.relations(0, 1), 1.0);
}

TEST(ProjectNorms, IdempotentAndFeasible) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = init_embeddings(20, 4, 7, trial);
        for (auto& v : s.entities.data()) v = u(rng);
        project_norms(s);
        EXPECT_LE(max_row_norm(s), 1.0 + 1e-9);
        auto again = s;
        project_norms(again);
        EXPECT_EQ(again, s);
    }
}

TEST(ModelPersistence, RoundTripIsExact) {
    testing_support::TempDir dir("model");
    for (auto op : {CompositionOp::add(), CompositionOp::mul(),
                    CompositionOp::rnn(5, Activation::tanh, 4)}) {
        Model m{init_embeddings(9, 4, 5, 21, Dissimilarity::l2), op};
        save_model(dir / "m.emb", m);
        auto back = load_model(dir / "m.emb");
        EXPECT_EQ(back, m);
        save_model(dir / "m2.emb", back);
        EXPECT_EQ(testing_support::read_file(dir / "m.emb"), testing_support::read_file(dir / "m2.emb"));
    }
}

TEST(ModelPersistence, HeaderAndErrors) {
    testing_support::TempDir dir("model");
    Model m{init_embeddings(2, 1, 3, 1), CompositionOp::add()};
    save_model(dir / "m.emb", m);
    auto text = testing_support::read_file(dir / "m.emb");
    EXPECT_EQ(text.substr(0, text.find('\n')), "ptranse v1 2 1 3 l1 add");

    testing_support::write_file(dir / "bad.emb", "ptranse v2 1 1 1 l1 add\n0\n0\n");
    EXPECT_THROW(load_model(dir / "bad.emb"), Error);
    testing_support::write_file(dir / "short.emb", "ptranse v1 2 1 2 l1 add\n0 0\n0 0\n");
    EXPECT_THROW(load_model(dir / "short.emb"), Error);
    testing_support::write_file(dir / "rnn.emb", "ptranse v1 1 1 1 l1 rnn\n0\n0\n");
    EXPECT_THROW(load_model(dir / "rnn.emb"), Error);
    EXPECT_THROW(load_model(dir / "missing.emb"), Error);
}
