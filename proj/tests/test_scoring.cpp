#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ptranse/scoring.hpp"
#include "support.hpp"

using namespace ptranse;
using testing_support::make_graph;

namespace {

// Five entities with two-step detours alongside the direct edges.
KnowledgeGraph five_entity_graph() {
    return augment_reverse(make_graph(5, 3,
                                      {{0, 0, 1}, {1, 1, 2}, {0, 2, 2}, {2, 0, 3}, {3, 1, 4},
                                       {2, 2, 4}, {0, 0, 3}, {1, 2, 3}, {4, 0, 0}}));
}

oracle::ConfidenceFn confidence_of(const PathRelationStats& stats) {
    return [&stats](const std::vector<RelationId>& p, RelationId r) { return stats.confidence(p, r); };
}

}  // namespace

TEST(ScoreG, NoPathsEqualsDirectEnergy) {
    auto g = five_entity_graph();
    auto store = init_embeddings(5, 6, 4, 1);
    PathSet empty;
    PathRelationStats stats;
    for (const auto& t : g.train())
        EXPECT_EQ(score_G(store, CompositionOp::add(), empty, stats, t), energy_direct(store, t));
}

TEST(ScoreG, DegenerateWeights) {
    auto store = init_embeddings(3, 3, 4, 2);
    PathSet paths;
    paths.insert(0, 2, {{{0, 1}, 1.0}});
    PathRelationStats stats;
    stats.set({0, 1}, 2, 1.0);
    const Triple t{0, 2, 2};
    const RelationId path[] = {0, 1};
    EXPECT_DOUBLE_EQ(score_G(store, CompositionOp::add(), paths, stats, t),
                     energy_direct(store, t) + energy_path(store, CompositionOp::add(), path, 2));
    // Relation never seen with the path: confidence 0, no path contribution.
    EXPECT_EQ(score_G(store, CompositionOp::add(), paths, stats, {0, 1, 2}),
              energy_direct(store, {0, 1, 2}));
}

TEST(ScoreG, MatchesStraightLineOracle) {
    auto g = five_entity_graph();
    auto paths = mine_training_paths(g, {3, 0.01, 1});
    auto stats = path_relation_confidence(g, paths);
    ASSERT_GT(paths.num_pairs(), 0u);
    for (auto norm : {Dissimilarity::l1, Dissimilarity::l2}) {
        auto store = init_embeddings(5, 6, 6, 3, norm);
        for (auto op : {CompositionOp::add(), CompositionOp::mul(),
                        CompositionOp::rnn(6, Activation::tanh, 2)}) {
            for (EntityId h = 0; h < 5; ++h)
                for (RelationId r = 0; r < 6; ++r)
                    for (EntityId t = 0; t < 5; ++t) {
                        const Triple q{h, r, t};
                        EXPECT_NEAR(score_G(store, op, paths, stats, q),
                                    oracle::score_G(store, op, paths.find(h, t), confidence_of(stats), q),
                                    1e-12);
                    }
        }
    }
}

TEST(ScoreS, DecomposesIntoTwoGs) {
    auto g = five_entity_graph();
    auto paths = mine_training_paths(g, {3, 0.01, 1});
    auto stats = path_relation_confidence(g, paths);
    auto store = init_embeddings(5, 6, 4, 4);
    auto op = CompositionOp::add();
    for (const auto& t : g.train()) {
        const double s = score_S(store, op, g, paths, stats, t);
        EXPECT_EQ(s, score_G(store, op, paths, stats, t) +
                         score_G(store, op, paths, stats, {t.tail, g.reverse(t.relation), t.head}));
        EXPECT_GE(s, 0.0);
    }
    PathSet empty;
    const Triple q{0, 1, 3};
    EXPECT_EQ(score_S(store, op, g, empty, stats, q),
              energy_direct(store, q) + energy_direct(store, {3, 4, 0}));
}

TEST(ScoreS, SymmetricConstructionDoublesG) {
    auto g = augment_reverse(make_graph(2, 1, {{0, 0, 1}}));
    EmbeddingStore store = init_embeddings(2, 2, 3, 5);
    for (std::size_t j = 0; j < 3; ++j) store.relations(1, j) = -store.relations(0, j);
    PathSet empty;
    PathRelationStats stats;
    const Triple t{0, 0, 1};
    EXPECT_DOUBLE_EQ(score_S(store, CompositionOp::add(), g, empty, stats, t),
                     2.0 * score_G(store, CompositionOp::add(), empty, stats, t));
}

TEST(Scorer, ModesSelectTerms) {
    auto g = five_entity_graph();
    auto paths = mine_training_paths(g, {3, 0.01, 1});
    auto stats = path_relation_confidence(g, paths);
    Model model{init_embeddings(5, 6, 4, 6), CompositionOp::add()};
    const auto& s = model.embeddings;
    const PathLookup lookup(paths);
    auto scorer = [&](ScoreMode m) { return Scorer(model, g, lookup, stats, m); };

    PathSet none;
    for (const auto& t : g.train()) {
        const Triple back{t.tail, g.reverse(t.relation), t.head};
        const double both = energy_direct(s, t) + energy_direct(s, back);
        const double path_only = score_S(s, model.composition, g, paths, stats, t) -
                                 score_S(s, model.composition, g, none, stats, t);
        EXPECT_EQ(scorer(ScoreMode::transe).full(t), energy_direct(s, t));
        EXPECT_EQ(scorer(ScoreMode::transe).stage1(t), energy_direct(s, t));
        EXPECT_EQ(scorer(ScoreMode::transe_rev).full(t), both);
        EXPECT_EQ(scorer(ScoreMode::ptranse_minus_path).full(t), both);
        EXPECT_EQ(scorer(ScoreMode::ptranse).stage1(t), both);
        EXPECT_NEAR(scorer(ScoreMode::ptranse).full(t), score_S(s, model.composition, g, paths, stats, t), 1e-12);
        EXPECT_EQ(scorer(ScoreMode::transe_rev_path).full(t), scorer(ScoreMode::ptranse).full(t));
        EXPECT_NEAR(scorer(ScoreMode::ptranse_minus_transe).full(t), path_only, 1e-12);
    }
    EXPECT_THROW(Scorer(model, make_graph(5, 3, {{0, 0, 1}}), lookup, stats, ScoreMode::ptranse), Error);
}

TEST(Scorer, RelationScoresAgreeWithFull) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = augment_reverse(testing_support::random_graph(rng, 12, 3));
        auto paths = mine_training_paths(g, {3, 0.01, 1});
        auto stats = path_relation_confidence(g, paths);
        Model model{init_embeddings(g.num_entities(), g.num_relations(), 5, trial),
                    CompositionOp::rnn(5, Activation::identity, trial)};
        const PathLookup lookup(paths, g, {3, 0.01, 1});
        for (auto mode : {ScoreMode::ptranse, ScoreMode::transe, ScoreMode::ptranse_minus_transe}) {
            Scorer scorer(model, g, lookup, stats, mode);
            for (const auto& t : g.train()) {
                auto scores = scorer.relation_scores(t.head, t.tail, g.num_original_relations());
                for (std::size_t r = 0; r < scores.size(); ++r)
                    EXPECT_EQ(scores[r], scorer.full({t.head, static_cast<RelationId>(r), t.tail}));
            }
        }
    }
}

TEST(PathLookup, MinesUnseenPairsOnDemand) {
    auto g = five_entity_graph();
    auto paths = mine_training_paths(g, {3, 0.01, 1});
    const PathLookup lazy(paths, g, {3, 0.01, 1});
    const PathLookup stored(paths);
    PairPaths scratch;
    for (EntityId h = 0; h < 5; ++h) {
        for (EntityId t = 0; t < 5; ++t) {
            const auto& got = lazy.find(h, t, scratch);
            if (const auto* entry = paths.find(h, t)) {
                EXPECT_EQ(&got, entry);
                continue;
            }
            EXPECT_EQ(got.paths, mine_pair(g, h, t, {3, 0.01, 1}));
            double z = 0.0;
            for (const auto& p : got.paths) z += p.reliability;
            EXPECT_EQ(got.normalizer, z);
            EXPECT_TRUE(stored.find(h, t, scratch).paths.empty());
        }
    }
}

TEST(ScoreMode, NamesRoundTrip) {
    for (auto m : {ScoreMode::ptranse, ScoreMode::transe, ScoreMode::transe_rev,
                   ScoreMode::transe_rev_path, ScoreMode::ptranse_minus_path,
                   ScoreMode::ptranse_minus_transe})
        EXPECT_EQ(parse_score_mode(to_string(m)), m);
    EXPECT_EQ(parse_score_mode("transe+rev+path"), ScoreMode::transe_rev_path);
    EXPECT_THROW(parse_score_mode("ptranse+"), Error);
}
