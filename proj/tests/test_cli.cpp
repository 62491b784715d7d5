#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <random>
#include <sstream>

#include "manifest.hpp"
#include "ptranse/path_miner.hpp"
#include "support.hpp"

using namespace ptranse;
using testing_support::read_file;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

struct Run {
    int status;
    std::string err;
};

// Runs the CLI inside `dir`; stdout is discarded, stderr captured.
Run ptranse_cli(const TempDir& dir, const std::string& args) {
    const std::string cmd = "cd '" + dir.path().string() + "' && '" PTRANSE_CLI_PATH "' " + args +
                            " >/dev/null 2>stderr.txt";
    const int rc = std::system(cmd.c_str());
    return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, read_file(dir / "stderr.txt")};
}

// Small random dataset written as tab-separated names.
void write_dataset(const TempDir& dir, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto triples = testing_support::random_triples(rng, 30, 4, 120);
    std::ostringstream train, valid, test;
    for (std::size_t i = 0; i < triples.size(); ++i) {
        const auto& t = triples[i];
        auto& out = i % 10 == 0 ? test : (i % 10 == 1 ? valid : train);
        out << "ent" << t.head << "\trel" << t.relation << "\tent" << t.tail << "\n";
    }
    write_file(dir / "train.txt", train.str());
    write_file(dir / "valid.txt", valid.str());
    write_file(dir / "test.txt", test.str());
}

const std::string kData = "--train train.txt --valid valid.txt --test test.txt";

void mine_and_train(const TempDir& dir, const std::string& out, const std::string& extra = "") {
    ASSERT_EQ(ptranse_cli(dir, "mine " + kData + " --out mined").status, 0);
    auto r = ptranse_cli(dir, "train " + kData +
                                  " --paths mined/paths.txt --stats mined/stats.txt --dim 8"
                                  " --epochs 5 --lr 0.01 --checkpoint-every 5 --out " + out + " " + extra);
    ASSERT_EQ(r.status, 0) << r.err;
}

std::string eval_args(const std::string& emb, const std::string& report, const std::string& mode) {
    return "eval " + kData + " --emb " + emb +
           " --paths mined/paths.txt --stats mined/stats.txt --rerank 10 --mode " + mode +
           " --report " + report;
}

}  // namespace

TEST(GitBlobHash, KnownValues) {
    TempDir dir("cli");
    write_file(dir / "hello.txt", "hello\n");
    write_file(dir / "empty.txt", "");
    EXPECT_EQ(cli::git_blob_hash(dir / "hello.txt"), "ce013625030ba8dba906f756967f9e9ca394464a");
    EXPECT_EQ(cli::git_blob_hash(dir / "empty.txt"), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    EXPECT_THROW(cli::git_blob_hash(dir / "missing.txt"), std::exception);
}

TEST(Manifest, Format) {
    TempDir dir("cli");
    write_file(dir / "hello.txt", "hello\n");
    cli::Manifest m{"mine", "max-len=3\n", {{"train", dir / "hello.txt"}}};
    EXPECT_EQ(cli::format_manifest(m),
              "# ptranse mine\nmax-len=3\n# input train ce013625030ba8dba906f756967f9e9ca394464a " +
                  (dir / "hello.txt").string() + "\n");
}

TEST(Cli, IngestWritesVocabularies) {
    TempDir dir("cli");
    write_file(dir / "train.txt", "a\tr\tb\nb\ts\tc\n");
    ASSERT_EQ(ptranse_cli(dir, "ingest --train train.txt --out ing").status, 0);
    EXPECT_EQ(read_file(dir / "ing/entity2id.txt"), "a\t0\nb\t1\nc\t2\n");
    EXPECT_EQ(read_file(dir / "ing/relation2id.txt"), "r\t0\ns\t1\n");
    EXPECT_TRUE(std::filesystem::exists(dir / "ing/manifest.txt"));
}

TEST(Cli, MinedPathsRoundTrip) {
    TempDir dir("cli");
    write_dataset(dir, 1);
    ASSERT_EQ(ptranse_cli(dir, "mine " + kData + " --out mined").status, 0);
    auto g = KnowledgeGraph::load(dir / "train.txt", dir / "valid.txt", dir / "test.txt");
    g.augment_reverse();
    auto want = mine_training_paths(g, {3, 0.01, 1});
    auto got = read_path_set(dir / "mined/paths.txt");
    ASSERT_EQ(got.sorted_keys(), want.sorted_keys());
    for (auto key : want.sorted_keys()) {
        const auto h = static_cast<EntityId>(key >> 32), t = static_cast<EntityId>(key & 0xffffffffu);
        const auto& a = want.find(h, t)->paths;
        const auto& b = got.find(h, t)->paths;
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].relations, b[i].relations);
            EXPECT_NEAR(a[i].reliability, b[i].reliability, 1e-5);
        }
    }
    ASSERT_EQ(ptranse_cli(dir, "mine " + kData + " --threshold 1.1 --out none").status, 0);
    EXPECT_TRUE(read_path_set(dir / "none/paths.txt").empty());
}

TEST(Cli, TrainAndEvalAreReproducible) {
    TempDir dir("cli");
    write_dataset(dir, 2);
    mine_and_train(dir, "a");
    mine_and_train(dir, "b");
    EXPECT_EQ(read_file(dir / "a/epoch_5.emb"), read_file(dir / "b/epoch_5.emb"));
    ASSERT_EQ(ptranse_cli(dir, eval_args("a/epoch_5.emb", "r1.txt", "ptranse")).status, 0);
    ASSERT_EQ(ptranse_cli(dir, eval_args("b/epoch_5.emb", "r2.txt", "ptranse")).status, 0);
    EXPECT_EQ(read_file(dir / "r1.txt"), read_file(dir / "r2.txt"));
    EXPECT_EQ(read_file(dir / "r1.txt.ranks.tsv"), read_file(dir / "r2.txt.ranks.tsv"));
    ASSERT_EQ(ptranse_cli(dir, eval_args("a/epoch_5.emb", "r3.txt", "transe")).status, 0);
    EXPECT_NE(read_file(dir / "r1.txt.ranks.tsv"), read_file(dir / "r3.txt.ranks.tsv"));
    auto rel = ptranse_cli(dir, eval_args("a/epoch_5.emb", "rel.txt", "ptranse") + " --task relation");
    ASSERT_EQ(rel.status, 0) << rel.err;
    EXPECT_NE(read_file(dir / "rel.txt").find("hits@1"), std::string::npos);
}

TEST(Cli, ManifestReproducesRun) {
    TempDir dir("cli");
    write_dataset(dir, 3);
    mine_and_train(dir, "a", "--compose rnn --activation tanh");
    auto manifest = read_file(dir / "a/manifest.txt");
    EXPECT_NE(manifest.find("compose=\"rnn\""), std::string::npos) << manifest;
    EXPECT_NE(manifest.find("# input train " + cli::git_blob_hash(dir / "train.txt") + " train.txt"),
              std::string::npos)
        << manifest;
    ASSERT_EQ(ptranse_cli(dir, "train --config a/manifest.txt --out again").status, 0);
    EXPECT_EQ(read_file(dir / "a/epoch_5.emb"), read_file(dir / "again/epoch_5.emb"));
    // Command-line flags win over the file.
    ASSERT_EQ(ptranse_cli(dir, "train --config a/manifest.txt --seed 9 --out other").status, 0);
    EXPECT_NE(read_file(dir / "a/epoch_5.emb"), read_file(dir / "other/epoch_5.emb"));
}

TEST(Cli, ExportImportPreservesEvaluation) {
    TempDir dir("cli");
    write_dataset(dir, 4);
    mine_and_train(dir, "a", "--compose rnn");
    ASSERT_EQ(ptranse_cli(dir, "export --emb a/epoch_5.emb --out ex").status, 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "ex/rnn_weight.txt"));
    ASSERT_EQ(ptranse_cli(dir, "export --import ex --out back.emb").status, 0);
    EXPECT_EQ(read_file(dir / "a/epoch_5.emb"), read_file(dir / "back.emb"));
    ASSERT_EQ(ptranse_cli(dir, eval_args("a/epoch_5.emb", "r1.txt", "ptranse")).status, 0);
    ASSERT_EQ(ptranse_cli(dir, eval_args("back.emb", "r2.txt", "ptranse")).status, 0);
    EXPECT_EQ(read_file(dir / "r1.txt"), read_file(dir / "r2.txt"));
}

TEST(Cli, ErrorsAndExitCodes) {
    TempDir dir("cli");
    write_dataset(dir, 5);
    EXPECT_NE(ptranse_cli(dir, "mine --out x").status, 0);
    EXPECT_NE(ptranse_cli(dir, "bogus").status, 0);
    auto missing = ptranse_cli(dir, "train " + kData + " --paths nope.txt --out t");
    EXPECT_EQ(missing.status, 1);
    EXPECT_NE(missing.err.find("ptranse mine"), std::string::npos) << missing.err;
    auto no_emb = ptranse_cli(dir, "eval " + kData + " --emb nope.emb --mode transe --report r.txt");
    EXPECT_EQ(no_emb.status, 1);
    EXPECT_NE(no_emb.err.find("ptranse train"), std::string::npos) << no_emb.err;
    write_file(dir / "bad.txt", "a\tb\n");
    auto bad = ptranse_cli(dir, "ingest --train bad.txt --out i");
    EXPECT_EQ(bad.status, 1);
    EXPECT_NE(bad.err.find("ptranse: error:"), std::string::npos) << bad.err;
    write_file(dir / "cfg.txt", "no-such-key=1\n");
    EXPECT_EQ(ptranse_cli(dir, "ingest --config cfg.txt --train train.txt --out i").status, 2);
    mine_and_train(dir, "m");
    auto no_paths = ptranse_cli(dir, "eval " + kData + " --emb m/epoch_5.emb --report r.txt");
    EXPECT_EQ(no_paths.status, 1) << no_paths.err;
}
