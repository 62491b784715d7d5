// ptranse: ingest, mine, train, eval and export subcommands.
//
// Stages talk only through files. Every option can also come from a flat
// key=value file passed with --config; flags given on the command line win.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "manifest.hpp"
#include "ptranse/evaluator.hpp"
#include "ptranse/kg_store.hpp"
#include "ptranse/model.hpp"
#include "ptranse/path_miner.hpp"
#include "ptranse/scoring.hpp"
#include "ptranse/trainer.hpp"

namespace fs = std::filesystem;
using namespace ptranse;

namespace {

struct Dataset {
    std::string train, valid, test;

    void add_options(CLI::App* app, bool train_required = true) {
        auto* o = app->add_option("--train", train, "training triples (head<TAB>relation<TAB>tail)");
        if (train_required) o->required();
        app->add_option("--valid", valid, "validation triples");
        app->add_option("--test", test, "test triples");
    }

    KnowledgeGraph load() const {
        require_file(train, "training split", "");
        if (!valid.empty()) require_file(valid, "validation split", "");
        if (!test.empty()) require_file(test, "test split", "");
        return KnowledgeGraph::load(train, valid, test);
    }

    void record(cli::Manifest& m) const {
        m.inputs.emplace_back("train", train);
        if (!valid.empty()) m.inputs.emplace_back("valid", valid);
        if (!test.empty()) m.inputs.emplace_back("test", test);
    }

    static void require_file(const std::string& path, const std::string& what,
                             const std::string& producer) {
        if (fs::is_regular_file(path)) return;
        std::string msg = what + " not found: " + path;
        if (!producer.empty()) msg += " (run `ptranse " + producer + "` first)";
        throw Error(msg);
    }
};

std::string strip_config_line(const std::string& text);

std::string options_of(const CLI::App* app) {
    return strip_config_line(app->config_to_str(true, false));
}

void finish(const CLI::App* app, cli::Manifest manifest, const fs::path& where) {
    manifest.command = app->get_name();
    manifest.options = options_of(app);
    cli::write_manifest(where, manifest);
}

// Path-set ids must come from the same dataset files.
void check_path_ids(const PathSet& paths, const KnowledgeGraph& graph, const std::string& file) {
    const auto ne = static_cast<EntityId>(graph.num_entities());
    const auto nr = static_cast<RelationId>(graph.num_relations());
    for (auto key : paths.sorted_keys()) {
        const EntityId h = pair_first(key), t = pair_second(key);
        if (h >= ne || t >= ne)
            throw Error("path set " + file + " refers to entities outside the dataset");
        for (const auto& p : paths.find(h, t)->paths)
            for (auto r : p.relations)
                if (r < 0 || r >= nr)
                    throw Error("path set " + file + " refers to relations outside the dataset");
    }
}

std::string format_real(double v, const char* fmt = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

// ---- ingest ---------------------------------------------------------------

struct IngestCmd {
    Dataset data;
    std::string out;

    void setup(CLI::App* app) {
        data.add_options(app);
        app->add_option("--out", out, "output directory")->required();
    }

    void run(const CLI::App* app) const {
        const auto graph = data.load();
        fs::create_directories(out);
        write_vocabulary(fs::path(out) / "entity2id.txt", graph.entities());
        write_vocabulary(fs::path(out) / "relation2id.txt", graph.relations());

        std::map<std::string, std::size_t> categories;
        std::size_t unused = 0;
        for (const auto& c : classify_relations(graph)) {
            if (c) ++categories[std::string(to_string(*c))];
            else ++unused;
        }
        std::ostringstream s;
        s << "entities: " << graph.num_entities() << '\n'
          << "relations: " << graph.num_relations() << '\n'
          << "train: " << graph.train().size() << '\n'
          << "valid: " << graph.valid().size() << '\n'
          << "test: " << graph.test().size() << '\n';
        for (auto c : kAllCategories) {
            const auto name = std::string(to_string(c));
            s << "relations " << name << ": " << categories[name] << '\n';
        }
        if (unused) s << "relations without training triples: " << unused << '\n';
        std::ofstream(fs::path(out) / "summary.txt") << s.str();
        std::cout << s.str();

        cli::Manifest m;
        data.record(m);
        finish(app, m, fs::path(out) / "manifest.txt");
    }
};

// ---- mine -----------------------------------------------------------------

struct MineCmd {
    Dataset data;
    MiningConfig config;
    std::string out;

    void setup(CLI::App* app) {
        data.add_options(app);
        app->add_option("--max-len", config.max_len, "longest path in relations")
            ->check(CLI::Range(std::size_t{kMinPathLength}, std::size_t{8}));
        app->add_option("--threshold", config.threshold, "keep paths with reliability above this");
        app->add_option("--threads", config.threads, "mining workers")
            ->check(CLI::PositiveNumber);
        app->add_option("--out", out, "output directory")->required();
    }

    void run(const CLI::App* app) const {
        auto graph = data.load();
        graph.augment_reverse();
        const auto paths = mine_training_paths(graph, config);
        const auto stats = path_relation_confidence(graph, paths);

        fs::create_directories(out);
        write_path_set(fs::path(out) / "paths.txt", paths);
        write_path_stats(fs::path(out) / "stats.txt", stats);

        const auto summary = describe(graph, paths, stats);
        std::ofstream(fs::path(out) / "summary.txt") << summary;
        std::cout << summary;

        cli::Manifest m;
        data.record(m);
        finish(app, m, fs::path(out) / "manifest.txt");
    }

    std::string describe(const KnowledgeGraph& graph, const PathSet& paths,
                         const PathRelationStats& stats) const {
        std::vector<std::uint64_t> keys;
        for (const auto& t : graph.train()) keys.push_back(pair_key(t.head, t.tail));
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

        std::vector<std::size_t> counts;
        std::map<std::size_t, std::size_t> by_length;
        double length_sum = 0.0;
        for (auto key : paths.sorted_keys()) {
            const auto* e = paths.find(pair_first(key), pair_second(key));
            counts.push_back(e->paths.size());
            for (const auto& p : e->paths) {
                ++by_length[p.relations.size()];
                length_sum += static_cast<double>(p.relations.size());
            }
        }
        std::size_t per_triple = 0;
        for (const auto& t : graph.train())
            if (const auto* e = paths.find(t.head, t.tail)) per_triple += e->paths.size();
        std::sort(counts.begin(), counts.end());

        const std::size_t total = paths.num_paths();
        std::ostringstream s;
        s << "training pairs: " << keys.size() << '\n'
          << "pairs with paths: " << paths.num_pairs() << " ("
          << format_real(keys.empty() ? 0.0 : 100.0 * paths.num_pairs() / keys.size(), "%.2f")
          << "%)\n"
          << "paths: " << total << '\n';
        if (!counts.empty()) {
            s << "paths per covered pair: min " << counts.front() << ", median "
              << counts[counts.size() / 2] << ", mean "
              << format_real(static_cast<double>(total) / counts.size()) << ", max "
              << counts.back() << '\n';
        }
        s << "P (mean paths per training triple): "
          << format_real(graph.train().empty()
                             ? 0.0
                             : static_cast<double>(per_triple) / graph.train().size())
          << '\n'
          << "L (max path length): " << paths.max_length() << '\n'
          << "mean path length: " << format_real(total ? length_sum / total : 0.0) << '\n';
        for (const auto& [len, n] : by_length) s << "paths of length " << len << ": " << n << '\n';
        s << "path signatures: " << stats.num_signatures() << '\n'
          << "path-relation confidences: " << stats.size() << '\n';
        return s.str();
    }
};

// ---- train ----------------------------------------------------------------

struct TrainCmd {
    Dataset data;
    TrainConfig config;
    std::string paths_file, stats_file, out, compose = "add", activation = "identity",
                                             norm = "l1";
    bool no_path = false, no_reverse = false;

    void setup(CLI::App* app) {
        data.add_options(app);
        app->add_option("--paths", paths_file, "path set from `ptranse mine`");
        app->add_option("--stats", stats_file, "path-relation statistics (recorded only)");
        app->add_option("--compose", compose, "path composition")
            ->check(CLI::IsMember({"add", "mul", "rnn"}));
        app->add_option("--activation", activation, "RNN activation")
            ->check(CLI::IsMember({"identity", "tanh"}));
        app->add_option("--dim", config.dim, "embedding dimension")->check(CLI::PositiveNumber);
        app->add_option("--lr", config.learning_rate, "learning rate");
        app->add_option("--margin", config.margin, "hinge margin");
        app->add_option("--epochs", config.epochs, "passes over the training set");
        app->add_option("--max-len", config.max_path_len, "ignore longer mined paths")
            ->check(CLI::Range(std::size_t{kMinPathLength}, std::size_t{8}));
        app->add_option("--norm", norm, "dissimilarity")->check(CLI::IsMember({"l1", "l2"}));
        app->add_option("--seed", config.seed, "random seed");
        app->add_option("--threads", config.threads,
                        "update workers; 1 is deterministic, more is lock-free and not")
            ->check(CLI::PositiveNumber);
        app->add_option("--checkpoint-every", config.checkpoint_every, "epochs between checkpoints")
            ->check(CLI::PositiveNumber);
        app->add_option("--out", out, "checkpoint directory")->required();
        app->add_flag("--no-path", no_path, "train without the path loss");
        app->add_flag("--no-reverse", no_reverse,
                      "train without reverse relations (plain TransE; implies --no-path)");
    }

    void run(const CLI::App* app) {
        config.compose = parse_composition_kind(compose);
        config.activation = parse_activation(activation);
        config.norm = parse_dissimilarity(norm);
        config.use_reverse = !no_reverse;
        config.use_paths = !no_path && !no_reverse;
        config.validate();

        auto graph = data.load();
        if (config.use_reverse) graph.augment_reverse();

        cli::Manifest m;
        data.record(m);
        PathSet paths;
        if (config.use_paths) {
            if (paths_file.empty())
                throw Error("train needs --paths (run `ptranse mine` first) or --no-path");
            Dataset::require_file(paths_file, "path set", "mine");
            paths = restrict_length(read_path_set(paths_file), config.max_path_len);
            check_path_ids(paths, graph, paths_file);
            m.inputs.emplace_back("paths", paths_file);
        }
        if (!stats_file.empty()) {
            Dataset::require_file(stats_file, "path statistics", "mine");
            m.inputs.emplace_back("stats", stats_file);
        }

        fs::create_directories(out);
        std::ofstream log(fs::path(out) / "loss.tsv");
        log << "epoch\tloss\n";
        const auto model = train(graph, paths, config, fs::path(out),
                                 [&](const EpochStats& s, const Model&) {
                                     log << s.epoch << '\t' << format_real(s.loss, "%.10g")
                                         << '\n';
                                     if (s.epoch % config.checkpoint_every == 0)
                                         std::cerr << "epoch " << s.epoch << " loss "
                                                   << format_real(s.loss, "%.6g") << '\n';
                                 });
        (void)model;
        std::cout << "wrote " << (fs::path(out) / ("epoch_" + std::to_string(config.epochs) + ".emb")).string()
                  << '\n';
        finish(app, m, fs::path(out) / "manifest.txt");
    }
};

// ---- eval -----------------------------------------------------------------

struct EvalCmd {
    Dataset data;
    std::string task = "entity", emb, stage1_emb, paths_file, stats_file, mode = "ptranse",
                report, dump, split = "test";
    EvalConfig config;
    std::size_t max_len = 0;
    double threshold = MiningConfig{}.threshold;

    void setup(CLI::App* app) {
        data.add_options(app);
        app->add_option("--task", task, "entity or relation prediction")
            ->check(CLI::IsMember({"entity", "relation"}));
        app->add_option("--emb", emb, "trained embeddings from `ptranse train`")->required();
        app->add_option("--stage1-emb", stage1_emb,
                        "separate model for the first ranking stage (default: --emb)");
        app->add_option("--paths", paths_file, "path set from `ptranse mine`");
        app->add_option("--stats", stats_file, "path-relation statistics from `ptranse mine`");
        app->add_option("--rerank", config.rerank, "candidates re-scored with the full score");
        app->add_option("--mode", mode, "scoring configuration")
            ->check(CLI::IsMember({"ptranse", "transe", "transe+rev", "transe+rev+path",
                                   "ptranse-minus-path", "ptranse-minus-transe"}));
        app->add_option("--split", split, "split to rank")->check(CLI::IsMember({"test", "valid"}));
        app->add_option("--max-len", max_len,
                        "path length for pairs mined at query time (0: as in the path set)");
        app->add_option("--threshold", threshold, "reliability cutoff for query-time mining");
        app->add_option("--threads", config.threads, "query workers")->check(CLI::PositiveNumber);
        app->add_option("--hits", config.hits_n, "N for Hits@N (0: 10 entity, 1 relation)");
        app->add_flag("--include-reverse", config.include_reverse_relations,
                      "rank reverse relations as candidates too");
        app->add_option("--report", report, "report file")->required();
        app->add_option("--dump", dump, "per-query ranks (default: <report>.ranks.tsv)");
    }

    static Model load_checked(const std::string& file, const KnowledgeGraph& graph) {
        Dataset::require_file(file, "embedding file", "train");
        auto model = load_model(file);
        const auto& s = model.embeddings;
        if (s.num_entities() != graph.num_entities())
            throw Error("embedding file " + file + " has " + std::to_string(s.num_entities()) +
                        " entities but the dataset has " + std::to_string(graph.num_entities()) +
                        "; pass the same split files used for training");
        return model;
    }

    void run(const CLI::App* app) const {
        const auto score_mode = parse_score_mode(mode);
        const auto terms = score_terms(score_mode);
        auto graph = data.load();
        const std::size_t n_orig = graph.num_relations();

        cli::Manifest m;
        data.record(m);
        m.inputs.emplace_back("emb", emb);
        auto model = load_checked(emb, graph);
        if (model.embeddings.num_relations() == 2 * n_orig) {
            graph.augment_reverse();
        } else if (model.embeddings.num_relations() != n_orig) {
            throw Error("embedding file " + emb + " has " +
                        std::to_string(model.embeddings.num_relations()) +
                        " relations; the dataset has " + std::to_string(n_orig));
        } else if (terms.both_directions || terms.path) {
            throw Error("mode " + mode +
                        " needs reverse relations; the model was trained with --no-reverse");
        }

        std::optional<Model> stage1;
        if (!stage1_emb.empty()) {
            stage1 = load_checked(stage1_emb, graph);
            if (stage1->embeddings.num_relations() != graph.num_relations())
                throw Error("stage-1 model relation count does not match --emb");
            m.inputs.emplace_back("stage1-emb", stage1_emb);
        }

        PathSet paths;
        PathRelationStats stats;
        if (terms.path) {
            if (paths_file.empty() || stats_file.empty())
                throw Error("mode " + mode + " needs --paths and --stats (run `ptranse mine` first)");
            Dataset::require_file(paths_file, "path set", "mine");
            Dataset::require_file(stats_file, "path statistics", "mine");
            paths = read_path_set(paths_file);
            check_path_ids(paths, graph, paths_file);
            stats = read_path_stats(stats_file);
            m.inputs.emplace_back("paths", paths_file);
            m.inputs.emplace_back("stats", stats_file);
        }
        MiningConfig mining;
        mining.max_len = max_len ? max_len : std::max(paths.max_length(), kMinPathLength);
        mining.threshold = threshold;
        const PathLookup lookup = terms.path ? PathLookup(paths, graph, mining) : PathLookup(paths);

        const Scorer scorer(model, graph, lookup, stats, score_mode);
        std::optional<Scorer> first;
        if (stage1) first.emplace(*stage1, graph, lookup, stats, score_mode);

        const auto triples = split == "test" ? graph.test() : graph.valid();
        if (triples.empty()) throw Error("the " + split + " split is empty; pass --" + split);
        const auto result = evaluate(scorer, graph, parse_task(task), triples, config,
                                     first ? &*first : nullptr);

        write_report(report, result);
        write_rank_dump(dump.empty() ? report + ".ranks.tsv" : dump, result);
        std::cout << format_report(result);
        finish(app, m, report + ".manifest.txt");
    }
};

// ---- export ---------------------------------------------------------------

// Tab-separated vectors, one per line in id order, plus a header file
// carrying the shape and the composition settings.
void write_tsv(const fs::path& path, const DenseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    char buf[40];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            out << (j ? "\t" : "") << buf;
        }
        out << '\n';
    }
}

DenseMatrix read_tsv(const fs::path& path, std::size_t rows, std::size_t cols) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    DenseMatrix m(rows, cols);
    std::string line;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) throw ParseError(path.string(), i + 1, "missing row");
        std::istringstream fields(line);
        for (std::size_t j = 0; j < cols; ++j)
            if (!(fields >> m(i, j)))
                throw ParseError(path.string(), i + 1, "expected " + std::to_string(cols) + " values");
        double extra;
        if (fields >> extra) throw ParseError(path.string(), i + 1, "too many values");
    }
    if (std::getline(in, line) && !line.empty())
        throw ParseError(path.string(), rows + 1, "unexpected extra row");
    return m;
}

struct ExportCmd {
    std::string emb, import_dir, out;

    void setup(CLI::App* app) {
        auto* e = app->add_option("--emb", emb, "embedding file to export");
        auto* i = app->add_option("--import", import_dir, "exported directory to convert back");
        e->excludes(i);
        app->add_option("--out", out, "output directory (export) or embedding file (import)")
            ->required();
    }

    void run(const CLI::App* app) const {
        cli::Manifest m;
        if (!emb.empty()) {
            Dataset::require_file(emb, "embedding file", "train");
            const auto model = load_model(emb);
            m.inputs.emplace_back("emb", emb);
            const auto& s = model.embeddings;
            fs::create_directories(out);
            std::ofstream(fs::path(out) / "meta.txt")
                << "ptranse v1 " << s.num_entities() << ' ' << s.num_relations() << ' '
                << s.dim() << ' ' << to_string(s.norm) << ' '
                << to_string(model.composition.kind()) << ' '
                << to_string(model.composition.activation()) << '\n';
            write_tsv(fs::path(out) / "entity2vec.txt", s.entities);
            write_tsv(fs::path(out) / "relation2vec.txt", s.relations);
            if (model.composition.has_weight())
                write_tsv(fs::path(out) / "rnn_weight.txt", model.composition.weight());
            finish(app, m, fs::path(out) / "manifest.txt");
        } else if (!import_dir.empty()) {
            const fs::path dir(import_dir);
            Dataset::require_file((dir / "meta.txt").string(), "export header", "export");
            std::ifstream meta(dir / "meta.txt");
            std::string magic, version, norm, kind, activation;
            std::size_t ne = 0, nr = 0, k = 0;
            if (!(meta >> magic >> version >> ne >> nr >> k >> norm >> kind >> activation) ||
                magic != "ptranse" || version != "v1" || k == 0)
                throw Error("malformed export header: " + (dir / "meta.txt").string());
            Model model;
            model.embeddings.norm = parse_dissimilarity(norm);
            model.embeddings.entities = read_tsv(dir / "entity2vec.txt", ne, k);
            model.embeddings.relations = read_tsv(dir / "relation2vec.txt", nr, k);
            const auto compose_kind = parse_composition_kind(kind);
            if (compose_kind == CompositionKind::rnn) {
                model.composition = CompositionOp::rnn(read_tsv(dir / "rnn_weight.txt", k, 2 * k),
                                                       parse_activation(activation));
                m.inputs.emplace_back("rnn_weight", dir / "rnn_weight.txt");
            } else {
                model.composition = CompositionOp::make(compose_kind, k, 0);
            }
            for (const char* f : {"meta.txt", "entity2vec.txt", "relation2vec.txt"})
                m.inputs.emplace_back(f, dir / f);
            if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
            save_model(out, model);
            finish(app, m, out + ".manifest.txt");
        } else {
            throw Error("export needs --emb or --import");
        }
    }
};

// Expands "--config <file>" into ordinary arguments for every key the
// command line does not already set.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
    if (args.empty()) return args;
    const CLI::App* sub = app.get_subcommand_no_throw(args.front());
    if (!sub) return args;

    std::optional<std::string> file;
    std::vector<std::string> given;
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        if (a == "--config") {
            if (i + 1 >= args.size()) throw Error("--config needs a file");
            file = args[++i];
            continue;
        }
        if (a.rfind("--config=", 0) == 0) {
            file = a.substr(9);
            continue;
        }
        if (a.rfind("--", 0) == 0) given.push_back(a.substr(2, a.find('=') - 2));
        kept.push_back(a);
    }
    if (!file) return args;

    std::ifstream in(*file);
    if (!in) throw Error("cannot open config file: " + *file);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos || line[begin] == '#' || line[begin] == ';' ||
            line[begin] == '[')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(*file, number, "expected key=value");
        auto trim = [](std::string v) {
            const auto b = v.find_first_not_of(" \t\r");
            const auto e = v.find_last_not_of(" \t\r");
            v = b == std::string::npos ? "" : v.substr(b, e - b + 1);
            if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
                v = v.substr(1, v.size() - 2);
            return v;
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "config") continue;
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw ParseError(*file, number, "unknown option '" + key + "' for " + sub->get_name());
        if (std::find(given.begin(), given.end(), key) != given.end()) continue;
        if (opt->get_expected_min() == 0) {
            if (value == "true" || value == "1") kept.push_back("--" + key);
            else if (value != "false" && value != "0")
                throw ParseError(*file, number, "flag '" + key + "' expects true or false");
        } else if (!value.empty()) {
            kept.push_back("--" + key);
            kept.push_back(value);
        }
    }
    return kept;
}

// config_to_str without the --config entry itself.
std::string strip_config_line(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind("config=", 0) != 0) out += line + '\n';
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path-based translation embeddings for knowledge graph completion"};
    app.require_subcommand(1);

    IngestCmd ingest;
    MineCmd mine;
    TrainCmd train_cmd;
    EvalCmd eval;
    ExportCmd export_cmd;

    auto add = [&app](const char* name, const char* help, auto& cmd) {
        auto* sub = app.add_subcommand(name, help);
        sub->option_defaults()->always_capture_default();
        sub->add_option("--config", "key=value file; command-line flags override it");
        cmd.setup(sub);
        return sub;
    };
    auto* ingest_app = add("ingest", "load a dataset and write vocabularies and a summary", ingest);
    auto* mine_app = add("mine", "mine reliable relation paths for training pairs", mine);
    auto* train_app = add("train", "train embeddings", train_cmd);
    auto* eval_app = add("eval", "entity or relation prediction", eval);
    auto* export_app = add("export", "convert embeddings to or from TSV vectors", export_cmd);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(app, std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "ptranse: error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*ingest_app) ingest.run(ingest_app);
        else if (*mine_app) mine.run(mine_app);
        else if (*train_app) train_cmd.run(train_app);
        else if (*eval_app) eval.run(eval_app);
        else if (*export_app) export_cmd.run(export_app);
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::cerr << "ptranse: error: " << msg << '\n';
        return 1;
    }
    return 0;
}
