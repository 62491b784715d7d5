#include "ptranse/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace ptranse {

std::string_view to_string(Dissimilarity norm) {
    return norm == Dissimilarity::l1 ? "l1" : "l2";
}

Dissimilarity parse_dissimilarity(std::string_view text) {
    if (text == "l1" || text == "L1") return Dissimilarity::l1;
    if (text == "l2" || text == "L2") return Dissimilarity::l2;
    throw Error("unknown dissimilarity: " + std::string(text));
}

EmbeddingStore init_embeddings(std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                               std::uint64_t seed, Dissimilarity norm) {
    if (dim == 0) throw Error("embedding dimension must be positive");
    if (n_entities == 0 || n_relations == 0) throw Error("embedding counts must be positive");
    EmbeddingStore store;
    store.norm = norm;
    store.entities = DenseMatrix(n_entities, dim);
    store.relations = DenseMatrix(n_relations, dim);

    const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-bound, bound);
    for (auto* m : {&store.entities, &store.relations}) {
        for (auto& v : m->data()) v = coord(rng);
        for (std::size_t i = 0; i < m->rows(); ++i) project_row(m->row(i));
    }
    return store;
}

double dissimilarity(Dissimilarity norm, std::span<const double> diff) {
    double acc = 0.0;
    if (norm == Dissimilarity::l1) {
        for (double d : diff) acc += std::fabs(d);
        return acc;
    }
    for (double d : diff) acc += d * d;
    return std::sqrt(acc);
}

double energy_direct(const EmbeddingStore& store, const Triple& triple) {
    auto h = store.entity(triple.head);
    auto r = store.relation(triple.relation);
    auto t = store.entity(triple.tail);
    double acc = 0.0;
    if (store.norm == Dissimilarity::l1) {
        for (std::size_t j = 0; j < h.size(); ++j) acc += std::fabs(h[j] + r[j] - t[j]);
        return acc;
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
        const double d = h[j] + r[j] - t[j];
        acc += d * d;
    }
    return std::sqrt(acc);
}

std::vector<double> compose_path(const EmbeddingStore& store, const CompositionOp& op,
                                 std::span<const RelationId> path) {
    std::vector<VectorView> rows;
    rows.reserve(path.size());
    for (RelationId r : path) rows.push_back(store.relation(r));
    return compose(op, rows);
}

double energy_path(const EmbeddingStore& store, const CompositionOp& op,
                   std::span<const RelationId> path, RelationId relation) {
    auto p = compose_path(store, op, path);
    auto r = store.relation(relation);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= r[j];
    return dissimilarity(store.norm, p);
}

bool project_row(std::span<double> row) {
    double sq = 0.0;
    for (double v : row) sq += v * v;
    if (sq <= 1.0 + 1e-12) return false;
    const double scale = 1.0 / std::sqrt(sq);
    for (double& v : row) v *= scale;
    return true;
}

void project_norms(EmbeddingStore& store) {
    for (auto* m : {&store.entities, &store.relations})
        for (std::size_t i = 0; i < m->rows(); ++i) project_row(m->row(i));
}

double max_row_norm(const EmbeddingStore& store) {
    double best = 0.0;
    for (const auto* m : {&store.entities, &store.relations}) {
        for (std::size_t i = 0; i < m->rows(); ++i) {
            double sq = 0.0;
            for (double v : m->row(i)) sq += v * v;
            best = std::max(best, std::sqrt(sq));
        }
    }
    return best;
}

namespace {

void write_rows(std::ostream& out, const DenseMatrix& m) {
    char buf[40];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = m.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", row[j]);
            if (j) out << ' ';
            out << buf;
        }
        out << '\n';
    }
}

void read_rows(std::istream& in, DenseMatrix& m, const std::filesystem::path& path) {
    for (auto& v : m.data())
        if (!(in >> v)) throw Error("truncated embedding file: " + path.string());
}

}  // namespace

void save_model(const std::filesystem::path& path, const Model& model) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model: " + path.string());
    const auto& s = model.embeddings;
    out << "ptranse v1 " << s.num_entities() << ' ' << s.num_relations() << ' ' << s.dim() << ' '
        << to_string(s.norm) << ' ' << to_string(model.composition.kind()) << '\n';
    write_rows(out, s.entities);
    write_rows(out, s.relations);
    if (model.composition.has_weight()) {
        out << "rnn " << to_string(model.composition.activation()) << '\n';
        write_rows(out, model.composition.weight());
    }
    if (!out) throw Error("write failed: " + path.string());
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model: " + path.string());
    std::string magic, version, norm, kind;
    std::size_t ne = 0, nr = 0, k = 0;
    if (!(in >> magic >> version >> ne >> nr >> k >> norm >> kind) || magic != "ptranse")
        throw Error("not a ptranse embedding file: " + path.string());
    if (version != "v1") throw Error("unsupported embedding format version: " + version);
    if (k == 0) throw Error("embedding dimension must be positive: " + path.string());

    Model model;
    model.embeddings.norm = parse_dissimilarity(norm);
    model.embeddings.entities = DenseMatrix(ne, k);
    model.embeddings.relations = DenseMatrix(nr, k);
    read_rows(in, model.embeddings.entities, path);
    read_rows(in, model.embeddings.relations, path);

    const auto compose_kind = parse_composition_kind(kind);
    if (compose_kind == CompositionKind::rnn) {
        std::string tag, activation;
        if (!(in >> tag >> activation) || tag != "rnn")
            throw Error("missing RNN weight block: " + path.string());
        DenseMatrix w(k, 2 * k);
        read_rows(in, w, path);
        model.composition = CompositionOp::rnn(std::move(w), parse_activation(activation));
    } else {
        model.composition = CompositionOp::make(compose_kind, k, 0);
    }
    return model;
}

}  // namespace ptranse
