#pragma once
// Small graphs and scratch directories shared by the test binaries.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "ptranse/kg_store.hpp"

namespace testing_support {

using ptranse::KnowledgeGraph;
using ptranse::Triple;
using ptranse::Vocabulary;

// Graph over ids 0..n-1 with generated names "e<i>" / "r<j>".
inline KnowledgeGraph make_graph(std::size_t n_entities, std::size_t n_relations,
                                 std::vector<Triple> train, std::vector<Triple> valid = {},
                                 std::vector<Triple> test = {}) {
    Vocabulary ents, rels;
    for (std::size_t i = 0; i < n_entities; ++i) ents.get_or_add("e" + std::to_string(i));
    for (std::size_t j = 0; j < n_relations; ++j) rels.get_or_add("r" + std::to_string(j));
    return KnowledgeGraph(std::move(ents), std::move(rels), std::move(train), std::move(valid),
                          std::move(test));
}

inline std::vector<Triple> random_triples(std::mt19937_64& rng, std::size_t n_entities,
                                          std::size_t n_relations, std::size_t count) {
    std::uniform_int_distribution<int> e(0, static_cast<int>(n_entities) - 1);
    std::uniform_int_distribution<int> r(0, static_cast<int>(n_relations) - 1);
    std::vector<Triple> out;
    for (std::size_t i = 0; i < count; ++i) {
        Triple t{e(rng), r(rng), e(rng)};
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
    return out;
}

inline KnowledgeGraph random_graph(std::mt19937_64& rng, std::size_t max_entities = 20,
                                   std::size_t max_relations = 5) {
    std::uniform_int_distribution<std::size_t> ne(2, max_entities), nr(1, max_relations);
    const std::size_t n = ne(rng), m = nr(rng);
    std::uniform_int_distribution<std::size_t> density(n, 4 * n);
    return make_graph(n, m, random_triples(rng, n, m, density(rng)));
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("ptranse_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing_support
