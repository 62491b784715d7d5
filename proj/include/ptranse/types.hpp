#pragma once
// Core identifiers and the triple type shared by every module.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ptranse {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
    EntityId head = 0;
    RelationId relation = 0;
    EntityId tail = 0;

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        std::uint64_t x = static_cast<std::uint32_t>(t.head);
        x = x * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(t.relation);
        x = x * 0xBF58476D1CE4E5B9ULL ^ static_cast<std::uint32_t>(t.tail);
        x ^= x >> 31;
        return static_cast<std::size_t>(x * 0x94D049BB133111EBULL);
    }
};

// Packs an ordered entity pair into a single map key.
constexpr std::uint64_t pair_key(EntityId a, EntityId b) noexcept {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}
constexpr EntityId pair_first(std::uint64_t key) noexcept {
    return static_cast<EntityId>(key >> 32);
}
constexpr EntityId pair_second(std::uint64_t key) noexcept {
    return static_cast<EntityId>(key & 0xFFFFFFFFULL);
}

// Which component of a triple a corruption or a query replaces.
enum class Slot { head, relation, tail };

std::string_view to_string(Slot slot);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace ptranse
