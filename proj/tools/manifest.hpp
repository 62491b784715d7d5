#pragma once
// Run manifests: the subcommand's effective options as key=value lines
// (loadable again through --config) followed by content hashes of every
// input file as comment lines.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ptranse::cli {

// SHA-1 of "blob <size>\0<content>", i.e. what `git hash-object` prints.
std::string git_blob_hash(const std::filesystem::path& path);

struct Manifest {
    std::string command;
    std::string options;  // key=value lines
    std::vector<std::pair<std::string, std::filesystem::path>> inputs;  // (label, path)
};

std::string format_manifest(const Manifest& manifest);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace ptranse::cli
