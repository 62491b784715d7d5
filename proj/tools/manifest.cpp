#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

#include "ptranse/types.hpp"

namespace ptranse::cli {

std::string git_blob_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    const auto size = std::filesystem::file_size(path);

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                 EVP_MD_CTX_free);
    if (!ctx || !EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr))
        throw Error("SHA-1 unavailable");
    const std::string header = "blob " + std::to_string(size);
    EVP_DigestUpdate(ctx.get(), header.c_str(), header.size() + 1);  // includes the NUL
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);

    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string format_manifest(const Manifest& manifest) {
    std::ostringstream out;
    out << "# ptranse " << manifest.command << '\n';
    out << manifest.options;
    if (!manifest.options.empty() && manifest.options.back() != '\n') out << '\n';
    for (const auto& [label, path] : manifest.inputs)
        out << "# input " << label << ' ' << git_blob_hash(path) << ' ' << path.string() << '\n';
    return out.str();
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
    const auto text = format_manifest(manifest);
    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest: " + path.string());
    out << text;
}

}  // namespace ptranse::cli
