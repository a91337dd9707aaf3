#include "sig/digest.hpp"

#include <openssl/evp.h>

#include <vector>

#include "sig/error.hpp"
#include "sig/image.hpp"

namespace sig {

Sha256 sha256(std::span<const std::uint8_t> bytes) {
    Sha256 out{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
        throw Error(ErrorKind::IoError, "SHA-256 computation failed");
    }
    return out;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kHex[] = "0123456789abcdef";
    const Sha256 d = sha256(bytes);
    std::string out;
    out.reserve(64);
    for (std::uint8_t b : d) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xF]);
    }
    return out;
}

std::string sha256_file_hex(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::uint64_t derive_pad_seed(std::uint64_t global_seed, std::string_view cover_id, std::uint32_t cell_index) {
    std::vector<std::uint8_t> buf;
    buf.reserve(8 + cover_id.size() + 1 + 4);
    for (int i = 7; i >= 0; --i) buf.push_back(static_cast<std::uint8_t>(global_seed >> (8 * i)));
    buf.insert(buf.end(), cover_id.begin(), cover_id.end());
    buf.push_back(0);
    for (int i = 3; i >= 0; --i) buf.push_back(static_cast<std::uint8_t>(cell_index >> (8 * i)));
    const Sha256 d = sha256(buf);
    std::uint64_t seed = 0;
    for (int i = 0; i < 8; ++i) seed = (seed << 8) | d[static_cast<std::size_t>(i)];
    return seed;
}

}  // namespace sig
