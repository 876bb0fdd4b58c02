#include "groundbench/digest.hpp"

#include <array>
#include <stdexcept>

#include <openssl/evp.h>

namespace groundbench {

namespace {

std::array<unsigned char, 32> sha256_raw(std::string_view data) {
    std::array<unsigned char, 32> out{};
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
              EVP_DigestUpdate(ctx, data.data(), data.size()) == 1 &&
              EVP_DigestFinal_ex(ctx, out.data(), &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok || len != 32) throw std::runtime_error("SHA-256 digest failed");
    return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    static const char* hex = "0123456789abcdef";
    auto raw = sha256_raw(data);
    std::string out;
    out.reserve(64);
    for (unsigned char b : raw) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 0xf]);
    }
    return out;
}

std::uint64_t sha256_prefix64(std::string_view data) {
    auto raw = sha256_raw(data);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | raw[static_cast<std::size_t>(i)];
    return v;
}

}  // namespace groundbench
