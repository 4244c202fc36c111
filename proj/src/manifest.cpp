#include "breakfront/manifest.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <sstream>

#include "breakfront/model.hpp"
#include "json.hpp"

namespace breakfront {

namespace {

// Compact SHA-256, FIPS 180-4.
struct Sha256 {
    uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                     0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    uint64_t length = 0;
    std::array<uint8_t, 64> block{};
    size_t fill = 0;

    static uint32_t rotr(uint32_t v, int s) { return (v >> s) | (v << (32 - s)); }

    void compress(const uint8_t* p) {
        static const uint32_t k[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
            0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
            0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
            0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
            0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
            0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
            0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
            0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
        uint32_t w[64];
        for (int i = 0; i < 16; ++i) {
            w[i] = (uint32_t(p[4 * i]) << 24) | (uint32_t(p[4 * i + 1]) << 16) |
                   (uint32_t(p[4 * i + 2]) << 8) | uint32_t(p[4 * i + 3]);
        }
        for (int i = 16; i < 64; ++i) {
            const uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
        uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int i = 0; i < 64; ++i) {
            const uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const uint32_t ch = (e & f) ^ (~e & g);
            const uint32_t t1 = hh + s1 + ch + k[i] + w[i];
            const uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const uint32_t t2 = s0 + maj;
            hh = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
        h[5] += f;
        h[6] += g;
        h[7] += hh;
    }

    void update(const uint8_t* data, size_t len) {
        length += len;
        while (len > 0) {
            const size_t take = std::min(len, block.size() - fill);
            std::memcpy(block.data() + fill, data, take);
            fill += take;
            data += take;
            len -= take;
            if (fill == block.size()) {
                compress(block.data());
                fill = 0;
            }
        }
    }

    std::string hex() {
        const uint64_t bits = length * 8;
        uint8_t pad = 0x80;
        update(&pad, 1);
        const uint8_t zero = 0;
        while (fill != 56) update(&zero, 1);
        uint8_t len_be[8];
        for (int i = 0; i < 8; ++i) len_be[i] = uint8_t(bits >> (56 - 8 * i));
        update(len_be, 8);
        std::ostringstream out;
        for (uint32_t v : h) {
            for (int i = 3; i >= 0; --i) {
                static const char* digits = "0123456789abcdef";
                out << digits[(v >> (8 * i + 4)) & 0xf] << digits[(v >> (8 * i)) & 0xf];
            }
        }
        return out.str();
    }
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    Sha256 hash;
    hash.update(reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size());
    return hash.hex();
}

std::string sha256_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot open file '" + path + "' for digest");
    Sha256 hash;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        hash.update(reinterpret_cast<const uint8_t*>(buf), static_cast<size_t>(in.gcount()));
    }
    return hash.hex();
}

std::string RunManifest::to_json(int indent) const {
    nlohmann::ordered_json doc;
    doc["command"] = command;
    doc["argv"] = argv;
    doc["params"] = nlohmann::ordered_json::parse(params_json.empty() ? "{}" : params_json);
    doc["seed"] = seed;
    doc["version"] = version;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [path, digest] : input_digests) inputs[path] = digest;
    doc["input_digests"] = inputs;
    nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
    for (const auto& [path, digest] : output_digests) outputs[path] = digest;
    doc["output_digests"] = outputs;
    doc["wall_seconds"] = wall_seconds;
    return doc.dump(indent);
}

RunManifest manifest_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    RunManifest m;
    m.command = doc.at("command").get<std::string>();
    m.argv = doc.at("argv").get<std::vector<std::string>>();
    m.params_json = doc.at("params").dump();
    m.seed = doc.at("seed").get<uint64_t>();
    m.version = doc.value("version", "");
    for (const auto& [path, digest] : doc.at("input_digests").items()) {
        m.input_digests.emplace_back(path, digest.get<std::string>());
    }
    for (const auto& [path, digest] : doc.at("output_digests").items()) {
        m.output_digests.emplace_back(path, digest.get<std::string>());
    }
    m.wall_seconds = doc.value("wall_seconds", 0.0);
    return m;
}

}  // namespace breakfront
