// SPDX-License-Identifier: Apache-2.0
#include "hrx/nn/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "hrx/errors.hpp"
#include "hrx/hash.hpp"

namespace hrx::nn {

namespace {

constexpr char kMagic[4] = {'H', 'R', 'X', 'M'};
constexpr unsigned char kVersion = 1;

void put_f32(std::vector<unsigned char>& out, float v) {
    auto u = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(u >> (8 * i)));
}

float get_f32(const unsigned char* p) {
    std::uint32_t u = 0;
    for (int i = 0; i < 4; ++i) u |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return std::bit_cast<float>(u);
}

}  // namespace

std::vector<unsigned char> serialize_checkpoint(const Checkpoint& ckpt) {
    nlohmann::json header;
    header["kind"] = ckpt.kind;
    header["config_hash"] = ckpt.config_hash;
    auto& manifest = header["tensors"] = nlohmann::json::array();
    std::size_t offset = 0;
    for (const auto& [name, t] : ckpt.params) {
        manifest.push_back({{"name", name}, {"shape", t.shape()}, {"offset", offset}, {"trainable", t.requires_grad()}});
        offset += t.size() * 4;
    }
    header["data_bytes"] = offset;

    std::vector<unsigned char> out(std::begin(kMagic), std::end(kMagic));
    out.push_back(kVersion);
    const std::string line = header.dump() + "\n";
    out.insert(out.end(), line.begin(), line.end());
    out.reserve(out.size() + offset);
    for (const auto& [name, t] : ckpt.params) {
        for (Real v : t.data()) put_f32(out, static_cast<float>(v));
    }
    return out;
}

Checkpoint deserialize_checkpoint(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 5 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw LoadError("checkpoint: bad magic (expected HRXM)");
    }
    if (bytes[4] != kVersion) throw LoadError("checkpoint: unsupported version " + std::to_string(bytes[4]));
    auto nl = std::find(bytes.begin() + 5, bytes.end(), '\n');
    if (nl == bytes.end()) throw LoadError("checkpoint: header line is not terminated");
    const std::string line(bytes.begin() + 5, nl);
    const std::size_t data_start = static_cast<std::size_t>(nl - bytes.begin()) + 1;

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("checkpoint: malformed header: ") + e.what());
    }

    Checkpoint ckpt;
    try {
        ckpt.kind = header.at("kind").get<std::string>();
        ckpt.config_hash = header.at("config_hash").get<std::string>();
        const auto data_bytes = header.at("data_bytes").get<std::size_t>();
        if (bytes.size() - data_start != data_bytes) {
            throw LoadError("checkpoint: data section is " + std::to_string(bytes.size() - data_start) +
                            " bytes, header declares " + std::to_string(data_bytes));
        }
        std::size_t expected_offset = 0;
        for (const auto& entry : header.at("tensors")) {
            const auto name = entry.at("name").get<std::string>();
            const auto shape = entry.at("shape").get<Shape>();
            const auto offset = entry.at("offset").get<std::size_t>();
            const std::size_t n = shape_size(shape);
            if (offset != expected_offset || offset + 4 * n > data_bytes) {
                throw LoadError("checkpoint: tensor '" + name + "' has inconsistent offset " + std::to_string(offset));
            }
            std::vector<Real> data(n);
            const unsigned char* p = bytes.data() + data_start + offset;
            for (std::size_t i = 0; i < n; ++i) data[i] = static_cast<Real>(get_f32(p + 4 * i));
            ckpt.params.add(name, Tensor(shape, std::move(data), entry.value("trainable", true)));
            expected_offset = offset + 4 * n;
        }
        if (expected_offset != data_bytes) throw LoadError("checkpoint: manifest does not cover the data section");
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("checkpoint: bad manifest: ") + e.what());
    }
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    const auto bytes = serialize_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw LoadError("failed writing '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open checkpoint '" + path.string() + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_checkpoint(bytes);
}

std::uint64_t checkpoint_hash(const Checkpoint& ckpt) { return fnv1a64(serialize_checkpoint(ckpt)); }

}  // namespace hrx::nn
