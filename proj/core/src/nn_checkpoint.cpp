#include "ispforge/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ispforge/errors.hpp"

namespace ispforge::nn {

namespace {

constexpr char kMagic[4] = {'N', 'N', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint container assumes a little-endian host");

nlohmann::json read_manifest(std::ifstream& in, const std::string& path) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError(path + ": not a checkpoint file (bad magic)");
    std::uint32_t version = 0;
    if (!in.read(reinterpret_cast<char*>(&version), 4))
        throw IoError(path + ": truncated checkpoint header");
    if (version != kVersion)
        throw IoError(path + ": unsupported checkpoint version " + std::to_string(version));
    std::uint64_t manifest_len = 0;
    if (!in.read(reinterpret_cast<char*>(&manifest_len), 8))
        throw IoError(path + ": truncated checkpoint header");
    if (manifest_len > (1ull << 30)) throw IoError(path + ": implausible manifest length");
    std::string manifest_text(manifest_len, '\0');
    if (!in.read(manifest_text.data(), static_cast<std::streamsize>(manifest_len)))
        throw IoError(path + ": truncated checkpoint manifest");
    try {
        return nlohmann::json::parse(manifest_text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": invalid checkpoint manifest: " + e.what());
    }
}

Shape shape_from_json(const nlohmann::json& arr) {
    if (!arr.is_array() || arr.size() != 4) throw IoError("checkpoint: tensor shape must be 4 ints");
    return Shape{arr[0].get<int>(), arr[1].get<int>(), arr[2].get<int>(), arr[3].get<int>()};
}

} // namespace

void save_params(const ParamSet& params, const std::string& path,
                 const std::string& metadata_json) {
    nlohmann::json manifest;
    manifest["version"] = kVersion;
    try {
        manifest["metadata"] = nlohmann::json::parse(metadata_json);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("save_params: metadata is not valid JSON: ") + e.what());
    }
    nlohmann::json tensors = nlohmann::json::array();
    for (const auto& e : params.entries()) {
        tensors.push_back({{"name", e.name},
                           {"shape", {e.value.shape.n, e.value.shape.c, e.value.shape.h, e.value.shape.w}}});
    }
    manifest["tensors"] = tensors;
    const std::string manifest_text = manifest.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&kVersion), 4);
    const std::uint64_t manifest_len = manifest_text.size();
    out.write(reinterpret_cast<const char*>(&manifest_len), 8);
    out.write(manifest_text.data(), static_cast<std::streamsize>(manifest_text.size()));
    for (const auto& e : params.entries())
        out.write(reinterpret_cast<const char*>(e.value.data.data()),
                  static_cast<std::streamsize>(sizeof(float) * e.value.size()));
    if (!out) throw IoError("write failed: " + path);
}

Checkpoint load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    const nlohmann::json manifest = read_manifest(in, path);

    Checkpoint ck;
    ck.metadata_json = manifest.value("metadata", nlohmann::json::object()).dump();
    for (const auto& t : manifest.at("tensors")) {
        const std::string name = t.at("name").get<std::string>();
        const Shape shape = shape_from_json(t.at("shape"));
        Tensor& dst = ck.params.add(name, shape);
        in.read(reinterpret_cast<char*>(dst.data.data()),
                static_cast<std::streamsize>(sizeof(float) * dst.size()));
        if (static_cast<std::size_t>(in.gcount()) != sizeof(float) * dst.size())
            throw IoError(path + ": truncated tensor data for " + name);
    }
    return ck;
}

std::string load_params_into(ParamSet& params, const std::string& path) {
    Checkpoint ck = load_params(path);
    for (auto& e : params.entries()) {
        if (!ck.params.has(e.name))
            throw CompatibilityError(path + ": checkpoint is missing tensor " + e.name);
        const auto& src = ck.params.entry(e.name);
        if (!(src.value.shape == e.value.shape))
            throw CompatibilityError(path + ": tensor " + e.name + " has shape " +
                                     src.value.shape.str() + ", expected " + e.value.shape.str());
        e.value = src.value;
    }
    return ck.metadata_json;
}

} // namespace ispforge::nn
