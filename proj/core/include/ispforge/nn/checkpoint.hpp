#pragma once

#include <string>

#include "ispforge/nn/tensor.hpp"

namespace ispforge::nn {

/// Checkpoint container: magic "NNCK", u32 version, u64 manifest length,
/// manifest JSON (tensor names/shapes plus a caller-supplied metadata
/// object), then raw little-endian f32 tensor data in manifest order.
struct Checkpoint {
    ParamSet params;
    std::string metadata_json; // caller-defined JSON object, "{}" if absent
};

/// `metadata_json` must be a JSON object (serialized); it is stored verbatim.
void save_params(const ParamSet& params, const std::string& path,
                 const std::string& metadata_json = "{}");

Checkpoint load_params(const std::string& path);

/// Loads into an existing ParamSet; every tensor in `params` must be present
/// in the file with an identical shape, otherwise a CompatibilityError names
/// the offending tensor. Returns the metadata JSON.
std::string load_params_into(ParamSet& params, const std::string& path);

} // namespace ispforge::nn
