#pragma once

#include <filesystem>
#include <string>

#include "dubline/unfold.hpp"

namespace dubline {

/// Binary container:
///   "DUBL" | u32 version | u32 header length | JSON header |
///   little-endian float32 tensors in parameter order | u32 CRC32
/// The CRC covers every byte before it.
std::string serialize_checkpoint(const UnfoldedModel& model);
UnfoldedModel deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const UnfoldedModel& model, const std::filesystem::path& path);
UnfoldedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace dubline
