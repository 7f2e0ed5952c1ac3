#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace pdp {

/// 32-bit FNV-1a over raw bytes. Used for subword bucket hashing.
std::uint32_t fnv1a32(std::string_view bytes);

/// 64-bit FNV-1a, used for artifact content hashes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 14695981039346656037ull);

std::uint64_t hash_file(const std::filesystem::path& path);

std::string hex64(std::uint64_t value);

/// splitmix64 finaliser; mixes (master, stream) into an independent seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

}  // namespace pdp
