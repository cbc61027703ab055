#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace lfs {

// FNV-1a over raw bytes. Used for artifact fingerprints and run-manifest
// output hashes (reproducibility checks, not security).
uint64_t fnv1a64(std::span<const unsigned char> bytes);
uint64_t fnv1a64(std::string_view text);

// splitmix64 finalizer; combined with fnv1a64 to derive per-stage seeds from
// a master seed: derive_seed(master, "fit-axis:f0").
uint64_t splitmix64(uint64_t x);
uint64_t derive_seed(uint64_t master_seed, std::string_view stage);

std::string hex64(uint64_t v);

// FNV-1a over a whole file's bytes. Throws IoError if unreadable.
uint64_t hash_file(const std::filesystem::path& path);

} // namespace lfs
