#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdec/autoencoder.hpp"
#include "sdec/clustering.hpp"
#include "sdec/embed.hpp"
#include "sdec/metrics.hpp"
#include "sdec/refine.hpp"

namespace sdec {

// Byte layouts are documented in docs/formats.md. All integers and floats are
// little-endian regardless of host.

inline constexpr std::uint16_t kEmbeddingFormatVersion = 1;
inline constexpr std::uint16_t kCheckpointFormatVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderSize = 15;

enum class EmbeddingKind : std::uint8_t { vectors = 0, sequences = 1 };

struct EmbeddingFileHeader {
  std::uint16_t version = kEmbeddingFormatVersion;
  EmbeddingKind kind = EmbeddingKind::vectors;
  std::uint32_t count = 0;
  std::uint32_t dim = 0;
};

std::array<std::uint8_t, kEmbeddingHeaderSize> encode_header(const EmbeddingFileHeader& h);

struct EmbeddingFile {
  EmbeddingFileHeader header;
  Matrix vectors;                       // kind 0
  std::vector<TokenSequence> sequences; // kind 1, all tokens unmasked
};

// Values are stored as 32-bit floats. Sequences store only their unmasked
// tokens.
void save_embeddings(const std::string& path, const Matrix& vectors);
void save_sequences(const std::string& path, std::span<const TokenSequence> sequences);
EmbeddingFile load_embeddings(const std::string& path);
// load_embeddings restricted to kind 0.
Matrix load_vectors(const std::string& path);

struct Checkpoint {
  AutoencoderParams params;
  std::optional<ClusterModel> model;
  std::uint64_t config_hash = 0;
};

void save_checkpoint(const std::string& path, const AutoencoderParams& params,
                     const ClusterModel* model, std::uint64_t config_hash);

struct LoadedCheckpoint {
  Checkpoint checkpoint;
  bool hash_mismatch = false;
};

LoadedCheckpoint load_checkpoint(const std::string& path,
                                 std::optional<std::uint64_t> expected_hash = std::nullopt);

// One integer per line; a non-numeric first line is treated as a header.
// Labels outside [0, k) are rejected when k is given.
Labels load_labels(const std::string& path, std::optional<std::size_t> k = std::nullopt);
void save_labels(const std::string& path, const Labels& labels);

void save_history(const std::string& path, std::span<const HistoryEntry> history);
std::vector<HistoryEntry> load_history(const std::string& path);

void save_refine_log(const std::string& path, std::span<const Reassignment> log);

// {"acc":..,"nmi":..,"ari":..,"mapping":[..]}
std::string metrics_to_json(const MetricsReport& report);

}  // namespace sdec
