#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chronofact/chrono_time.hpp"
#include "chronofact/core.hpp"
#include "chronofact/tensor.hpp"

namespace chronofact {

struct EventEncoding {
  std::vector<double> cls;            // mean of the token rows
  Tensor tokens;                      // d x dim
  std::optional<std::vector<double>> date;  // pooled date tokens + positional encoding
  std::size_t dim = 0;
};

// Precomputed token rows keyed by (event id, token index). On disk:
// u8 version, u32 dim, u32 entries, then per entry {u32 id length, id bytes,
// u32 token index, u32 row}, then u32 row count and row data as float32.
// All integers and floats little-endian.
class EmbeddingTable {
 public:
  static constexpr std::uint8_t kVersion = 1;

  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  void put(const std::string& event_id, std::size_t token_index, std::span<const double> row);
  // nullptr when absent
  const std::vector<float>* find(const std::string& event_id, std::size_t token_index) const;

  void save(const std::string& path) const;
  static EmbeddingTable load(const std::string& path);

 private:
  std::size_t dim_;
  std::vector<std::vector<float>> rows_;
  std::map<std::pair<std::string, std::size_t>, std::size_t> index_;
};

enum class EncoderBackend : std::uint8_t { kToy, kExternal };

// Identifies a frozen token embedder. The same handle always maps the same
// event to the same encoding.
class EventEncoderHandle {
 public:
  static EventEncoderHandle toy(std::size_t dim, std::uint64_t seed);
  static EventEncoderHandle external(std::shared_ptr<const EmbeddingTable> table);

  EncoderBackend backend() const { return backend_; }
  std::string backend_id() const;
  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  const EmbeddingTable* table() const { return table_.get(); }

  TimeConfig time;

 private:
  EncoderBackend backend_ = EncoderBackend::kToy;
  std::size_t dim_ = 64;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const EmbeddingTable> table_;
};

// Unit-norm row for a plain token under the toy backend.
std::vector<double> toy_token_row(std::string_view token, std::size_t dim, std::uint64_t seed);
// Row for a year token: a shared date direction plus features of the
// normalized day offset of Jan 1 of that year; unit norm.
std::vector<double> toy_year_row(int year, std::size_t dim, std::uint64_t seed);

// One row per event token. The toy backend hashes tokens, except year tokens
// inside the recognized temporal expression, which encode their day offset.
// The external backend throws MissingEmbedding for unknown keys.
Tensor embed_tokens(const Event& event, const EventEncoderHandle& handle);

// Tokens that count as date tokens for pooling.
std::vector<std::size_t> date_token_indices(const Event& event, const TimeConfig& time = {});

// Mean of the token rows; independent of any reference day.
std::vector<double> encode_cls(const Event& event, const EventEncoderHandle& handle);

// reference_day must not exceed the event's start day when it is dated.
EventEncoding encode_event(const Event& event, const EventEncoderHandle& handle, DayIndex reference_day);

}  // namespace chronofact
