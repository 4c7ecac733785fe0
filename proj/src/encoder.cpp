#include "chronofact/encoder.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include "chronofact/error.hpp"
#include "chronofact/text.hpp"

namespace chronofact {
namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void normalize(std::vector<double>& v) {
  const double n = norm(v);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
}

// Years before this map to offset 0; the normalizer spans 300 years.
const DayIndex kToyEpoch = day_index(1800, 1, 1);
constexpr double kToySpanDays = 300.0 * 365.25;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw ValidationError("truncated embedding file");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void EmbeddingTable::put(const std::string& event_id, std::size_t token_index, std::span<const double> row) {
  if (row.size() != dim_) throw ShapeError("embedding row has wrong dimension");
  std::vector<float> r(row.begin(), row.end());
  auto key = std::make_pair(event_id, token_index);
  if (auto it = index_.find(key); it != index_.end()) {
    rows_[it->second] = std::move(r);
    return;
  }
  index_.emplace(std::move(key), rows_.size());
  rows_.push_back(std::move(r));
}

const std::vector<float>* EmbeddingTable::find(const std::string& event_id, std::size_t token_index) const {
  auto it = index_.find({event_id, token_index});
  return it == index_.end() ? nullptr : &rows_[it->second];
}

void EmbeddingTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write embedding file " + path);
  out.put(static_cast<char>(kVersion));
  put_u32(out, static_cast<std::uint32_t>(dim_));
  put_u32(out, static_cast<std::uint32_t>(index_.size()));
  for (const auto& [key, row] : index_) {
    put_u32(out, static_cast<std::uint32_t>(key.first.size()));
    out.write(key.first.data(), static_cast<std::streamsize>(key.first.size()));
    put_u32(out, static_cast<std::uint32_t>(key.second));
    put_u32(out, static_cast<std::uint32_t>(row));
  }
  put_u32(out, static_cast<std::uint32_t>(rows_.size()));
  for (const auto& r : rows_) {
    for (float f : r) put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
}

EmbeddingTable EmbeddingTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open embedding file " + path);
  const int version = in.get();
  if (version != kVersion) throw ValidationError("unsupported embedding file version");
  EmbeddingTable table(get_u32(in));
  const std::uint32_t entries = get_u32(in);
  std::vector<std::pair<std::pair<std::string, std::size_t>, std::size_t>> keys;
  keys.reserve(entries);
  for (std::uint32_t i = 0; i < entries; ++i) {
    std::string id(get_u32(in), '\0');
    if (!in.read(id.data(), static_cast<std::streamsize>(id.size()))) throw ValidationError("truncated embedding file");
    const std::size_t tok = get_u32(in);
    const std::size_t row = get_u32(in);
    keys.push_back({{std::move(id), tok}, row});
  }
  const std::uint32_t n_rows = get_u32(in);
  table.rows_.assign(n_rows, std::vector<float>(table.dim_));
  for (auto& r : table.rows_) {
    for (float& f : r) f = std::bit_cast<float>(get_u32(in));
  }
  for (auto& [key, row] : keys) {
    if (row >= n_rows) throw ValidationError("embedding index points past the row block");
    table.index_.emplace(std::move(key), row);
  }
  return table;
}

EventEncoderHandle EventEncoderHandle::toy(std::size_t dim, std::uint64_t seed) {
  if (dim < 4 || dim % 2 != 0) throw ConfigError("toy encoder dimension must be even and >= 4");
  EventEncoderHandle h;
  h.backend_ = EncoderBackend::kToy;
  h.dim_ = dim;
  h.seed_ = seed;
  return h;
}

EventEncoderHandle EventEncoderHandle::external(std::shared_ptr<const EmbeddingTable> table) {
  if (!table) throw ConfigError("external encoder needs an embedding table");
  if (table->dim() % 2 != 0) throw ConfigError("embedding dimension must be even");
  EventEncoderHandle h;
  h.backend_ = EncoderBackend::kExternal;
  h.dim_ = table->dim();
  h.table_ = std::move(table);
  return h;
}

std::string EventEncoderHandle::backend_id() const {
  return backend_ == EncoderBackend::kToy ? "toy" : "external";
}

std::vector<double> toy_token_row(std::string_view token, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(fnv1a(token, seed));
  std::vector<double> row(dim);
  for (double& x : row) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  normalize(row);
  return row;
}

std::vector<double> toy_year_row(int year, std::size_t dim, std::uint64_t seed) {
  std::vector<double> row = toy_token_row("<date>", dim, seed);
  for (double& x : row) x *= 0.6;
  const double t = std::clamp(static_cast<double>(first_day_of_year(year) - kToyEpoch) / kToySpanDays, 0.0, 1.0);
  row[0] = 2.0 * t - 1.0;
  row[1] = std::sin(2.0 * std::numbers::pi * 8.0 * t);
  row[2] = std::cos(2.0 * std::numbers::pi * 8.0 * t);
  row[3] = 0.5;
  normalize(row);
  return row;
}

std::vector<std::size_t> date_token_indices(const Event& event, const TimeConfig& time) {
  const auto tokens = event.tokens();
  if (auto m = find_temporal_expression(tokens, time)) return m->date_tokens;
  return {};
}

Tensor embed_tokens(const Event& event, const EventEncoderHandle& handle) {
  const auto tokens = event.tokens();
  if (tokens.empty()) throw ValidationError("event '" + event.id + "' has no tokens");
  const std::size_t dim = handle.dim();
  Tensor out(tokens.size(), dim);
  if (handle.backend() == EncoderBackend::kExternal) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto* row = handle.table()->find(event.id, i);
      if (!row) {
        throw MissingEmbedding("no embedding for event '" + event.id + "' token " + std::to_string(i));
      }
      std::copy(row->begin(), row->end(), out.row(i).begin());
    }
    return out;
  }
  std::vector<bool> is_date(tokens.size(), false);
  for (std::size_t i : date_token_indices(event, handle.time)) is_date[i] = true;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::vector<double> row;
    if (is_date[i] && tokens[i].size() == 4 && is_number(tokens[i])) {
      row = toy_year_row(std::stoi(tokens[i]), dim, handle.seed());
    } else {
      row = toy_token_row(to_lower(tokens[i]), dim, handle.seed());
    }
    std::copy(row.begin(), row.end(), out.row(i).begin());
  }
  return out;
}

namespace {

std::vector<double> mean_rows(const Tensor& rows) {
  std::vector<double> out(rows.cols(), 0.0);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t c = 0; c < rows.cols(); ++c) out[c] += rows(r, c);
  }
  const double inv_d = 1.0 / static_cast<double>(rows.rows());
  for (double& x : out) x *= inv_d;
  return out;
}

}  // namespace

std::vector<double> encode_cls(const Event& event, const EventEncoderHandle& handle) {
  return mean_rows(embed_tokens(event, handle));
}

EventEncoding encode_event(const Event& event, const EventEncoderHandle& handle, DayIndex reference_day) {
  if (event.time && reference_day > event.time->start_day()) {
    throw ValidationError("reference day is after the start of event '" + event.id + "'");
  }
  EventEncoding enc;
  enc.dim = handle.dim();
  enc.tokens = embed_tokens(event, handle);
  enc.cls = mean_rows(enc.tokens);

  if (event.time) {
    std::vector<double> date(enc.dim, 0.0);
    const auto idx = date_token_indices(event, handle.time);
    for (std::size_t i : idx) {
      for (std::size_t c = 0; c < enc.dim; ++c) date[c] += enc.tokens(i, c);
    }
    if (!idx.empty()) {
      for (double& x : date) x /= static_cast<double>(idx.size());
    }
    // Offsets past the cap saturate at the cap.
    const auto pos = TimelinePosition::clamped(event.time->start_day() - reference_day, handle.time.offset_cap);
    const auto pe = positional_encoding(pos, enc.dim, handle.time.time_scale);
    for (std::size_t c = 0; c < enc.dim; ++c) date[c] += pe[c];
    enc.date = std::move(date);
  }
  return enc;
}

}  // namespace chronofact
