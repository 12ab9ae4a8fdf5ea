#include "lak/frame.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "binio.hpp"
#include "lak/error.hpp"
#include "lak/hash.hpp"

namespace lak::storage {
namespace {

constexpr std::string_view kMagic = "LAF1";
constexpr std::size_t kTrailer = 8;  // u32 footer_length + magic

class CountingFile {
 public:
  explicit CountingFile(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open frame file '" + path.string() + "'");
    in_.seekg(0, std::ios::end);
    size_ = static_cast<std::uint64_t>(in_.tellg());
  }

  std::string read(std::uint64_t offset, std::uint64_t n) {
    if (offset > size_ || n > size_ - offset) {
      throw CorruptFileError("frame file '" + path_.string() + "' addresses bytes past its end");
    }
    std::string buf(n, '\0');
    in_.seekg(static_cast<std::streamoff>(offset));
    in_.read(buf.data(), static_cast<std::streamsize>(n));
    if (!in_) throw IoError("short read on frame file '" + path_.string() + "'");
    bytes_read_ += n;
    return buf;
  }

  [[nodiscard]] std::uint64_t size() const { return size_; }
  [[nodiscard]] std::uint64_t bytes_read() const { return bytes_read_; }
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::uint64_t size_ = 0;
  std::uint64_t bytes_read_ = 0;
};

void encode_chunk(const Column& col, std::string& out) {
  detail::ByteWriter w(out);
  const std::size_t rows = col.size();
  if (!col.nulls.empty() && col.nulls.size() != rows) {
    throw InvalidArgument("column '" + col.name + "' null flags do not match its row count");
  }
  w.str(col.name);
  w.u8(static_cast<std::uint8_t>(col.kind()));
  w.u64(rows);
  std::string bitmap((rows + 7) / 8, '\0');
  for (std::size_t i = 0; i < rows; ++i) {
    if (col.is_null(i)) bitmap[i / 8] = static_cast<char>(static_cast<unsigned char>(bitmap[i / 8]) | (1U << (i % 8)));
  }
  w.bytes(bitmap);
  switch (col.kind()) {
    case ColumnKind::Float64:
      for (std::size_t i = 0; i < rows; ++i) w.f64(col.is_null(i) ? 0.0 : col.f64()[i]);
      break;
    case ColumnKind::Int64:
      for (std::size_t i = 0; i < rows; ++i) w.i64(col.is_null(i) ? 0 : col.i64()[i]);
      break;
    case ColumnKind::Text:
      for (std::size_t i = 0; i < rows; ++i) w.str(col.is_null(i) ? std::string_view{} : col.text()[i]);
      break;
  }
}

Column decode_chunk(std::string_view bytes) {
  detail::ByteReader r(bytes, "frame chunk");
  Column col;
  col.name = r.str();
  const std::uint8_t kind = r.u8();
  const std::uint64_t rows = r.u64();
  if (kind > 2) throw CorruptFileError("unknown column kind " + std::to_string(kind) + " in chunk '" + col.name + "'");
  if (rows > bytes.size() * 8) throw CorruptFileError("implausible row count in chunk '" + col.name + "'");
  const std::string_view bitmap = r.bytes((rows + 7) / 8);
  bool any_null = false;
  std::vector<std::uint8_t> nulls(rows);
  for (std::uint64_t i = 0; i < rows; ++i) {
    nulls[i] = (static_cast<unsigned char>(bitmap[i / 8]) >> (i % 8)) & 1U;
    any_null |= nulls[i] != 0;
  }
  if (any_null) col.nulls = std::move(nulls);
  switch (static_cast<ColumnKind>(kind)) {
    case ColumnKind::Float64: {
      std::vector<double> v(rows);
      for (auto& x : v) x = r.f64();
      col.values = std::move(v);
      break;
    }
    case ColumnKind::Int64: {
      std::vector<std::int64_t> v(rows);
      for (auto& x : v) x = r.i64();
      col.values = std::move(v);
      break;
    }
    case ColumnKind::Text: {
      std::vector<std::string> v(rows);
      for (auto& x : v) x = r.str();
      col.values = std::move(v);
      break;
    }
  }
  if (!r.done()) throw CorruptFileError("trailing bytes in chunk '" + col.name + "'");
  return col;
}

FrameFooter parse_footer(CountingFile& file) {
  const auto& path = file.path();
  if (file.size() < kMagic.size() + kTrailer) throw CorruptFileError("frame file '" + path.string() + "' is too short");
  const std::string trailer = file.read(file.size() - kTrailer, kTrailer);
  if (std::string_view(trailer).substr(4) != kMagic) {
    throw CorruptFileError("frame file '" + path.string() + "' has no trailing magic");
  }
  const std::uint32_t footer_len = detail::ByteReader(trailer).u32();
  if (footer_len > file.size() - kTrailer - kMagic.size()) {
    throw CorruptFileError("frame file '" + path.string() + "' has a bad footer length");
  }
  const std::uint64_t footer_off = file.size() - kTrailer - footer_len;
  const std::string footer_bytes = file.read(footer_off, footer_len);

  detail::ByteReader r(footer_bytes, "frame footer");
  FrameFooter footer;
  footer.file_size = file.size();
  const std::uint32_t n = r.u32();
  if (static_cast<std::uint64_t>(n) * 29 > footer_len) throw CorruptFileError("frame footer chunk count is corrupt");
  std::uint64_t expected_offset = kMagic.size();
  for (std::uint32_t i = 0; i < n; ++i) {
    ChunkInfo c;
    c.name = r.str();
    const std::uint8_t kind = r.u8();
    if (kind > 2) throw CorruptFileError("unknown column kind in frame footer");
    c.kind = static_cast<ColumnKind>(kind);
    c.offset = r.u64();
    c.length = r.u64();
    c.checksum = r.u64();
    if (c.offset != expected_offset || c.length > footer_off - c.offset) {
      throw CorruptFileError("frame footer addresses an invalid chunk");
    }
    expected_offset = c.offset + c.length;
    footer.chunks.push_back(c);
  }
  if (expected_offset != footer_off) throw CorruptFileError("frame chunks do not tile the file");
  footer.total_rows = r.u64();
  footer.checksum = r.u64();
  if (!r.done()) throw CorruptFileError("trailing bytes in frame footer");
  return footer;
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Float64: return "f64";
    case ColumnKind::Int64: return "i64";
    case ColumnKind::Text: return "text";
  }
  return "?";
}

std::size_t Column::size() const {
  return std::visit([](const auto& v) { return v.size(); }, values);
}

const Column* ColumnTable::find(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Column& ColumnTable::at(std::string_view name) const {
  if (const Column* c = find(name)) return *c;
  throw NotFoundError("no column '" + std::string(name) + "'");
}

std::vector<std::string> ColumnTable::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

std::string encode_frame(const ColumnTable& table) {
  const std::size_t rows = table.rows();
  std::set<std::string_view> names;
  for (const auto& c : table.columns) {
    if (c.size() != rows) throw InvalidArgument("column '" + c.name + "' has a different row count");
    if (!names.insert(c.name).second) throw InvalidArgument("duplicate column '" + c.name + "'");
  }

  std::string out(kMagic);
  std::vector<ChunkInfo> infos;
  Fnv1a64 file_hash;
  for (const auto& col : table.columns) {
    std::string chunk;
    encode_chunk(col, chunk);
    ChunkInfo info;
    info.name = col.name;
    info.kind = col.kind();
    info.offset = out.size();
    info.length = chunk.size();
    info.checksum = fnv1a64(chunk);
    file_hash.update(chunk);
    infos.push_back(info);
    out += chunk;
  }

  std::string footer;
  detail::ByteWriter fw(footer);
  fw.u32(static_cast<std::uint32_t>(infos.size()));
  for (const auto& c : infos) {
    fw.str(c.name);
    fw.u8(static_cast<std::uint8_t>(c.kind));
    fw.u64(c.offset);
    fw.u64(c.length);
    fw.u64(c.checksum);
  }
  fw.u64(rows);
  fw.u64(file_hash.digest());

  detail::ByteWriter w(out);
  w.bytes(footer);
  w.u32(static_cast<std::uint32_t>(footer.size()));
  w.bytes(kMagic);
  return out;
}

void write_frame(const ColumnTable& table, const std::filesystem::path& path) {
  const std::string bytes = encode_frame(table);
  // Write to a sibling and rename so readers never see a half-written file.
  const auto tmp = std::filesystem::path(path).concat(".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write frame file '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

ColumnTable read_frame(const std::filesystem::path& path, const std::optional<std::vector<std::string>>& projection,
                       FrameReadStats* stats) {
  CountingFile file(path);
  if (file.read(0, kMagic.size()) != kMagic) throw CorruptFileError("frame file '" + path.string() + "' has no magic");
  FrameFooter footer = parse_footer(file);

  ColumnTable table;
  if (!projection) {
    Fnv1a64 file_hash;
    for (auto& info : footer.chunks) {
      const std::string chunk = file.read(info.offset, info.length);
      file_hash.update(chunk);
      if (fnv1a64(chunk) != info.checksum) {
        throw CorruptFileError("checksum mismatch in frame file '" + path.string() + "'");
      }
      table.columns.push_back(decode_chunk(chunk));
      if (table.columns.back().name != info.name || table.columns.back().kind() != info.kind) {
        throw CorruptFileError("frame chunk header disagrees with footer");
      }
    }
    if (file_hash.digest() != footer.checksum) {
      throw CorruptFileError("checksum mismatch in frame file '" + path.string() + "'");
    }
  } else {
    std::vector<std::size_t> picked;
    std::vector<std::string> available;
    for (const auto& info : footer.chunks) available.push_back(info.name);
    for (const auto& want : *projection) {
      const auto it = std::find(available.begin(), available.end(), want);
      if (it == available.end()) {
        std::string list;
        for (const auto& a : available) list += (list.empty() ? "" : ", ") + a;
        throw NotFoundError("no column '" + want + "' in frame; available: " + list);
      }
      picked.push_back(static_cast<std::size_t>(it - available.begin()));
    }
    for (const std::size_t idx : picked) {
      const auto& info = footer.chunks[idx];
      const std::string chunk = file.read(info.offset, info.length);
      if (fnv1a64(chunk) != info.checksum) {
        throw CorruptFileError("checksum mismatch in frame file '" + path.string() + "' (column '" + info.name + "')");
      }
      table.columns.push_back(decode_chunk(chunk));
    }
  }
  for (const auto& c : table.columns) {
    if (c.size() != footer.total_rows) throw CorruptFileError("chunk '" + c.name + "' row count disagrees with footer");
  }
  if (stats) {
    stats->bytes_read = file.bytes_read();
    stats->file_size = file.size();
  }
  return table;
}

FrameFooter read_footer(const std::filesystem::path& path) {
  CountingFile file(path);
  if (file.read(0, kMagic.size()) != kMagic) throw CorruptFileError("frame file '" + path.string() + "' has no magic");
  return parse_footer(file);
}

ColumnTable labeled_frame(std::span<const catalog::FeatureDef> layout, std::string_view target_name,
                          std::span<const catalog::LabeledRow> rows, std::span<const std::string> keys,
                          std::string_view key_name) {
  if (!keys.empty() && keys.size() != rows.size()) throw InvalidArgument("key count does not match row count");
  ColumnTable table;
  if (!keys.empty()) table.columns.push_back({std::string(key_name), std::vector<std::string>(keys.begin(), keys.end()), {}});
  for (std::size_t f = 0; f < layout.size(); ++f) {
    Column col;
    col.name = layout[f].name;
    if (layout[f].kind == catalog::FeatureKind::Categorical) {
      std::vector<std::int64_t> v;
      v.reserve(rows.size());
      for (const auto& r : rows) v.push_back(static_cast<std::int64_t>(r.features.at(f)));
      col.values = std::move(v);
    } else {
      std::vector<double> v;
      v.reserve(rows.size());
      for (const auto& r : rows) v.push_back(r.features.at(f));
      col.values = std::move(v);
    }
    table.columns.push_back(std::move(col));
  }
  for (const auto& r : rows) {
    if (r.features.size() != layout.size()) {
      throw InvalidArgument("row has " + std::to_string(r.features.size()) + " features, layout has " +
                            std::to_string(layout.size()));
    }
  }
  std::vector<double> target;
  target.reserve(rows.size());
  for (const auto& r : rows) target.push_back(r.target);
  table.columns.push_back({std::string(target_name), std::move(target), {}});
  return table;
}

std::vector<catalog::LabeledRow> labeled_rows(const ColumnTable& table, std::span<const catalog::FeatureDef> layout,
                                              std::string_view target_name) {
  std::vector<catalog::LabeledRow> rows(table.rows());
  for (auto& r : rows) r.features.resize(layout.size());
  for (std::size_t f = 0; f < layout.size(); ++f) {
    const Column& col = table.at(layout[f].name);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].features[f] = col.kind() == ColumnKind::Int64 ? static_cast<double>(col.i64()[i]) : col.f64().at(i);
    }
  }
  const Column& target = table.at(target_name);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].target = target.f64()[i];
  return rows;
}

}  // namespace lak::storage
