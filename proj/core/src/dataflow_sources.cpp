#include "lak/dataflow_sources.hpp"

#include "lak/frame.hpp"

namespace lak::dataflow {

PartitionedDataset<std::string, storage::RawRow> from_store(const storage::RawStore& store, std::string_view table,
                                                            std::string_view start_key, std::string_view end_key,
                                                            std::size_t num_partitions) {
  auto rows = store.scan_range(table, start_key, end_key).rows();
  std::vector<std::pair<std::string, storage::RawRow>> records;
  records.reserve(rows.size());
  for (auto& r : std::move(rows)) {
    std::string key = r.row_key;
    records.emplace_back(std::move(key), std::move(r));
  }
  return PartitionedDataset<std::string, storage::RawRow>::from_records(std::move(records), num_partitions,
                                                                        "store:" + std::string(table));
}

PartitionedDataset<std::string, storage::RawRow> from_store(const storage::RawStore& store, std::string_view table,
                                                            std::size_t num_partitions) {
  auto rows = store.scan_all(table).rows();
  std::vector<std::pair<std::string, storage::RawRow>> records;
  records.reserve(rows.size());
  for (auto& r : std::move(rows)) {
    std::string key = r.row_key;
    records.emplace_back(std::move(key), std::move(r));
  }
  return PartitionedDataset<std::string, storage::RawRow>::from_records(std::move(records), num_partitions,
                                                                        "store:" + std::string(table));
}

PartitionedDataset<std::string, FrameRecord> from_frame(const std::filesystem::path& path, std::string_view key_column,
                                                        std::size_t num_partitions) {
  if (!std::filesystem::exists(path)) throw NotFoundError("frame file '" + path.string() + "' does not exist");
  const storage::ColumnTable table = storage::read_frame(path);
  const storage::Column& key = table.at(key_column);
  if (key.kind() != storage::ColumnKind::Text) {
    throw InvalidArgument("key column '" + std::string(key_column) + "' is not a text column");
  }
  std::vector<std::pair<std::string, FrameRecord>> records;
  records.reserve(table.rows());
  for (std::size_t i = 0; i < table.rows(); ++i) {
    FrameRecord rec;
    rec.reserve(table.columns.size());
    for (const auto& col : table.columns) {
      if (col.is_null(i)) {
        rec.emplace_back(std::monostate{});
        continue;
      }
      switch (col.kind()) {
        case storage::ColumnKind::Float64: rec.emplace_back(col.f64()[i]); break;
        case storage::ColumnKind::Int64: rec.emplace_back(col.i64()[i]); break;
        case storage::ColumnKind::Text: rec.emplace_back(col.text()[i]); break;
      }
    }
    records.emplace_back(key.text()[i], std::move(rec));
  }
  return PartitionedDataset<std::string, FrameRecord>::from_records(std::move(records), num_partitions,
                                                                    "frame:" + path.filename().string());
}

}  // namespace lak::dataflow
