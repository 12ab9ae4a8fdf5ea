#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lak/dataflow.hpp"
#include "lak/raw_store.hpp"

namespace lak::dataflow {

// Rows of a raw-store range scan, keyed by row key.
PartitionedDataset<std::string, storage::RawRow> from_store(const storage::RawStore& store, std::string_view table,
                                                            std::string_view start_key, std::string_view end_key,
                                                            std::size_t num_partitions);

PartitionedDataset<std::string, storage::RawRow> from_store(const storage::RawStore& store, std::string_view table,
                                                            std::size_t num_partitions);

using FrameValue = std::variant<std::monostate, double, std::int64_t, std::string>;
using FrameRecord = std::vector<FrameValue>;  // frame column order; monostate = null

// Rows of a frame file keyed by the text column `key_column`.
PartitionedDataset<std::string, FrameRecord> from_frame(const std::filesystem::path& path,
                                                        std::string_view key_column, std::size_t num_partitions);

}  // namespace lak::dataflow
