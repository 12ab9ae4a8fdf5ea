#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace lak {

// Throws IoError when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

// Writes through a sibling temp file and renames, so readers never observe a
// partially written file.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace lak
