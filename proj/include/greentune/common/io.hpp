#pragma once

#include <string>

namespace greentune {

/// Writes `content` to a temporary sibling of `path` and renames it into
/// place, so readers never observe a partial file. Throws DataError.
void write_file_atomic(const std::string& path, const std::string& content);

/// Whole file as a string. Throws DataError when it cannot be read.
std::string read_text_file(const std::string& path);

}  // namespace greentune
