#ifndef TWOTIME_GRID_IO_HPP
#define TWOTIME_GRID_IO_HPP

// CSV and PGM serialization of field grids. Files are written to a temporary
// name and renamed into place, so a failed run leaves no partial grid.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "twotime/field.hpp"

namespace twotime {

/// Extra `# key: value` header lines, written in the given order.
using GridMeta = std::vector<std::pair<std::string, std::string>>;

/// Header lines, then one line per row with `%.12e` values separated by
/// commas. NaN cells are written as `nan`.
std::string format_csv(const FieldGrid& grid, const GridMeta& meta);

/// Plain P2, maxval 65535, |value| scaled by the grid maximum. The top image
/// row is the highest row coordinate; NaN cells map to 0.
std::string format_pgm(const FieldGrid& grid, const std::string& comment);

/// Inverse of format_csv (metadata lines other than the axes are returned in
/// `meta` when non-null). Throws ParseError on malformed input.
FieldGrid parse_csv(const std::string& text, GridMeta* meta = nullptr);

/// Writes `contents` to `path` via `path.tmp` and a rename, creating parent
/// directories. Throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

/// `%.12e`, with `nan` for NaN.
std::string format_value(double v);

} // namespace twotime

#endif
