#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "afslab/common.hpp"

namespace afslab {

/// Matrix CSV with an optional header row; numbers are written with 17
/// significant digits so doubles survive a round trip exactly.
void write_csv(const std::filesystem::path& path, const Matrix& m,
               const std::vector<std::string>& header = {});

struct CsvContent {
    std::vector<std::string> header;  // empty when the file has none
    Matrix values;
};

enum class CsvHeader { autodetect, require, none };

/// Reads a CSV written by write_csv. Auto-detection treats a non-numeric
/// first row as the header; files with purely numeric headers (channel
/// indices) need CsvHeader::require.
CsvContent read_csv(const std::filesystem::path& path,
                    CsvHeader header = CsvHeader::autodetect);

std::string format_double(double v);

/// Plain-text PGM (P2): values are min-max mapped to 0..255; NaN cells are
/// rendered black.
void write_pgm(const std::filesystem::path& path, const Matrix& values);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace afslab
