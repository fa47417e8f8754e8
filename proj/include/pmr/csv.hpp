#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pmr/spectroscopy.hpp"
#include "pmr/types.hpp"

namespace pmr::io {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Scientific notation with 17 significant digits ("%.16e").
std::string format_real(double value);

/// RFC-4180 text with LF line endings; fields containing separators or
/// quotes are quoted.
std::string to_csv(const CsvTable& table);

/// Throws InvalidParameter("out") when the file cannot be written.
void write_csv(const CsvTable& table, const std::filesystem::path& path);

CsvTable parse_csv(const std::string& text);

/// Throws InvalidParameter naming the path when unreadable or malformed.
CsvTable read_csv(const std::filesystem::path& path);

/// Reads a line list in the `lines.csv` schema
/// (M_from,n_from,M_to,n_to,delta_e_J,freq_hz).
std::vector<TransitionLine> read_line_list(const std::filesystem::path& path);

CsvTable level_table(const std::vector<EnergyLevel>& levels, double hbar_omega);
CsvTable line_table(const std::vector<TransitionLine>& lines);
CsvTable crossing_table(const std::vector<CrossingPoint>& crossings);

}  // namespace pmr::io
