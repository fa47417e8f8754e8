#include "pmr/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pmr/constants.hpp"
#include "pmr/errors.hpp"

namespace pmr::io {

namespace {

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += quote_if_needed(row[i]);
  }
  out += '\n';
}

double parse_real(const std::string& text, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidParameter(column, "not a number: '" + text + "'");
  }
}

int parse_int(const std::string& text, const std::string& column) {
  const double v = parse_real(text, column);
  if (v != static_cast<int>(v)) throw InvalidParameter(column, "not an integer: '" + text + "'");
  return static_cast<int>(v);
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  append_row(out, table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw InvalidParameter("csv", "row width differs from header");
    append_row(out, row);
  }
  return out;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  const auto text = to_csv(table);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw InvalidParameter("out", "cannot write " + path.string());
  file << text;
  if (!file) throw InvalidParameter("out", "write failed for " + path.string());
}

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw InvalidParameter("csv", "unterminated quoted field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  if (records.empty()) throw InvalidParameter("csv", "missing header row");
  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != table.header.size()) {
      throw InvalidParameter("csv", "row " + std::to_string(i) + " has " + std::to_string(records[i].size()) +
                                        " fields, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[i]));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw InvalidParameter("lines", "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_csv(buffer.str());
}

std::vector<TransitionLine> read_line_list(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const std::vector<std::string> expected{"M_from", "n_from", "M_to", "n_to", "delta_e_J", "freq_hz"};
  if (table.header != expected) {
    throw InvalidParameter("lines", path.string() + ": header must be M_from,n_from,M_to,n_to,delta_e_J,freq_hz");
  }
  std::vector<TransitionLine> lines;
  for (const auto& row : table.rows) {
    TransitionLine line;
    line.from = {HalfInteger::from_value(parse_real(row[0], "M_from"), "M_from"), parse_int(row[1], "n_from")};
    line.to = {HalfInteger::from_value(parse_real(row[2], "M_to"), "M_to"), parse_int(row[3], "n_to")};
    line.delta_e = parse_real(row[4], "delta_e_J");
    line.frequency_hz = parse_real(row[5], "freq_hz");
    line.frequency_rad = constants::two_pi * line.frequency_hz;
    lines.push_back(line);
  }
  return lines;
}

CsvTable level_table(const std::vector<EnergyLevel>& levels, double hbar_omega) {
  CsvTable t{{"M", "n", "energy_J", "energy_hbar_omega"}, {}};
  for (const auto& l : levels) {
    t.rows.push_back({l.m.to_string(), std::to_string(l.n), format_real(l.energy), format_real(l.energy / hbar_omega)});
  }
  return t;
}

CsvTable line_table(const std::vector<TransitionLine>& lines) {
  CsvTable t{{"M_from", "n_from", "M_to", "n_to", "delta_e_J", "freq_hz"}, {}};
  for (const auto& l : lines) {
    t.rows.push_back({l.from.m.to_string(), std::to_string(l.from.n), l.to.m.to_string(), std::to_string(l.to.n),
                      format_real(l.delta_e), format_real(l.frequency_hz)});
  }
  return t;
}

CsvTable crossing_table(const std::vector<CrossingPoint>& crossings) {
  CsvTable t{{"gbar", "M_a", "n_a", "M_b", "n_b", "energy_J"}, {}};
  for (const auto& c : crossings) {
    t.rows.push_back({format_real(c.gbar), c.level_a.m.to_string(), std::to_string(c.level_a.n),
                      c.level_b.m.to_string(), std::to_string(c.level_b.n), format_real(c.energy)});
  }
  return t;
}

}  // namespace pmr::io
