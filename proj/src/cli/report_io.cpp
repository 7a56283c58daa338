#include "sevsteps/cli/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sevsteps::cli {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string to_csv(const Table& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw std::logic_error("to_csv: ragged table");
    line(row);
  }
  return out;
}

Table error_table(const ErrorReport& report) {
  Table t;
  t.header = {"k", "N_k", "uniform_err", "uniform_hw", "pointwise_err", "pointwise_hw", "M", "p", "seed"};
  for (const auto& r : report.rows) {
    t.rows.push_back({format_number(r.k), std::to_string(r.steps), format_number(r.uniform.value),
                      format_number(r.uniform.half_width), format_number(r.pointwise.value),
                      format_number(r.pointwise.half_width), std::to_string(r.paths), format_number(r.p),
                      std::to_string(r.seed)});
  }
  return t;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + file.string());
}

std::string render_manifest(const Manifest& m) {
  std::ostringstream out;
  out << "command = " << m.command << "\n";
  out << "version = " << m.version << "\n";
  out << "wall_time_seconds = " << format_number(m.wall_seconds) << "\n";
  out << "\n[config]\n";
  for (const auto& [key, value] : m.config) out << key << " = " << value << "\n";
  out << "\n[outputs]\n";
  for (const auto& o : m.outputs) out << o << "\n";
  out << "\n[results]\n";
  for (const auto& r : m.results) out << r << "\n";
  return out.str();
}

}  // namespace sevsteps::cli
