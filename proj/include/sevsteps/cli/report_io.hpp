#pragma once

// CSV tables, run manifests and text outputs.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sevsteps/error_lab.hpp"

namespace sevsteps::cli {

/// Shortest round-trip-safe decimal: 17 significant digits.
std::string format_number(double value);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const Table& table);

/// Columns k,N_k,uniform_err,uniform_hw,pointwise_err,pointwise_hw,M,p,seed.
Table error_table(const ErrorReport& report);

void write_text(const std::filesystem::path& file, const std::string& text);

struct Manifest {
  std::string command;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> outputs;
  std::vector<std::string> results;
};

std::string render_manifest(const Manifest& manifest);

}  // namespace sevsteps::cli
