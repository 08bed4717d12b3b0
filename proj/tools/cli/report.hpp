#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cli/config.hpp"

namespace wlab::cli {

using Cell = std::variant<std::string, double, std::int64_t, std::uint64_t, bool>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Figure {
  std::string name;  // file stem
  std::string svg;
};

struct Report {
  std::vector<Table> tables;
  std::vector<std::pair<std::string, Cell>> notes;  // run-level facts, e.g. the excursion estimate
  std::vector<Figure> figures;
  bool pass = true;
};

// Deterministic text form: integers as is, doubles with 12 significant digits.
std::string format_cell(const Cell& c);

// Provenance shared by every output file; wall-clock time is added to run.json only.
json output_metadata(const RunConfig& c);

std::string to_csv(const Table& t, const json& meta);
json to_json(const Report& r, const json& meta);

// 640 x 480, 40 bins over center +- 5 sd, with the N(center, sd^2) density on top when sd > 0.
std::string histogram_svg(const std::vector<double>& samples, double center, double predicted_sd,
                          const std::string& title, const json& meta);

// Writes the tables (CSV or one JSON file), the figures and run.json; returns the paths written.
std::vector<std::string> write_outputs(const RunConfig& c, const Report& r, double wall_seconds, int threads);

}  // namespace wlab::cli
