#include "cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wlab/quadrature.hpp"

#ifndef WLAB_VERSION
#define WLAB_VERSION "unknown"
#endif

namespace wlab::cli {

namespace {

std::string num(double v, const char* f = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return json(format_cell(Cell(v)));
          // round-trip through the CSV text so both formats carry the same digits
          return json(std::stod(num(v)));
        } else {
          return json(v);
        }
      },
      c);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string format_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) return v;
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, double>) return std::isnan(v) ? "nan" : num(v);
        else return std::to_string(v);
      },
      c);
}

json output_metadata(const RunConfig& c) {
  const QuadratureSettings& q = default_quadrature();
  json m;
  m["version"] = WLAB_VERSION;
  m["command"] = to_string(c.command);
  m["config_hash"] = hex64(config_hash(c));
  m["seed"] = c.seed;
  m["quadrature"] = {{"tolerance", q.tolerance}, {"min_nodes", q.min_nodes}, {"max_nodes", q.max_nodes}};
  m["config"] = echo_config(c);
  return m;
}

std::string to_csv(const Table& t, const json& meta) {
  std::ostringstream out;
  out << "# version: " << meta["version"].get<std::string>() << "\n";
  out << "# command: " << meta["command"].get<std::string>() << "\n";
  out << "# config_hash: " << meta["config_hash"].get<std::string>() << "\n";
  out << "# seed: " << meta["seed"].get<std::uint64_t>() << "\n";
  out << "# quadrature: " << meta["quadrature"].dump() << "\n";
  out << "# config: " << meta["config"].dump() << "\n";
  for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << t.columns[k];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << csv_escape(format_cell(row[k]));
    out << "\n";
  }
  return out.str();
}

json to_json(const Report& r, const json& meta) {
  json j;
  j["metadata"] = meta;
  j["pass"] = r.pass;
  json notes = json::object();
  for (const auto& [k, v] : r.notes) notes[k] = cell_json(v);
  j["notes"] = notes;
  json tables = json::object();
  for (const auto& t : r.tables) {
    json rows = json::array();
    for (const auto& row : t.rows) {
      json o = json::object();
      for (std::size_t k = 0; k < row.size(); ++k) o[t.columns[k]] = cell_json(row[k]);
      rows.push_back(o);
    }
    tables[t.name] = rows;
  }
  j["tables"] = tables;
  return j;
}

std::string histogram_svg(const std::vector<double>& samples, double center, double predicted_sd,
                          const std::string& title, const json& meta) {
  constexpr int kW = 640, kH = 480, kBins = 40;
  constexpr double left = 60, right = 20, top = 40, bottom = 50;
  const double pw = kW - left - right, ph = kH - top - bottom;

  double sd = predicted_sd;
  if (!(sd > 0.0)) {
    double s2 = 0.0;
    for (double v : samples) s2 += (v - center) * (v - center);
    sd = samples.size() > 1 ? std::sqrt(s2 / static_cast<double>(samples.size() - 1)) : 0.0;
    if (!(sd > 0.0)) sd = 1.0;
  }
  const double lo = center - 5.0 * sd, hi = center + 5.0 * sd, bw = (hi - lo) / kBins;
  std::vector<std::size_t> counts(kBins, 0);
  for (double v : samples) {
    if (v < lo || v >= hi) continue;
    counts[std::min<std::size_t>(kBins - 1, static_cast<std::size_t>((v - lo) / bw))]++;
  }
  const double total = std::max<double>(1.0, static_cast<double>(samples.size()));
  auto dens = [&](std::size_t c) { return static_cast<double>(c) / (total * bw); };
  double ymax = 0.0;
  for (auto c : counts) ymax = std::max(ymax, dens(c));
  if (predicted_sd > 0.0) ymax = std::max(ymax, 1.0 / (std::sqrt(2.0 * std::numbers::pi) * predicted_sd));
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.1;
  auto px = [&](double x) { return left + (x - lo) / (hi - lo) * pw; };
  auto py = [&](double y) { return top + ph - y / ymax * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW
    << " " << kH << "\">\n";
  s << "<!-- version " << meta.value("version", std::string()) << " config_hash "
    << meta.value("config_hash", std::string()) << " seed " << meta.value("seed", std::uint64_t{0}) << " quadrature "
    << meta.value("quadrature", json::object()).dump() << " -->\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << title << "</text>\n";
  for (int b = 0; b < kBins; ++b) {
    const double y = dens(counts[static_cast<std::size_t>(b)]);
    s << "<rect x=\"" << num(px(lo + b * bw), "%.2f") << "\" y=\"" << num(py(y), "%.2f") << "\" width=\""
      << num(pw / kBins, "%.2f") << "\" height=\"" << num(top + ph - py(y), "%.2f")
      << "\" fill=\"#8fb3d9\" stroke=\"#3b6ea5\" stroke-width=\"0.5\"/>\n";
  }
  if (predicted_sd > 0.0) {
    s << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
    for (int k = 0; k <= 200; ++k) {
      const double x = lo + (hi - lo) * k / 200.0, u = (x - center) / predicted_sd;
      const double y = std::exp(-0.5 * u * u) / (std::sqrt(2.0 * std::numbers::pi) * predicted_sd);
      s << (k ? " " : "") << num(px(x), "%.2f") << "," << num(py(y), "%.2f");
    }
    s << "\"/>\n";
  }
  s << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  for (int k = -5; k <= 5; ++k) {
    const double x = center + k * sd;
    s << "<text x=\"" << num(px(x), "%.2f") << "\" y=\"" << top + ph + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << num(x, "%.3g") << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::string> write_outputs(const RunConfig& c, const Report& r, double wall_seconds, int threads) {
  namespace fs = std::filesystem;
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  const json meta = output_metadata(c);
  const std::string stem = to_string(c.command);
  std::vector<std::string> written;
  if (c.format == Format::Csv) {
    for (std::size_t k = 0; k < r.tables.size(); ++k) {
      const fs::path p = dir / (k == 0 ? stem + ".csv" : stem + "_" + r.tables[k].name + ".csv");
      write_file(p, to_csv(r.tables[k], meta));
      written.push_back(p.string());
    }
    if (!r.notes.empty()) {
      Table notes{"notes", {"key", "value"}, {}};
      for (const auto& [k, v] : r.notes) notes.rows.push_back({k, format_cell(v)});
      const fs::path p = dir / (stem + "_notes.csv");
      write_file(p, to_csv(notes, meta));
      written.push_back(p.string());
    }
  } else {
    const fs::path p = dir / (stem + ".json");
    write_file(p, to_json(r, meta).dump(2) + "\n");
    written.push_back(p.string());
  }
  for (const auto& fig : r.figures) {
    const fs::path p = dir / (fig.name + ".svg");
    write_file(p, fig.svg);
    written.push_back(p.string());
  }
  json run = meta;
  run["wall_clock_seconds"] = wall_seconds;
  run["threads"] = threads;
  run["pass"] = r.pass;
  run["outputs"] = written;
  write_file(dir / "run.json", run.dump(2) + "\n");
  written.push_back((dir / "run.json").string());
  return written;
}

}  // namespace wlab::cli
