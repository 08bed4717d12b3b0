#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "wlab/ensemble.hpp"

namespace wlab::cli {

using json = nlohmann::ordered_json;

// Schema violation; `field` is the dotted path of the offending key ("" for syntax errors).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : "field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class Command { Analytics, Simulate, Resolvent, Field, QForm, HsCheck, TruncateDemo };
const char* to_string(Command c);
std::optional<Command> parse_command(std::string_view name);

enum class Format { Csv, Json };

struct ProfileConfig {
  Symmetry symmetry = Symmetry::RealSymmetric;
  double sigma = 1.0;
  std::optional<double> sigma1;  // diagonal scale; sqrt(2) sigma (real) or sigma (hermitian) when unset
  std::string law = "gaussian";
  std::string diag_law = "gaussian";
  std::vector<std::pair<std::size_t, std::string>> row_laws;

  [[nodiscard]] EnsembleProfile build(std::size_t n) const;
};

struct Tolerances {
  double identity_abs = 1e-12;   // analytics: closed-form identities
  double variance_rel = 0.10;    // simulate: |raw - predicted| / predicted
  double zero_variance = 0.1;    // simulate: bound on raw_var when the prediction is 0
  double skew = 0.15;
  double kurtosis = 0.3;
  double normality_min_var = 0.1;  // normality is checked only above this residual variance
  double correlation = 0.08;
  std::pair<double, double> slope_var{-1.25, -0.75};
  std::pair<double, double> slope_bias{-1.4, -0.6};
  std::pair<double, double> slope_master{-1.4, -0.6};
  double field_rel = 0.15;
  double qform_rel = 0.05;
  double qform_zero = 1e-12;
  double hs_abs = 1e-3;
  double repair_se = 3.0;
};

struct RunConfig {
  Command command = Command::Simulate;
  ProfileConfig profile;
  std::string f = "monomial:2";
  std::size_t n = 256;
  std::vector<std::size_t> ns;        // command default when empty
  std::vector<std::size_t> replicas;  // one value, or one per N
  std::uint64_t seed = 7;
  std::vector<cplx> z;
  std::vector<Entry> entries;
  std::size_t m = 2;
  double kappa4 = 0.0;  // analytics

  std::string qform_case = "real";
  std::string qform_matrix = "identity";
  std::string qform_law = "gaussian";
  std::uint64_t frozen_seed = 1;

  int hs_order = 3;
  std::size_t hs_nx = 800;
  std::size_t hs_ny = 400;

  std::vector<double> eps;  // truncation levels per N; empty selects the default sequence
  std::size_t repair_draws = 100000;
  double repair_threshold = 2.5;

  std::size_t excursion_stride = 100;
  Tolerances tol;

  std::string out_dir = "wigner-lab-out";
  Format format = Format::Csv;
  bool histograms = true;

  // Replica count for the k-th N.
  [[nodiscard]] std::size_t replicas_at(std::size_t k) const { return replicas.size() == 1 ? replicas[0] : replicas[k]; }
};

// Validates a config document (already merged with flag overrides) and fills command defaults.
RunConfig parse_config(const json& doc);
// Reads a JSON file; syntax errors carry the line and column.
json load_config_file(const std::string& path);

// Every setting that influences results, defaults included. Output location and format are left out.
json echo_config(const RunConfig& c);
// FNV-1a over the compact dump of echo_config.
std::uint64_t config_hash(const RunConfig& c);
std::string hex64(std::uint64_t v);

// "2i", "3", "-1.5+0.25i", "0.5-2i"
cplx parse_complex(std::string_view s);
std::string format_complex(cplx z);

// Recursively overwrites `base` with the keys of `over`.
void merge_into(json& base, const json& over);

}  // namespace wlab::cli
