#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>

#include "wlab/laws.hpp"
#include "wlab/testfns.hpp"

namespace wlab::cli {

namespace {

std::string join_path(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

void expect_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw ConfigError(join_path(path, key), "unknown key");
  }
}

std::uint64_t as_u64(const json& j, const std::string& path, std::uint64_t min = 0) {
  if (j.is_number_integer() && !j.is_number_unsigned()) throw ConfigError(path, "must be a non-negative integer, got " + j.dump());
  if (!j.is_number_unsigned()) throw ConfigError(path, "expected a non-negative integer, got " + j.dump());
  const auto v = j.get<std::uint64_t>();
  if (v < min) throw ConfigError(path, "must be at least " + std::to_string(min) + ", got " + j.dump());
  return v;
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number, got " + j.dump());
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double as_positive(const json& j, const std::string& path) {
  const double v = as_double(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be positive, got " + j.dump());
  return v;
}

double as_nonnegative(const json& j, const std::string& path) {
  const double v = as_double(j, path);
  if (v < 0.0) throw ConfigError(path, "must be non-negative, got " + j.dump());
  return v;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string, got " + j.dump());
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false, got " + j.dump());
  return j.get<bool>();
}

std::vector<std::size_t> as_sizes(const json& j, const std::string& path, std::uint64_t min) {
  std::vector<std::size_t> out;
  if (!j.is_array()) {
    out.push_back(as_u64(j, path, min));
    return out;
  }
  if (j.empty()) throw ConfigError(path, "must not be empty");
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_u64(j[k], path + "[" + std::to_string(k) + "]", min));
  return out;
}

cplx as_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {as_double(j, path), 0.0};
  if (j.is_array()) {
    if (j.size() != 2) throw ConfigError(path, "expected [re, im]");
    return {as_double(j[0], path + "[0]"), as_double(j[1], path + "[1]")};
  }
  try {
    return parse_complex(as_string(j, path));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

std::pair<double, double> as_window(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [low, high]");
  const double lo = as_double(j[0], path + "[0]"), hi = as_double(j[1], path + "[1]");
  if (lo > hi) throw ConfigError(path, "low exceeds high");
  return {lo, hi};
}

std::string checked_law(const json& j, const std::string& path) {
  const std::string id = as_string(j, path);
  try {
    return EntryLaw::parse(id).id();
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

ProfileConfig parse_profile(const json& j, const std::string& path) {
  ProfileConfig p;
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "goe") return p;
    if (name == "gue") {
      p.symmetry = Symmetry::Hermitian;
      return p;
    }
    throw ConfigError(path, "unknown preset '" + name + "' (goe, gue, or an object)");
  }
  expect_keys(j, path, {"symmetry", "sigma", "sigma1", "law", "diag_law", "row_laws"});
  if (j.contains("symmetry")) {
    const std::string s = as_string(j["symmetry"], path + ".symmetry");
    if (s == "real") p.symmetry = Symmetry::RealSymmetric;
    else if (s == "hermitian") p.symmetry = Symmetry::Hermitian;
    else throw ConfigError(path + ".symmetry", "expected 'real' or 'hermitian', got '" + s + "'");
  }
  if (j.contains("sigma")) p.sigma = as_positive(j["sigma"], path + ".sigma");
  if (j.contains("sigma1")) p.sigma1 = as_positive(j["sigma1"], path + ".sigma1");
  if (j.contains("law")) p.law = checked_law(j["law"], path + ".law");
  if (j.contains("diag_law")) p.diag_law = checked_law(j["diag_law"], path + ".diag_law");
  if (j.contains("row_laws")) {
    const json& rl = j["row_laws"];
    const std::string rp = path + ".row_laws";
    if (!rl.is_array()) throw ConfigError(rp, "expected an array of {row, law}");
    for (std::size_t k = 0; k < rl.size(); ++k) {
      const std::string ep = rp + "[" + std::to_string(k) + "]";
      expect_keys(rl[k], ep, {"row", "law"});
      if (!rl[k].contains("row") || !rl[k].contains("law")) throw ConfigError(ep, "needs both 'row' and 'law'");
      p.row_laws.emplace_back(as_u64(rl[k]["row"], ep + ".row", 1), checked_law(rl[k]["law"], ep + ".law"));
    }
  }
  return p;
}

std::vector<Entry> parse_entries(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of [i, j]");
  std::vector<Entry> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string ep = path + "[" + std::to_string(k) + "]";
    if (!j[k].is_array() || j[k].size() != 2) throw ConfigError(ep, "expected [i, j]");
    out.push_back({as_u64(j[k][0], ep + "[0]", 1), as_u64(j[k][1], ep + "[1]", 1)});
  }
  return out;
}

std::vector<std::size_t> default_ns(Command c) {
  switch (c) {
    case Command::Resolvent: return {64, 128, 256, 512, 1024};
    case Command::TruncateDemo: return {100, 400, 1600};
    default: return {};
  }
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::Analytics: return "analytics";
    case Command::Simulate: return "simulate";
    case Command::Resolvent: return "resolvent";
    case Command::Field: return "field";
    case Command::QForm: return "qform";
    case Command::HsCheck: return "hs-check";
    case Command::TruncateDemo: return "truncate-demo";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::Analytics, Command::Simulate, Command::Resolvent, Command::Field, Command::QForm,
                    Command::HsCheck, Command::TruncateDemo})
    if (name == to_string(c)) return c;
  return std::nullopt;
}

EnsembleProfile ProfileConfig::build(std::size_t n) const {
  EnsembleProfile p = symmetry == Symmetry::RealSymmetric ? EnsembleProfile::goe(n, sigma) : EnsembleProfile::gue(n, sigma);
  if (sigma1) p.diag_sigma1 = *sigma1;
  p.law = EntryLaw::parse(law);
  p.diag_law = EntryLaw::parse(diag_law);
  for (const auto& [row, id] : row_laws) p.row_laws.push_back({row, EntryLaw::parse(id)});
  p.validate();
  return p;
}

cplx parse_complex(std::string_view s) {
  auto number = [&](std::string_view t, double fallback) {
    if (t.empty() || t == "+") return fallback;
    if (t == "-") return -fallback;
    if (t.front() == '+') t.remove_prefix(1);
    double v = 0.0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size())
      throw std::invalid_argument("bad complex number '" + std::string(s) + "'");
    return v;
  };
  if (s.empty()) throw std::invalid_argument("empty complex number");
  if (s.back() != 'i') return {number(s, 0.0), 0.0};
  const std::string_view body = s.substr(0, s.size() - 1);
  // split at the last sign that is not an exponent sign or the leading character
  std::size_t cut = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;)
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      cut = k;
      break;
    }
  if (cut == std::string_view::npos) return {0.0, number(body, 1.0)};
  return {number(body.substr(0, cut), 0.0), number(body.substr(cut), 1.0)};
}

std::string format_complex(cplx z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
  return buf;
}

void merge_into(json& base, const json& over) {
  if (!base.is_object() || !over.is_object()) {
    base = over;
    return;
  }
  for (const auto& [key, value] : over.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object()) merge_into(base[key], value);
    else base[key] = value;
  }
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path + ": " + e.what());
  }
}

RunConfig parse_config(const json& doc) {
  expect_keys(doc, "", {"command", "profile", "f", "n", "ns", "replicas", "seed", "z", "entries", "m", "analytics",
                        "qform", "hs", "truncation", "excursion_stride", "tolerances", "output"});
  RunConfig c;
  if (!doc.contains("command")) throw ConfigError("command", "missing");
  {
    const std::string name = as_string(doc["command"], "command");
    const auto cmd = parse_command(name);
    if (!cmd) throw ConfigError("command", "unknown command '" + name + "'");
    c.command = *cmd;
  }
  if (doc.contains("profile")) c.profile = parse_profile(doc["profile"], "profile");
  if (doc.contains("f")) {
    const std::string id = as_string(doc["f"], "f");
    try {
      c.f = TestFunction::parse(id).id();
    } catch (const std::exception& e) {
      throw ConfigError("f", e.what());
    }
  }
  if (c.command == Command::HsCheck) c.n = 64;
  if (doc.contains("n")) c.n = as_u64(doc["n"], "n", 1);
  c.ns = doc.contains("ns") ? as_sizes(doc["ns"], "ns", 2) : default_ns(c.command);
  if (doc.contains("replicas")) c.replicas = as_sizes(doc["replicas"], "replicas", 2);
  else c.replicas = {100};
  if (c.replicas.size() > 1 && c.replicas.size() != c.ns.size())
    throw ConfigError("replicas", "a list must have one count per entry of 'ns'");
  if (doc.contains("seed")) c.seed = as_u64(doc["seed"], "seed");
  if (doc.contains("z")) {
    const json& zj = doc["z"];
    if (zj.is_array() && !zj.empty() && (zj[0].is_array() || zj[0].is_string()))
      for (std::size_t k = 0; k < zj.size(); ++k) c.z.push_back(as_complex(zj[k], "z[" + std::to_string(k) + "]"));
    else
      c.z.push_back(as_complex(zj, "z"));
  } else {
    c.z = {cplx(0.0, 2.0)};
  }
  c.entries = doc.contains("entries") ? parse_entries(doc["entries"], "entries")
                                      : std::vector<Entry>{{1, 1}, {1, 2}, {2, 2}};
  for (std::size_t k = 0; k < c.entries.size(); ++k)
    if (c.command == Command::Simulate && std::max(c.entries[k].i, c.entries[k].j) > c.n)
      throw ConfigError("entries[" + std::to_string(k) + "]", "index exceeds n");
  if (doc.contains("m")) {
    c.m = as_u64(doc["m"], "m", 1);
    if (c.m > 4) throw ConfigError("m", "must be between 1 and 4");
  }
  if (doc.contains("analytics")) {
    const json& a = doc["analytics"];
    expect_keys(a, "analytics", {"kappa4"});
    if (a.contains("kappa4")) c.kappa4 = as_double(a["kappa4"], "analytics.kappa4");
  }
  if (doc.contains("qform")) {
    const json& q = doc["qform"];
    expect_keys(q, "qform", {"case", "matrix", "law", "frozen_seed"});
    if (q.contains("case")) {
      c.qform_case = as_string(q["case"], "qform.case");
      if (c.qform_case != "real" && c.qform_case != "complex")
        throw ConfigError("qform.case", "expected 'real' or 'complex'");
    }
    if (q.contains("matrix")) {
      c.qform_matrix = as_string(q["matrix"], "qform.matrix");
      if (c.qform_matrix != "identity" && c.qform_matrix != "diag-ramp" && c.qform_matrix != "resolvent-re" &&
          c.qform_matrix != "resolvent-im")
        throw ConfigError("qform.matrix", "expected identity, diag-ramp, resolvent-re or resolvent-im");
    }
    if (q.contains("law")) c.qform_law = checked_law(q["law"], "qform.law");
    if (q.contains("frozen_seed")) c.frozen_seed = as_u64(q["frozen_seed"], "qform.frozen_seed");
  }
  if (doc.contains("hs")) {
    const json& h = doc["hs"];
    expect_keys(h, "hs", {"order", "nx", "ny"});
    if (h.contains("order")) c.hs_order = static_cast<int>(as_u64(h["order"], "hs.order"));
    if (h.contains("nx")) c.hs_nx = as_u64(h["nx"], "hs.nx", 2);
    if (h.contains("ny")) c.hs_ny = as_u64(h["ny"], "hs.ny", 2);
  }
  if (doc.contains("truncation")) {
    const json& t = doc["truncation"];
    expect_keys(t, "truncation", {"eps", "repair_draws", "repair_threshold"});
    if (t.contains("eps")) {
      if (!t["eps"].is_array()) throw ConfigError("truncation.eps", "expected an array");
      for (std::size_t k = 0; k < t["eps"].size(); ++k)
        c.eps.push_back(as_positive(t["eps"][k], "truncation.eps[" + std::to_string(k) + "]"));
      if (c.eps.size() != c.ns.size()) throw ConfigError("truncation.eps", "needs one value per entry of 'ns'");
    }
    if (t.contains("repair_draws")) c.repair_draws = as_u64(t["repair_draws"], "truncation.repair_draws", 2);
    if (t.contains("repair_threshold")) c.repair_threshold = as_positive(t["repair_threshold"], "truncation.repair_threshold");
  }
  if (doc.contains("excursion_stride")) c.excursion_stride = as_u64(doc["excursion_stride"], "excursion_stride");
  if (c.command == Command::Analytics) c.format = Format::Json;
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    expect_keys(t, "tolerances", {"identity_abs", "variance_rel", "zero_variance", "skew", "kurtosis", "normality_min_var",
                                  "correlation", "slope_var", "slope_bias", "slope_master", "field_rel", "qform_rel",
                                  "qform_zero", "hs_abs", "repair_se"});
    auto num = [&](const char* key, double& dst) {
      if (t.contains(key)) dst = as_nonnegative(t[key], std::string("tolerances.") + key);
    };
    auto win = [&](const char* key, std::pair<double, double>& dst) {
      if (t.contains(key)) dst = as_window(t[key], std::string("tolerances.") + key);
    };
    num("identity_abs", c.tol.identity_abs);
    num("variance_rel", c.tol.variance_rel);
    num("zero_variance", c.tol.zero_variance);
    num("skew", c.tol.skew);
    num("kurtosis", c.tol.kurtosis);
    num("normality_min_var", c.tol.normality_min_var);
    num("correlation", c.tol.correlation);
    win("slope_var", c.tol.slope_var);
    win("slope_bias", c.tol.slope_bias);
    win("slope_master", c.tol.slope_master);
    num("field_rel", c.tol.field_rel);
    num("qform_rel", c.tol.qform_rel);
    num("qform_zero", c.tol.qform_zero);
    num("hs_abs", c.tol.hs_abs);
    num("repair_se", c.tol.repair_se);
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    expect_keys(o, "output", {"dir", "format", "histograms"});
    if (o.contains("dir")) {
      c.out_dir = as_string(o["dir"], "output.dir");
      if (c.out_dir.empty()) throw ConfigError("output.dir", "must not be empty");
    }
    if (o.contains("format")) {
      const std::string f = as_string(o["format"], "output.format");
      if (f == "csv") c.format = Format::Csv;
      else if (f == "json") c.format = Format::Json;
      else throw ConfigError("output.format", "expected 'csv' or 'json', got '" + f + "'");
    }
    if (o.contains("histograms")) c.histograms = as_bool(o["histograms"], "output.histograms");
  }

  if ((c.command == Command::Resolvent || c.command == Command::TruncateDemo) && c.ns.size() < 2)
    throw ConfigError("ns", "needs at least two sizes");
  try {
    (void)c.profile.build(c.n);
  } catch (const std::exception& e) {
    throw ConfigError("profile", e.what());
  }
  return c;
}

json echo_config(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  json p;
  p["symmetry"] = to_string(c.profile.symmetry);
  p["sigma"] = c.profile.sigma;
  p["sigma1"] = c.profile.build(1).diag_sigma1;
  p["law"] = c.profile.law;
  p["diag_law"] = c.profile.diag_law;
  p["row_laws"] = json::array();
  for (const auto& [row, law] : c.profile.row_laws) p["row_laws"].push_back({{"row", row}, {"law", law}});
  j["profile"] = p;
  j["f"] = c.f;
  j["n"] = c.n;
  j["ns"] = c.ns;
  j["replicas"] = c.replicas;
  j["seed"] = c.seed;
  j["z"] = json::array();
  for (cplx z : c.z) j["z"].push_back(format_complex(z));
  j["entries"] = json::array();
  for (const auto& e : c.entries) j["entries"].push_back({e.i, e.j});
  j["m"] = c.m;
  j["analytics"] = {{"kappa4", c.kappa4}};
  j["qform"] = {{"case", c.qform_case}, {"matrix", c.qform_matrix}, {"law", c.qform_law}, {"frozen_seed", c.frozen_seed}};
  j["hs"] = {{"order", c.hs_order}, {"nx", c.hs_nx}, {"ny", c.hs_ny}};
  j["truncation"] = {{"eps", c.eps}, {"repair_draws", c.repair_draws}, {"repair_threshold", c.repair_threshold}};
  j["excursion_stride"] = c.excursion_stride;
  const Tolerances& t = c.tol;
  j["tolerances"] = {{"identity_abs", t.identity_abs},
                     {"variance_rel", t.variance_rel},
                     {"zero_variance", t.zero_variance},
                     {"skew", t.skew},
                     {"kurtosis", t.kurtosis},
                     {"normality_min_var", t.normality_min_var},
                     {"correlation", t.correlation},
                     {"slope_var", {t.slope_var.first, t.slope_var.second}},
                     {"slope_bias", {t.slope_bias.first, t.slope_bias.second}},
                     {"slope_master", {t.slope_master.first, t.slope_master.second}},
                     {"field_rel", t.field_rel},
                     {"qform_rel", t.qform_rel},
                     {"qform_zero", t.qform_zero},
                     {"hs_abs", t.hs_abs},
                     {"repair_se", t.repair_se}};
  return j;
}

std::uint64_t config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : echo_config(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace wlab::cli
