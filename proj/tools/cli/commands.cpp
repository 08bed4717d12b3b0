#include "cli/commands.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "wlab/experiments.hpp"
#include "wlab/qform.hpp"
#include "wlab/semicircle.hpp"
#include "wlab/spectral.hpp"

namespace wlab::cli {

namespace {

using Row = std::vector<Cell>;

McOptions mc_options(const RunConfig& c) {
  McOptions opt;
  opt.excursion_stride = c.excursion_stride;
  return opt;
}

std::string entry_name(const Entry& e) { return std::to_string(e.i) + "_" + std::to_string(e.j); }

Report analytics(const RunConfig& c) {
  const TestFunction f = TestFunction::parse(c.f);
  const SemicircleParams sp(c.profile.sigma);
  const EntryFunctionals fn = entry_functionals(f, sp);
  const Symmetry sym = c.profile.symmetry;
  const SemicirclePrediction off = predict_entry_fluctuation(fn, sp, c.kappa4, sym, false);
  const SemicirclePrediction dg = predict_entry_fluctuation(fn, sp, c.kappa4, sym, true);
  const double sigma1 = c.profile.build(1).diag_sigma1;
  const double d2 = fn.omega2 - fn.alpha * fn.alpha;
  const double diag_raw = dg.limit_variance + dg.coeff_w * dg.coeff_w * sigma1 * sigma1;
  // With a vanishing fourth cumulant the diagonal raw variance is 2 omega^2 (real, sigma1^2 = 2 sigma^2)
  // or omega^2 (hermitian, sigma1 = sigma); other settings only report it.
  double residual = std::abs(d2 + fn.alpha * fn.alpha - fn.omega2);
  const bool standard_diag = std::abs(sigma1 - (sym == Symmetry::RealSymmetric ? std::sqrt(2.0) : 1.0) * c.profile.sigma) <
                             1e-15 * c.profile.sigma;
  if (c.kappa4 == 0.0 && standard_diag)
    residual = std::max(residual, std::abs(diag_raw - (sym == Symmetry::RealSymmetric ? 2.0 : 1.0) * fn.omega2));
  const double scale = std::max(1.0, fn.omega2);

  Report r;
  Table main{"analytics",
             {"f_id", "symmetry", "sigma", "kappa4", "alpha", "beta", "omega2", "mean", "d2", "offdiag_var",
              "diag_var", "coeff_w", "diag_raw_var", "identity_residual", "pass"},
             {}};
  const bool ok = residual <= c.tol.identity_abs * scale;
  main.rows.push_back(Row{c.f, std::string(to_string(sym)), c.profile.sigma, c.kappa4, fn.alpha, fn.beta, fn.omega2,
                          fn.mean, d2, off.limit_variance, dg.limit_variance, off.coeff_w, diag_raw, residual, ok});
  r.pass = ok;

  Table st{"stieltjes", {"z_re", "z_im", "g_re", "g_im", "residual", "pass"}, {}};
  const double s2 = c.profile.sigma * c.profile.sigma;
  for (cplx z : c.z) {
    const cplx g = stieltjes(z, sp);
    const double res = std::abs(s2 * g * g - z * g + 1.0);
    const bool pass = res <= c.tol.identity_abs * std::max(1.0, std::abs(z * g));
    st.rows.push_back(Row{z.real(), z.imag(), g.real(), g.imag(), res, pass});
    r.pass = r.pass && pass;
  }
  r.tables = {main, st};
  return r;
}

Report simulate(const RunConfig& c) {
  const EnsembleProfile p = c.profile.build(c.n);
  const TestFunction f = TestFunction::parse(c.f);
  McOptions opt = mc_options(c);
  opt.keep_samples = c.histograms;
  const FluctuationRun run = entry_fluctuation_mc(p, f, c.entries, c.n, c.replicas[0], c.seed, opt);

  Report r;
  Table t{"entries",
          {"experiment", "symmetry", "f_id", "i", "j", "N", "replicas", "seed", "raw_var", "residual_var",
           "predicted_var", "coeff_w", "skew", "excess_kurtosis", "jb_stat", "pass"},
          {}};
  const json meta = output_metadata(c);
  for (const auto& e : run.entries) {
    const double pred = e.predicted_raw_var;
    bool pass = pred > 1e-12 ? std::abs(e.raw_var - pred) <= c.tol.variance_rel * pred : e.raw_var <= c.tol.zero_variance;
    if (e.residual_var > c.tol.normality_min_var && e.predicted.limit_variance > 0.0 && !e.degenerate)
      pass = pass && std::abs(e.skew) <= c.tol.skew && std::abs(e.excess_kurtosis) <= c.tol.kurtosis;
    t.rows.push_back(Row{std::string("entry_clt"), std::string(to_string(p.symmetry)), e.f_id,
                         static_cast<std::uint64_t>(e.entry.i), static_cast<std::uint64_t>(e.entry.j),
                         static_cast<std::uint64_t>(e.n), static_cast<std::uint64_t>(e.replicas), c.seed, e.raw_var,
                         e.residual_var, pred, e.predicted.coeff_w, e.skew, e.excess_kurtosis, e.jb_stat, pass});
    r.pass = r.pass && pass;
    r.notes.emplace_back("centering_gap_se_" + entry_name(e.entry), e.centering_gap_se);
    if (c.histograms) {
      double mean = 0.0;
      for (double v : e.samples) mean += v;
      if (!e.samples.empty()) mean /= static_cast<double>(e.samples.size());
      r.figures.push_back({"simulate_" + entry_name(e.entry),
                           histogram_svg(e.samples, mean, std::sqrt(e.predicted.limit_variance),
                                         "residual of sqrt(N) f(X)_" + std::to_string(e.entry.i) + "," +
                                             std::to_string(e.entry.j) + ", " + e.f_id + ", N=" + std::to_string(e.n),
                                         meta)});
    }
  }
  r.tables.push_back(t);
  if (c.entries.size() > 1) {
    Table corr{"correlation", {"a_i", "a_j", "b_i", "b_j", "correlation", "pass"}, {}};
    for (std::size_t a = 0; a < c.entries.size(); ++a)
      for (std::size_t b = a + 1; b < c.entries.size(); ++b) {
        const double v = run.correlation(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        const bool pass = std::abs(v) <= c.tol.correlation;
        corr.rows.push_back(Row{static_cast<std::uint64_t>(c.entries[a].i), static_cast<std::uint64_t>(c.entries[a].j),
                                static_cast<std::uint64_t>(c.entries[b].i), static_cast<std::uint64_t>(c.entries[b].j), v,
                                pass});
        r.pass = r.pass && pass;
      }
    r.tables.push_back(corr);
  }
  r.notes.emplace_back("excursion_checked", static_cast<std::uint64_t>(run.excursion.checked));
  r.notes.emplace_back("excursion_exceeded", static_cast<std::uint64_t>(run.excursion.exceeded));
  r.notes.emplace_back("excursion_delta", run.excursion.delta);
  r.notes.emplace_back("excursion_probability", run.excursion.probability());
  return r;
}

Report resolvent(const RunConfig& c) {
  const EnsembleProfile p = c.profile.build(c.ns.front());
  const ScalingScan scan = resolvent_scaling_scan(p, c.z.front(), c.ns, c.replicas, c.seed, mc_options(c));
  Report r;
  Table t{"scaling",
          {"quantity", "z_re", "z_im", "N", "replicas", "value", "std_error", "slope", "slope_stderr", "degenerate",
           "checked", "pass"},
          {}};
  for (const auto& rep : scan.reports) {
    const std::pair<double, double>* window = nullptr;
    if (rep.quantity == ScalingQuantity::VarEntry) window = &c.tol.slope_var;
    if (rep.quantity == ScalingQuantity::BiasDiag) window = &c.tol.slope_bias;
    if (rep.quantity == ScalingQuantity::MasterDiag) window = &c.tol.slope_master;
    bool pass = true;
    if (window)
      pass = rep.fitted && !rep.degenerate && rep.slope >= window->first && rep.slope <= window->second;
    r.pass = r.pass && pass;
    for (std::size_t k = 0; k < rep.ns.size(); ++k)
      t.rows.push_back(Row{std::string(to_string(rep.quantity)), scan.z.real(), scan.z.imag(),
                           static_cast<std::uint64_t>(rep.ns[k]), static_cast<std::uint64_t>(c.replicas_at(k)),
                           rep.values[k], rep.std_errors[k], rep.fitted ? rep.slope : NAN,
                           rep.fitted ? rep.slope_stderr : NAN, rep.degenerate, window != nullptr, pass});
    if (!rep.note.empty()) r.notes.emplace_back(std::string("note_") + to_string(rep.quantity), rep.note);
  }
  r.tables.push_back(t);
  return r;
}

Report field(const RunConfig& c) {
  const EnsembleProfile p = c.profile.build(c.n);
  const FieldCovarianceReport fr = resolvent_field_mc(p, c.m, c.z, c.n, c.replicas[0], c.seed, mc_options(c));
  Report r;
  auto table = [&](const std::string& name, const std::vector<FieldComparison>& rows, bool checked) {
    Table t{name,
            {"i", "j", "z_re", "z_im", "w_re", "w_im", "component", "empirical", "predicted", "scale", "rel_error",
             "absolute", "pass"},
            {}};
    for (const auto& fc : rows) {
      const bool pass = !checked || fc.rel_error <= c.tol.field_rel;
      if (checked) r.pass = r.pass && pass;
      const cplx z = fr.z_list[fc.zi], w = fr.z_list[fc.wi];
      t.rows.push_back(Row{static_cast<std::uint64_t>(fc.entry.i), static_cast<std::uint64_t>(fc.entry.j), z.real(),
                           z.imag(), w.real(), w.imag(), fc.component, fc.empirical, fc.predicted, fc.scale,
                           fc.rel_error, fc.absolute, pass});
    }
    return t;
  };
  r.tables.push_back(table("covariance", fr.table, true));
  r.tables.push_back(table("linearized", fr.linearized_table, false));
  r.notes.emplace_back("max_rel_error", fr.max_rel_error);
  r.notes.emplace_back("linearized_max_rel_error", fr.linearized_max_rel_error);
  for (std::size_t k = 0; k < fr.kappa4.size(); ++k) r.notes.emplace_back("kappa4_row_" + std::to_string(k + 1), fr.kappa4[k]);
  return r;
}

Report qform(const RunConfig& c) {
  QFormSpec spec;
  spec.qcase = c.qform_case == "complex" ? QFormCase::Complex : QFormCase::Real;
  spec.n = c.n;
  if (c.qform_matrix == "identity") spec.matrix = QFormMatrixKind::Identity;
  else if (c.qform_matrix == "diag-ramp") spec.matrix = QFormMatrixKind::DiagRamp;
  else if (c.qform_matrix == "resolvent-re") spec.matrix = QFormMatrixKind::FrozenResolventRe;
  else spec.matrix = QFormMatrixKind::FrozenResolventIm;
  spec.z = c.z.front();
  spec.frozen_seed = c.frozen_seed;
  spec.law = EntryLaw::parse(c.qform_law);
  const QFormReport q = qform_mc(spec, c.replicas[0], c.seed);

  const double pred = q.predicted.v2;
  bool pass = pred > c.tol.qform_zero ? std::abs(q.variance - pred) <= c.tol.qform_rel * pred
                                      : q.variance <= c.tol.qform_zero;
  Report r;
  Table t{"qform",
          {"experiment", "case", "matrix", "law", "N", "replicas", "seed", "mean", "mean_se", "variance", "variance_se",
           "predicted_var", "a1", "a2", "skew", "excess_kurtosis", "jb_stat", "b_norm", "pass"},
          {}};
  t.rows.push_back(Row{std::string("qform_clt"), c.qform_case, c.qform_matrix, spec.law.id(),
                       static_cast<std::uint64_t>(c.n), static_cast<std::uint64_t>(q.replicas), c.seed, q.mean,
                       q.mean_se, q.variance, q.variance_se, pred, q.predicted.a1, q.predicted.a2, q.skew,
                       q.excess_kurtosis, q.jb_stat, q.b_norm, pass});
  r.pass = pass;
  r.tables.push_back(t);
  if (c.n <= 8 && spec.law.discrete()) {
    const std::vector<EntryLaw> laws(c.n, spec.law);
    r.notes.emplace_back("enumerated_variance", qform_variance_enumeration(spec.build_matrix(), laws, spec.qcase));
  }
  return r;
}

template <class Scalar>
Report hs_check_impl(const RunConfig& c) {
  const EnsembleProfile p = c.profile.build(c.n);
  const TestFunction f = TestFunction::parse(c.f);
  const Mat<Scalar> x = sample<Scalar>(p, c.seed, 0) / std::sqrt(static_cast<double>(c.n));
  const auto d = eigh(x);
  const Mat<Scalar> exact = apply_function(d, f);
  const double norm = operator_norm(d);

  Report r;
  Table t{"deviation", {"N", "f_id", "order", "nx", "ny", "x_min", "x_max", "y_max", "max_abs_deviation", "pass"}, {}};
  double prev = 0.0;
  for (std::size_t level = 0; level < 2; ++level) {
    const std::size_t mult = std::size_t{1} << level;
    const HsGrid grid = hs_grid_for(norm, f, c.hs_nx * mult, c.hs_ny * mult);
    const double dev = (hs_apply(x, f, c.hs_order, grid) - exact).cwiseAbs().maxCoeff();
    // the base grid must meet the tolerance; the doubled grid must not do worse
    const bool pass = level == 0 ? dev <= c.tol.hs_abs : dev <= prev;
    r.pass = r.pass && pass;
    t.rows.push_back(Row{static_cast<std::uint64_t>(c.n), c.f, static_cast<std::int64_t>(c.hs_order),
                         static_cast<std::uint64_t>(grid.nx), static_cast<std::uint64_t>(grid.ny), grid.x_min,
                         grid.x_max, grid.y_max, dev, pass});
    prev = dev;
  }
  r.notes.emplace_back("operator_norm", norm);
  r.tables.push_back(t);
  return r;
}

Report hs_check(const RunConfig& c) {
  return c.profile.symmetry == Symmetry::RealSymmetric ? hs_check_impl<double>(c) : hs_check_impl<cplx>(c);
}

Report truncate_demo(const RunConfig& c) {
  const EnsembleProfile p = c.profile.build(c.ns.front());
  std::vector<double> eps = c.eps;
  if (eps.empty())
    for (std::size_t n : c.ns) eps.push_back(default_truncation_eps(n));
  Report r;
  Table t{"truncation",
          {"N", "eps", "threshold", "replicas", "changed_replicas", "changed_fraction", "exact_probability",
           "mean_changed_entries", "pass"},
          {}};
  // The exact probability must fall strictly with N; the Monte Carlo fraction is reported beside it.
  const auto pts = truncation_demo(p, c.ns, eps, c.replicas[0], c.seed, mc_options(c));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& pt = pts[k];
    const bool pass = k == 0 || pt.exact_probability < pts[k - 1].exact_probability;
    r.pass = r.pass && pass;
    t.rows.push_back(Row{static_cast<std::uint64_t>(pt.n), pt.eps, pt.threshold, static_cast<std::uint64_t>(pt.replicas),
                         static_cast<std::uint64_t>(pt.changed_replicas), pt.changed_fraction, pt.exact_probability,
                         pt.mean_changed_entries, pass});
  }
  r.tables.push_back(t);

  Table rep{"repair",
            {"entry", "law", "scale", "threshold", "draws", "mean_re", "mean_im", "mean_se", "variance", "variance_se",
             "target_variance", "changed_fraction", "pass"},
            {}};
  const bool cx = p.symmetry == Symmetry::Hermitian;
  auto check = [&](const char* kind, const EntryLaw& law, double scale, bool diagonal, std::uint64_t stream) {
    const RepairCheck rc = repair_law_check(law, scale, c.repair_threshold, diagonal, cx && !diagonal, c.repair_draws,
                                            c.seed ^ stream);
    const double k = c.tol.repair_se, floor = 1e-12;
    const bool mean_ok = std::abs(rc.mean_re) <= k * rc.mean_se + floor && std::abs(rc.mean_im) <= k * rc.mean_se + floor;
    // the diagonal repair restores the mean only; its second moment stays bounded by the target
    const bool var_ok = diagonal ? rc.variance <= rc.target_variance + k * rc.variance_se
                                 : std::abs(rc.variance - rc.target_variance) <= k * rc.variance_se + floor * rc.target_variance;
    const bool pass = mean_ok && var_ok;
    r.pass = r.pass && pass;
    rep.rows.push_back(Row{std::string(kind), law.id(), scale, c.repair_threshold, static_cast<std::uint64_t>(rc.draws),
                           rc.mean_re, rc.mean_im, rc.mean_se, rc.variance, rc.variance_se, rc.target_variance,
                           rc.changed_fraction, pass});
  };
  check("offdiag", p.law, p.sigma, false, 0);
  check("diag", p.diag_law, p.diag_sigma1, true, 1);
  r.tables.push_back(rep);
  return r;
}

// Flag text to a JSON scalar: numbers and booleans stay typed so the schema can diagnose them.
json scalar(const std::string& s) {
  try {
    json j = json::parse(s);
    if (j.is_number() || j.is_boolean()) return j;
  } catch (const json::parse_error&) {
  }
  return json(s);
}

json list(const std::string& s, char sep) {
  json out = json::array();
  std::size_t start = 0;
  while (true) {
    const auto cut = s.find(sep, start);
    out.push_back(scalar(s.substr(start, cut - start)));
    if (cut == std::string::npos) break;
    start = cut + 1;
  }
  return out;
}

int resolve_threads(const std::optional<int>& flag) {
  if (flag) {
    if (*flag < 1) throw ConfigError("threads", "must be at least 1");
    return *flag;
  }
  if (const char* env = std::getenv("WIGNER_LAB_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("WIGNER_LAB_THREADS", std::string("must be a positive integer, got '") + env + "'");
    return static_cast<int>(v);
  }
  return omp_get_num_procs();
}

}  // namespace

Report run_command(const RunConfig& c) {
  switch (c.command) {
    case Command::Analytics: return analytics(c);
    case Command::Simulate: return simulate(c);
    case Command::Resolvent: return resolvent(c);
    case Command::Field: return field(c);
    case Command::QForm: return qform(c);
    case Command::HsCheck: return hs_check(c);
    case Command::TruncateDemo: return truncate_demo(c);
  }
  throw ConfigError("command", "unhandled command");
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Wigner matrix fluctuation laboratory", "wigner-lab"};
  std::string command, config_path, out, format, f, profile, law, ns, replicas, entries, z, n, m, seed, sigma, kappa4,
      tolerance, qcase, matrix;
  std::optional<int> threads;
  bool no_histograms = false;
  app.add_option("command", command, "analytics | simulate | resolvent | field | qform | hs-check | truncate-demo");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "master seed (u64)");
  app.add_option("--threads", threads, "worker threads (overrides WIGNER_LAB_THREADS)");
  app.add_option("--out", out, "output directory");
  app.add_option("--format", format, "csv | json");
  app.add_option("--f", f, "test function id, e.g. monomial:3 or gauss:0:1");
  app.add_option("--profile", profile, "goe | gue");
  app.add_option("--sigma", sigma, "off-diagonal scale");
  app.add_option("--law", law, "off-diagonal entry law (profile), or the coordinate law (qform)");
  app.add_option("--n", n, "matrix or vector size");
  app.add_option("--ns", ns, "sizes, comma separated");
  app.add_option("--replicas", replicas, "replica count, or one per size (comma separated)");
  app.add_option("--entries", entries, "entries as i,j;i,j");
  app.add_option("--z", z, "spectral points, ';' separated, e.g. 2i;0.5+1i");
  app.add_option("--m", m, "field corner size");
  app.add_option("--kappa4", kappa4, "fourth cumulant for analytics");
  app.add_option("--case", qcase, "qform case: real | complex");
  app.add_option("--matrix", matrix, "qform matrix: identity | diag-ramp | resolvent-re | resolvent-im");
  app.add_option("--tolerance", tolerance, "primary tolerance of the command");
  app.add_flag("--no-histograms", no_histograms, "skip SVG histograms");
  app.set_version_flag("--version", WLAB_VERSION);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    json doc = config_path.empty() ? json::object() : load_config_file(config_path);
    if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
    if (doc.contains("profile") && doc["profile"].is_string()) {
      const std::string preset = doc["profile"].get<std::string>();
      if (preset == "goe") doc["profile"] = {{"symmetry", "real"}};
      else if (preset == "gue") doc["profile"] = {{"symmetry", "hermitian"}};
    }
    json over = json::object();
    if (!command.empty()) over["command"] = command;
    if (!profile.empty()) {
      if (profile != "goe" && profile != "gue") throw ConfigError("profile", "--profile takes goe or gue");
      doc["profile"] = {{"symmetry", profile == "goe" ? "real" : "hermitian"}};
    }
    if (!seed.empty()) over["seed"] = scalar(seed);
    if (!out.empty()) over["output"]["dir"] = out;
    if (!format.empty()) over["output"]["format"] = format;
    if (no_histograms) over["output"]["histograms"] = false;
    if (!f.empty()) over["f"] = f;
    if (!sigma.empty()) over["profile"]["sigma"] = scalar(sigma);
    if (!n.empty()) over["n"] = scalar(n);
    if (!ns.empty()) over["ns"] = list(ns, ',');
    if (!replicas.empty()) over["replicas"] = replicas.find(',') == std::string::npos ? scalar(replicas) : list(replicas, ',');
    if (!z.empty()) {
      json zs = json::array();
      for (const auto& v : list(z, ';')) zs.push_back(v.is_string() ? v : json(v.dump()));
      over["z"] = zs;
    }
    if (!entries.empty()) {
      json es = json::array();
      for (const auto& e : list(entries, ';')) es.push_back(list(e.is_string() ? e.get<std::string>() : e.dump(), ','));
      over["entries"] = es;
    }
    if (!m.empty()) over["m"] = scalar(m);
    if (!kappa4.empty()) over["analytics"]["kappa4"] = scalar(kappa4);
    if (!qcase.empty()) over["qform"]["case"] = qcase;
    if (!matrix.empty()) over["qform"]["matrix"] = matrix;
    merge_into(doc, over);
    if (!law.empty()) {
      const bool qf = doc.contains("command") && doc["command"] == "qform";
      if (qf) doc["qform"]["law"] = law;
      else doc["profile"]["law"] = law;
    }
    if (!tolerance.empty()) {
      static const std::pair<const char*, const char*> keys[] = {
          {"analytics", "identity_abs"}, {"simulate", "variance_rel"}, {"field", "field_rel"},
          {"qform", "qform_rel"},        {"hs-check", "hs_abs"},       {"truncate-demo", "repair_se"}};
      const std::string cmd = doc.contains("command") && doc["command"].is_string() ? doc["command"].get<std::string>() : "";
      const char* key = nullptr;
      for (const auto& [name, k] : keys)
        if (cmd == name) key = k;
      if (!key) throw ConfigError("tolerance", "--tolerance is not defined for '" + cmd + "'; set tolerances.* in the config");
      doc["tolerances"][key] = scalar(tolerance);
    }

    const RunConfig cfg = parse_config(doc);
    const int nthreads = resolve_threads(threads);
    omp_set_num_threads(nthreads);

    const auto t0 = std::chrono::steady_clock::now();
    const Report report = run_command(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto written = write_outputs(cfg, report, wall, nthreads);

    std::cout << to_string(cfg.command) << ": " << (report.pass ? "PASS" : "FAIL") << " (config " << hex64(config_hash(cfg))
              << ", seed " << cfg.seed << ")\n";
    for (const auto& path : written) std::cout << "  wrote " << path << "\n";
    return report.pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "wigner-lab: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "wigner-lab: error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace wlab::cli
