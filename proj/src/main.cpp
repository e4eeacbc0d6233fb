// ewlkit: fitting, comparison, sampling, curve emission, and goodness-of-fit
// reporting for the exponentiated Weibull-logarithmic lifetime family.
//
// Exit codes: 0 success, 1 input error, 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ewl/data_io.hpp"
#include "ewl/distribution.hpp"
#include "ewl/families.hpp"
#include "ewl/gof.hpp"
#include "ewl/inference.hpp"
#include "ewl/moments.hpp"
#include "ewl/special.hpp"

namespace {

using json = nlohmann::ordered_json;

ewl::SeriesPolicy policy_from_env() {
  ewl::SeriesPolicy pol;
  if (const char* s = std::getenv("EWLKIT_MAX_TERMS")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || v < 1) {
      throw std::runtime_error("EWLKIT_MAX_TERMS must be a positive integer");
    }
    pol.max_terms_per_index = (int)v;
  }
  return pol;
}

ewl::Family parse_family(const std::string& name) {
  const std::optional<ewl::Family> f = ewl::family_from_name(name);
  if (!f) throw std::runtime_error("unknown family '" + name + "'");
  return *f;
}

// --init key=value pairs layered over the defaults (1, 1, 1, 0.5).
ewl::EwlParams params_from_inits(const std::vector<std::string>& inits) {
  ewl::EwlParams p;
  for (const std::string& kv : inits) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("--init expects key=value, got '" + kv + "'");
    }
    const std::string key = kv.substr(0, eq);
    char* end = nullptr;
    const std::string val = kv.substr(eq + 1);
    const double v = std::strtod(val.c_str(), &end);
    if (end == val.c_str() || *end != '\0') {
      throw std::runtime_error("--init " + key + ": bad number '" + val + "'");
    }
    if (key == "alpha") {
      p.alpha = v;
    } else if (key == "beta") {
      p.beta = v;
    } else if (key == "gamma") {
      p.gamma_ = v;
    } else if (key == "theta") {
      p.theta = v;
    } else {
      throw std::runtime_error("--init: unknown parameter '" + key +
                               "' (alpha, beta, gamma, theta)");
    }
  }
  return p;
}

struct Grid {
  double lo = 0.0, hi = 0.0;
  int steps = 0;
};

Grid parse_grid(const std::string& s) {
  Grid g;
  const size_t c1 = s.find(':');
  const size_t c2 = (c1 == std::string::npos) ? std::string::npos
                                              : s.find(':', c1 + 1);
  if (c2 == std::string::npos) {
    throw std::runtime_error("--grid expects lo:hi:steps, got '" + s + "'");
  }
  try {
    g.lo = std::stod(s.substr(0, c1));
    g.hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    g.steps = std::stoi(s.substr(c2 + 1));
  } catch (const std::exception&) {
    throw std::runtime_error("--grid expects lo:hi:steps, got '" + s + "'");
  }
  if (!(g.lo < g.hi) || g.steps < 2) {
    throw std::runtime_error("--grid needs lo < hi and steps >= 2");
  }
  return g;
}

ewl::FitMethod parse_method(const std::string& m) {
  if (m == "em") return ewl::FitMethod::EM;
  if (m == "direct") return ewl::FitMethod::Direct;
  if (m == "hybrid") return ewl::FitMethod::EMthenDirect;
  throw std::runtime_error("--method must be em, direct, or hybrid");
}

const char* method_name(ewl::FitMethod m) {
  switch (m) {
    case ewl::FitMethod::EM: return "em";
    case ewl::FitMethod::Direct: return "direct";
    default: return "hybrid";
  }
}

json params_json(const ewl::EwlParams& p) {
  return json{{"alpha", p.alpha},
              {"beta", p.beta},
              {"gamma", p.gamma_},
              {"theta", p.theta}};
}

json stderr_json(const ewl::FitResult& r) {
  json out = json::object();
  for (size_t i = 0; i < r.free_names.size(); ++i) {
    const double se = (i < r.std_errors.size()) ? r.std_errors[i]
                                                : std::nan("");
    if (std::isfinite(se)) {
      out[r.free_names[i]] = se;
    } else {
      out[r.free_names[i]] = nullptr;
    }
  }
  return out;
}

json gof_json(const ewl::GofReport& g) {
  return json{{"ks", g.ks},         {"ks_pvalue", g.ks_pvalue},
              {"ad", g.ad},         {"cm", g.cm},
              {"ad_raw", g.ad_raw}, {"cm_raw", g.cm_raw},
              {"aic", g.aic},       {"n", g.n}};
}

json fit_json(const ewl::FitResult& r, const ewl::GofReport& g) {
  return json{{"family", ewl::family_name(r.family)},
              {"params", params_json(r.params)},
              {"stderr", stderr_json(r)},
              {"loglik", r.loglik},
              {"aic", r.aic},
              {"gof", gof_json(g)},
              {"convergence",
               json{{"method", method_name(r.method)},
                    {"iterations", r.iterations},
                    {"converged", r.converged},
                    {"theta_at_boundary", r.theta_at_boundary}}}};
}

void print_fit_table(const ewl::FitResult& r, const ewl::GofReport& g) {
  const ewl::FamilyConstraints con = ewl::constraints(r.family);
  std::printf("family:     %s\n", ewl::family_name(r.family).c_str());
  std::printf("n:          %d\n", r.n_obs);
  std::printf("method:     %s\n", method_name(r.method));
  std::printf("converged:  %s (%d iterations)%s\n", r.converged ? "yes" : "no",
              r.iterations, r.theta_at_boundary ? " [theta at boundary]" : "");
  std::printf("loglik:     %.6f   -2loglik: %.4f\n", r.loglik, -2.0 * r.loglik);
  std::printf("aic:        %.4f\n", r.aic);
  std::printf("%-8s %-14s %s\n", "param", "estimate", "std.error");
  size_t free_idx = 0;
  auto row = [&](const char* name, double value, bool fixed) {
    if (fixed) {
      std::printf("%-8s %-14.6g (fixed)\n", name, value);
      return;
    }
    const double se = (free_idx < r.std_errors.size())
                          ? r.std_errors[free_idx]
                          : std::nan("");
    ++free_idx;
    if (std::isfinite(se)) {
      std::printf("%-8s %-14.6g %.4g\n", name, value, se);
    } else {
      std::printf("%-8s %-14.6g n/a\n", name, value);
    }
  };
  row("alpha", r.params.alpha, con.alpha.has_value());
  row("beta", r.params.beta, false);
  row("gamma", r.params.gamma_, con.gamma_.has_value());
  row("theta", r.params.theta, con.theta_limit_zero);
  std::printf("gof: ks=%.4f p=%.4f ad=%.4f cm=%.4f (raw ad=%.4f cm=%.4f)\n",
              g.ks, g.ks_pvalue, g.ad, g.cm, g.ad_raw, g.cm_raw);
}

int cmd_fit(const std::string& file, int column, const std::string& family,
            const std::string& method, const std::vector<std::string>& inits,
            const std::string& format) {
  const ewl::Family f = parse_family(family);
  const ewl::FitMethod m = parse_method(method);
  const ewl::Dataset ds = ewl::read_dataset(file, column);
  ewl::FitResult r;
  if (!inits.empty()) {
    r = ewl::fit_from(ds.values, params_from_inits(inits), f, m);
  } else {
    r = ewl::fit(ds.values, f, m);
  }
  const ewl::GofReport g = ewl::gof_report(ds.values, r);
  if (format == "machine") {
    std::printf("%s\n", fit_json(r, g).dump(2).c_str());
  } else {
    std::printf("dataset:    %s (column %d)\n", ds.name.c_str(), column);
    print_fit_table(r, g);
  }
  return 0;
}

std::vector<ewl::Family> parse_family_list(const std::string& csv) {
  std::vector<ewl::Family> out;
  size_t pos = 0;
  while (pos <= csv.size()) {
    const size_t c = csv.find(',', pos);
    const std::string tok =
        csv.substr(pos, c == std::string::npos ? std::string::npos : c - pos);
    if (!tok.empty()) out.push_back(parse_family(tok));
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  if (out.empty()) throw std::runtime_error("--families: empty list");
  return out;
}

int cmd_compare(const std::string& file, int column,
                const std::string& families_csv, const std::string& format) {
  const std::vector<ewl::Family> fams = parse_family_list(families_csv);
  const ewl::Dataset ds = ewl::read_dataset(file, column);
  const std::vector<ewl::ModelRow> rows = ewl::model_table(ds.values, fams);

  // LR tests assembled from the already-fitted rows: w = 2(l_alt - l_null),
  // computed for every nested ordered pair among the requested families.
  struct LrRow {
    std::string null_name, alt_name;
    double w;
    int df;
    double p;
  };
  std::vector<LrRow> lr;
  for (const ewl::ModelRow& a : rows) {
    for (const ewl::ModelRow& b : rows) {
      if (a.fit_failed || b.fit_failed) continue;
      if (!ewl::is_nested_in(a.family, b.family)) continue;
      const double w = std::max(0.0, 2.0 * (b.fit.loglik - a.fit.loglik));
      const int df =
          ewl::n_free_params(b.family) - ewl::n_free_params(a.family);
      lr.push_back({ewl::family_name(a.family), ewl::family_name(b.family), w,
                    df, ewl::chisq_sf(w, df)});
    }
  }

  if (format == "machine") {
    json models = json::array();
    for (const ewl::ModelRow& row : rows) {
      if (row.fit_failed) {
        models.push_back(json{{"family", ewl::family_name(row.family)},
                              {"error", row.failure}});
      } else {
        models.push_back(fit_json(row.fit, row.gof));
      }
    }
    json lrj = json::array();
    for (const LrRow& t : lr) {
      lrj.push_back(json{{"null", t.null_name},
                         {"alt", t.alt_name},
                         {"statistic", t.w},
                         {"df", t.df},
                         {"p_value", t.p}});
    }
    std::printf("%s\n", json{{"models", models}, {"lr_tests", lrj}}.dump(2).c_str());
    return 0;
  }

  std::printf("dataset: %s (n=%d)\n", ds.name.c_str(), (int)ds.values.size());
  std::printf("%-8s %-12s %-10s %-8s %-8s %-8s %-8s %s\n", "family",
              "-2loglik", "aic", "ks", "p(ks)", "ad", "cm", "converged");
  for (const ewl::ModelRow& row : rows) {
    if (row.fit_failed) {
      std::printf("%-8s fit failed: %s\n",
                  ewl::family_name(row.family).c_str(), row.failure.c_str());
      continue;
    }
    std::printf("%-8s %-12.4f %-10.4f %-8.4f %-8.4f %-8.4f %-8.4f %s\n",
                ewl::family_name(row.family).c_str(), -2.0 * row.fit.loglik,
                row.fit.aic, row.gof.ks, row.gof.ks_pvalue, row.gof.ad,
                row.gof.cm, row.fit.converged ? "yes" : "no");
  }
  if (lr.empty()) {
    std::printf("\nno nested pairs among the requested families; LR section skipped\n");
  } else {
    std::printf("\nlikelihood-ratio tests (null within alternative):\n");
    std::printf("%-8s %-8s %-12s %-4s %s\n", "null", "alt", "w", "df", "p");
    for (const LrRow& t : lr) {
      std::printf("%-8s %-8s %-12.4f %-4d %.4g\n", t.null_name.c_str(),
                  t.alt_name.c_str(), t.w, t.df, t.p);
    }
  }
  return 0;
}

int cmd_sample(const std::vector<std::string>& inits,
               const std::string& family, int n, std::uint64_t seed,
               const std::string& method) {
  if (n < 1) throw std::runtime_error("--n must be >= 1");
  const ewl::Family f = parse_family(family);
  const ewl::EwlParams p =
      ewl::restrict_params(params_from_inits(inits), f);
  ewl::validate(p);
  std::vector<double> draws;
  if (method == "inverse") {
    draws = ewl::sample_inverse(p, n, seed);
  } else if (method == "compound") {
    draws = ewl::sample_compound(p, n, seed);
  } else {
    throw std::runtime_error("--method must be inverse or compound");
  }
  for (double v : draws) std::printf("%.17g\n", v);
  return 0;
}

int cmd_curves(const std::string& which, const std::string& grid_spec,
               const std::vector<std::string>& inits, const std::string& file,
               int column) {
  const ewl::SeriesPolicy pol = policy_from_env();

  if (which == "empirical-ttt") {
    if (file.empty()) {
      throw std::runtime_error("empirical-ttt needs a dataset file");
    }
    const ewl::Dataset ds = ewl::read_dataset(file, column);
    std::printf("i_over_n,ttt\n");
    for (const auto& [x, t] : ewl::empirical_scaled_ttt(ds.values)) {
      std::printf("%.12g,%.12g\n", x, t);
    }
    return 0;
  }

  const ewl::EwlParams p = params_from_inits(inits);
  ewl::validate(p);
  const Grid g = parse_grid(grid_spec);
  std::function<double(double)> eval;
  if (which == "pdf") {
    eval = [&](double x) { return ewl::pdf(p, x); };
  } else if (which == "cdf") {
    eval = [&](double x) { return ewl::cdf(p, x); };
  } else if (which == "hazard") {
    eval = [&](double x) { return ewl::hazard(p, x); };
  } else if (which == "mrl") {
    eval = [&](double x) { return ewl::mean_residual_life(p, x, pol); };
  } else if (which == "lorenz") {
    eval = [&](double x) { return ewl::lorenz(p, x, pol); };
  } else if (which == "bonferroni") {
    eval = [&](double x) { return ewl::bonferroni(p, x, pol); };
  } else if (which == "ttt") {
    eval = [&](double x) { return ewl::scaled_ttt(p, x, pol); };
  } else {
    throw std::runtime_error(
        "--which must be one of pdf, cdf, hazard, mrl, lorenz, bonferroni, "
        "ttt, empirical-ttt");
  }
  std::printf("x,%s\n", which.c_str());
  for (int i = 0; i < g.steps; ++i) {
    const double x = g.lo + (g.hi - g.lo) * i / (g.steps - 1.0);
    if (x <= 0) continue;  // curves live on y > 0
    std::printf("%.12g,%.12g\n", x, eval(x));
  }
  return 0;
}

int cmd_gof(const std::string& file, int column, const std::string& family,
            const std::vector<std::string>& inits, const std::string& format) {
  const ewl::Family f = parse_family(family);
  const ewl::Dataset ds = ewl::read_dataset(file, column);
  ewl::FitResult r;
  if (!inits.empty()) {
    // evaluate at the provided point (no refit): GOF of a known model
    r.family = f;
    r.params = ewl::restrict_params(params_from_inits(inits), f);
    ewl::validate(r.params);
    r.loglik = ewl::loglik(ds.values, r.params, f);
    r.aic = -2.0 * r.loglik + 2.0 * ewl::n_free_params(f);
    r.n_obs = (int)ds.values.size();
    r.converged = true;
  } else {
    r = ewl::fit(ds.values, f);
  }
  const ewl::GofReport g = ewl::gof_report(ds.values, r);
  if (format == "machine") {
    std::printf("%s\n", fit_json(r, g).dump(2).c_str());
  } else {
    std::printf("dataset: %s (n=%d), family %s\n", ds.name.c_str(), g.n,
                ewl::family_name(f).c_str());
    std::printf("ks:        %.6f (p = %.6f)\n", g.ks, g.ks_pvalue);
    std::printf("ad:        %.6f (raw %.6f)\n", g.ad, g.ad_raw);
    std::printf("cm:        %.6f (raw %.6f)\n", g.cm, g.cm_raw);
    std::printf("-2loglik:  %.4f\n", -2.0 * r.loglik);
    std::printf("aic:       %.4f\n", g.aic);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exponentiated Weibull-logarithmic lifetime toolkit"};
  app.require_subcommand(1);

  std::string file, family = "ewl", method = "hybrid", format = "table";
  std::string sample_method = "inverse";
  std::string families_csv = "ewl,ew,gel,cwl,ge,weibull";
  std::string which = "pdf", grid_spec = "0.01:5:100";
  std::vector<std::string> inits;
  int column = 0, n = 100;
  std::uint64_t seed = 12345;

  CLI::App* c_fit = app.add_subcommand("fit", "fit a family to a dataset");
  c_fit->add_option("file", file, "dataset path")->required();
  c_fit->add_option("--family", family, "family tag (default ewl)");
  c_fit->add_option("--method", method, "em, direct, or hybrid");
  c_fit->add_option("--init", inits, "starting value key=value (repeatable)");
  c_fit->add_option("--column", column, "zero-based data column");
  c_fit->add_option("--format", format, "table or machine");

  CLI::App* c_cmp = app.add_subcommand("compare", "fit and rank several families");
  c_cmp->add_option("file", file, "dataset path")->required();
  c_cmp->add_option("--families", families_csv, "comma-separated family tags");
  c_cmp->add_option("--column", column, "zero-based data column");
  c_cmp->add_option("--format", format, "table or machine");

  CLI::App* c_smp = app.add_subcommand("sample", "draw pseudo-random variates");
  c_smp->add_option("--init", inits, "parameter key=value (repeatable)");
  c_smp->add_option("--family", family, "family tag (default ewl)");
  c_smp->add_option("--n", n, "number of draws");
  c_smp->add_option("--seed", seed, "RNG seed");
  c_smp->add_option("--method", sample_method, "inverse or compound");

  CLI::App* c_crv = app.add_subcommand("curves", "emit (x, value) rows");
  c_crv->add_option("--which", which,
                    "pdf, cdf, hazard, mrl, lorenz, bonferroni, ttt, "
                    "empirical-ttt");
  c_crv->add_option("--grid", grid_spec, "lo:hi:steps");
  c_crv->add_option("--init", inits, "parameter key=value (repeatable)");
  c_crv->add_option("file", file, "dataset path (empirical-ttt only)");
  c_crv->add_option("--column", column, "zero-based data column");

  CLI::App* c_gof = app.add_subcommand("gof", "goodness-of-fit report");
  c_gof->add_option("file", file, "dataset path")->required();
  c_gof->add_option("--family", family, "family tag (default ewl)");
  c_gof->add_option("--init", inits,
                    "evaluate at fixed parameters key=value (repeatable)");
  c_gof->add_option("--column", column, "zero-based data column");
  c_gof->add_option("--format", format, "table or machine");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  try {
    if (format != "table" && format != "machine") {
      throw std::runtime_error("--format must be table or machine");
    }
    if (c_fit->parsed()) return cmd_fit(file, column, family, method, inits, format);
    if (c_cmp->parsed()) return cmd_compare(file, column, families_csv, format);
    if (c_smp->parsed())
      return cmd_sample(inits, family, n, seed, sample_method);
    if (c_crv->parsed()) return cmd_curves(which, grid_spec, inits, file, column);
    if (c_gof->parsed()) return cmd_gof(file, column, family, inits, format);
    return 1;
  } catch (const ewl::NonConvergence& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const ewl::SingularInformation& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
