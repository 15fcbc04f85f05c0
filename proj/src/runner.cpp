#include "dnstrip/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "dnstrip/errors.hpp"
#include "dnstrip/frame.hpp"
#include "dnstrip/transverse.hpp"

namespace dnstrip {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

SweepReport base_report(const ScenarioConfig& c) {
  SweepReport r;
  r.scenario = c.id;
  r.theorem = c.theorem;
  return r;
}

std::vector<double> descending(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

// Returns a failing report when the profile is not admissible at some eps.
std::optional<SweepReport> admissibility_gate(const ScenarioConfig& c, const StripProfile& p) {
  for (double e : c.epsilons) {
    const ValidationReport v = validate(p, e, c.grid.half_length);
    if (v.admissible) continue;
    SweepReport r = base_report(c);
    r.columns = {"eps"};
    r.records = {{e}};
    r.verdict = false;
    r.criterion = "profile admissible at every epsilon";
    for (const auto& ch : v.checks) {
      if (!ch.passed) r.notes.push_back("validation failed at eps = " + fmt(e) + ": " + ch.name + " (" + ch.detail + ")");
    }
    return r;
  }
  return std::nullopt;
}

// Discrete eigenvalue of the flat pencil: bilinear line closed forms.
double flat_discrete_lambda1(const GridSpec& g, double eps) {
  auto line = [](double h, double theta) { return 6.0 / (h * h) * (1.0 - std::cos(theta)) / (2.0 + std::cos(theta)); };
  const double hs = g.h_s();
  const double ht = g.h_t();
  return line(hs, kPi * hs / (2.0 * g.half_length)) + line(ht, kPi * ht / 2.0) / (eps * eps);
}

SweepReport run_validate(const ScenarioConfig& c, const StripProfile& p) {
  SweepReport r = base_report(c);
  r.columns = {"eps"};
  bool all = true;
  for (double e : descending(c.epsilons)) {
    const ValidationReport v = validate(p, e, c.grid.half_length);
    if (r.columns.size() == 1) {
      for (const auto& ch : v.checks) r.columns.push_back(ch.name);
    }
    std::vector<double> row = {e};
    for (const auto& ch : v.checks) {
      row.push_back(ch.passed ? 1.0 : 0.0);
      if (!ch.passed) r.notes.push_back("eps = " + fmt(e) + ": " + ch.name + " failed (" + ch.detail + ")");
    }
    r.records.push_back(std::move(row));
    all = all && v.admissible;
  }
  r.verdict = all;
  r.criterion = "profile admissible at every epsilon";
  return r;
}

SweepReport run_spectrum(const ScenarioConfig& c, const StripProfile& p) {
  SweepReport r = base_report(c);
  r.columns = {"eps",        "lambda_1", "lambda_1_wide", "threshold", "margin", "certified", "inconclusive",
               "closed_form", "closed_form_discrete", "trial_n0"};
  const bool expect = c.expect_discrete.value_or(c.theorem == "T2");
  const bool flat = p.is_flat();
  const bool trial = p.is_unbent() && !p.is_untwisted();
  bool ok = true;
  for (double e : descending(c.epsilons)) {
    GridSpec wide = c.grid;
    wide.half_length = 2.0 * c.grid.half_length;
    wide.n_s = 2 * (c.grid.n_s - 1) + 1;
    wide.n_t = static_cast<int>(std::ceil(c.grid.n_t * 4.0 / 3.0));
    const SpectrumDetection d = detect_discrete_spectrum(p, e, {c.grid, wide}, c.tol);
    const double cf = flat ? dn_threshold(e) + std::pow(kPi / (2.0 * c.grid.half_length), 2) : kNaN;
    const double cfd = flat ? flat_discrete_lambda1(c.grid, e) : kNaN;
    double n0 = kNaN;
    if (trial) {
      const int n = first_negative_cutoff(p, e, c.n_max);
      n0 = n > 0 ? n : kNaN;
      if (expect && n == 0) {
        ok = false;
        r.notes.push_back("trial quotient stays nonnegative up to n = " + std::to_string(c.n_max));
      }
    }
    r.records.push_back({e, d.lambda1, d.settings.size() > 1 ? d.settings[1].lambda1 : kNaN, d.threshold, d.margin,
                         d.certified ? 1.0 : 0.0, d.inconclusive ? 1.0 : 0.0, cf, cfd, n0});
    if (d.inconclusive) {
      ok = false;
      r.notes.push_back("inconclusive at eps = " + fmt(e));
    }
    if (d.certified != expect) ok = false;
    if (flat && !(std::abs(d.lambda1 - cfd) <= 1e-7 * std::abs(cfd))) {
      ok = false;
      r.notes.push_back("lambda_1 differs from the discrete closed form at eps = " + fmt(e));
    }
  }
  r.verdict = ok;
  r.criterion = std::string("certified == ") + (expect ? "true" : "false") +
                (flat ? ", lambda_1 equals the discrete closed form within 1e-7" : "") +
                (trial && expect ? ", trial quotient negative for some n <= " + std::to_string(c.n_max) : "");
  return r;
}

SweepReport run_hardy(const ScenarioConfig& c, const StripProfile& p) {
  SweepReport r = base_report(c);
  r.columns = {"eps", "constant", "constant_doubled", "relative_change", "stable", "hypothesis", "threshold"};
  bool ok = true;
  for (double e : descending(c.epsilons)) {
    const HardyResult h = hardy_constant(p, e, c.grid, c.tol);
    r.records.push_back({e, h.constant, h.constant_doubled, h.relative_change, h.stable ? 1.0 : 0.0,
                         h.hypothesis ? 1.0 : 0.0, h.threshold});
    if (!h.hypothesis) r.notes.push_back("hypothesis kappa_g >= 0, kappa_g != 0, eps sup <= x0 fails at eps = " + fmt(e));
    ok = ok && h.hypothesis && h.constant > 0.0 && h.constant_doubled > 0.0;
    if (c.theorem == "T3") ok = ok && h.stable;
  }
  r.verdict = ok;
  r.criterion = c.theorem == "T3" ? "c > 0 and relative change under L doubling < 0.1" : "c > 0 at L and 2L";
  return r;
}

SweepReport run_transverse(const ScenarioConfig& c, const StripProfile& p) {
  if (c.epsilons.size() != 1) throw InvalidInput("transverse scenarios take exactly one epsilon");
  SweepReport r = base_report(c);
  r.columns = {"s", "alpha", "nu0", "lambda0", "beta", "gap"};
  const double e = c.epsilons.front();
  const double L = c.grid.half_length;
  std::vector<double> s(c.samples);
  for (int i = 0; i < c.samples; ++i) s[i] = c.samples == 1 ? 0.0 : -L + 2.0 * L * i / (c.samples - 1);
  const auto rows = transverse_table(p, e, s, c.resolution);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    r.records.push_back({row.s, row.alpha, row.nu0, row.lambda0, row.beta, row.gap});
    worst = std::min(worst, row.gap);
  }
  const bool hyp = validate(p, e, L).bent_hardy_hypothesis;
  if (!hyp) r.notes.push_back("hypothesis kappa_g >= 0, kappa_g != 0, eps sup <= x0 does not hold");
  r.verdict = hyp && worst >= -1e-10;
  r.criterion = "min_s lambda0 - (pi/2)^2 = " + fmt(worst) + " >= -1e-10";
  return r;
}

SweepReport run_robin_monotonicity(const ScenarioConfig& c) {
  SweepReport r = base_report(c);
  r.columns = {"instance", "alpha1", "alpha2", "E1", "E2", "ratio2", "slack_monotone", "slack_bound"};
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> alpha(-0.5, 5.0);
  bool ok = true;
  for (int k = 0; k < c.instances; ++k) {
    const double a0 = coef(rng);
    const double a1 = coef(rng);
    const double a2 = coef(rng);
    double al1 = alpha(rng);
    double al2 = alpha(rng);
    if (al1 > al2) std::swap(al1, al2);
    const auto V = [a0, a1, a2](double t) { return a0 + a1 * std::cos(kPi * t) + a2 * t * t; };
    const RobinResult r1 = robin_first_eigenvalue_raw({V, al1}, c.resolution);
    const RobinResult r2 = robin_first_eigenvalue_raw({V, al2}, c.resolution);
    const double ratio = r2.boundary_ratio();
    const double mono = r2.eigenvalue - r1.eigenvalue;
    const double bound = r2.eigenvalue + (al1 - al2) * ratio - r1.eigenvalue;
    r.records.push_back({static_cast<double>(k), al1, al2, r1.eigenvalue, r2.eigenvalue, ratio, mono, bound});
    ok = ok && mono >= -1e-6 && bound >= -1e-6;
  }
  r.verdict = ok;
  r.criterion = "E1(a1) <= E1(a2) and E1(a1) <= E1(a2) + (a1 - a2) psi(1)^2 / |psi|^2 within 1e-6";
  return r;
}

SweepReport run_limit(const ScenarioConfig& c, const StripProfile& p) {
  SweepReport r = base_report(c);
  r.columns = {"mu", "ratio", "inf_V"};
  const double L = c.grid.half_length;
  const auto V = [&p](double s) { return p.kappa_g(s); };
  double infV = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 20000; ++i) infV = std::min(infV, V(-L + 2.0 * L * i / 20000.0));
  std::vector<double> mu = c.mu;
  std::sort(mu.begin(), mu.end());
  const auto ratios = effective_limit_check(V, mu, 1, L, c.resolution);
  bool monotone = true;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    r.records.push_back({mu[i], ratios[i], infV});
    if (i > 0) monotone = monotone && std::abs(ratios[i] - infV) <= std::abs(ratios[i - 1] - infV);
  }
  const double last = ratios.back();
  const bool window = last > infV && last < infV + 0.1 * std::abs(infV);
  r.verdict = monotone && window;
  r.criterion = "lambda_1/mu at the largest mu in (inf V, inf V + 0.1 |inf V|) = (" + fmt(infV) + ", " +
                fmt(infV + 0.1 * std::abs(infV)) + "), monotone approach";
  return r;
}

double fff_error(const StripProfile& p, double e, const GridSpec& g) {
  const EmbeddingGrid emb = embed_profile(p, e, g);
  double worst = 0.0;
  for (int i = 1; i <= g.n_s - 2; ++i) {
    for (int j = 1; j <= g.n_t - 2; ++j) {
      const Eigen::Matrix2d G = first_fundamental_form(emb, i, j);
      const double f = metric_f(p, e, g.s_at(i), g.t_at(j));
      worst = std::max({worst, std::abs(G(0, 0) - f * f), std::abs(G(0, 1)), std::abs(G(1, 1) - e * e) / (e * e)});
    }
  }
  return worst;
}

SweepReport run_embed(const ScenarioConfig& c, const StripProfile& p, std::string* xyz) {
  SweepReport r = base_report(c);
  r.columns = {"eps", "frame_drift", "fff_error", "fff_error_refined", "fff_order"};
  const double L = c.grid.half_length;
  const FrameTrajectory tr = integrate_frame(curvatures_for(p), -L, L, 1e-3, InitialFrame::standard(2), 1000, 1000);
  double drift = tr.max_drift;
  for (const auto& smp : tr.samples) drift = std::max(drift, orthonormality_defect(smp));
  bool ok = drift <= 1e-8;
  if (!ok) r.notes.push_back("frame drift " + fmt(drift) + " exceeds 1e-8");
  GridSpec fine = c.grid;
  fine.n_s = 2 * (c.grid.n_s - 1) + 1;
  // n_t stays: the ruled embedding is affine in t, the t-stencil is exact and
  // refining it would move the interior rows the maximum is taken over.
  for (double e : descending(c.epsilons)) {
    const double e1 = fff_error(p, e, c.grid);
    const double e2 = fff_error(p, e, fine);
    const double order = (e1 > 1e-13 && e2 > 0.0) ? std::log2(e1 / e2) : kNaN;
    r.records.push_back({e, drift, e1, e2, order});
    ok = ok && (e1 <= 1e-12 || order >= 1.9);
  }
  if (xyz) {
    std::ostringstream o;
    write_xyz(o, embed_profile(p, descending(c.epsilons).front(), c.grid));
    *xyz = o.str();
  }
  r.verdict = ok;
  r.criterion = "frame drift <= 1e-8 and first fundamental form error order >= 1.9";
  return r;
}

SweepReport dispatch(const ScenarioConfig& c, std::string* xyz) {
  if (c.kind == ScenarioKind::appendix) {
    if (c.theorem == "LA1") return run_robin_monotonicity(c);
    return run_limit(c, c.profile());
  }
  const StripProfile p = c.profile();
  if (c.kind == ScenarioKind::validate) return run_validate(c, p);
  if (auto gate = admissibility_gate(c, p)) return *gate;
  SweepReport r;
  switch (c.kind) {
    case ScenarioKind::spectrum:
      return run_spectrum(c, p);
    case ScenarioKind::hardy:
      return run_hardy(c, p);
    case ScenarioKind::transverse:
      return run_transverse(c, p);
    case ScenarioKind::embed:
      return run_embed(c, p, xyz);
    case ScenarioKind::sweep:
      r = c.theorem == "T8" ? scaled_strip_sweep(p, c.epsilons, c.j_max, c.policy)
                            : thin_strip_sweep(p, c.epsilons, c.j_max, c.policy);
      if (r.theorem != c.theorem) {
        r.verdict = false;
        r.notes.push_back("profile selects " + r.theorem + " but the scenario declares " + c.theorem);
      }
      break;
    case ScenarioKind::resolvent:
      r = c.theorem == "T6" ? twisted_resolvent_sweep(p, c.epsilons, c.kappa, c.policy)
                            : resolvent_sweep(p, c.epsilons, c.kappa, c.policy);
      break;
    default:
      throw InvalidInput("unhandled scenario kind");
  }
  r.scenario = c.id;
  r.theorem = c.theorem;
  return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write '" + path.string() + "'");
  f << text;
}

}  // namespace

SweepReport run_scenario(const ScenarioConfig& config) { return dispatch(config, nullptr); }

PlotSpec plot_spec_for(const ScenarioConfig& c, const SweepReport& r) {
  PlotSpec ps;
  const auto has = [&](const std::string& col) {
    return std::find(r.columns.begin(), r.columns.end(), col) != r.columns.end();
  };
  switch (c.kind) {
    case ScenarioKind::spectrum:
      ps.y_column = "margin";
      break;
    case ScenarioKind::hardy:
      ps.y_column = "constant";
      break;
    case ScenarioKind::transverse:
      ps.x_column = "s";
      ps.y_column = "gap";
      break;
    case ScenarioKind::appendix:
      if (c.theorem == "LA1") {
        ps.x_column = "instance";
        ps.y_column = "slack_bound";
      } else {
        ps.x_column = "mu";
        ps.y_column = "ratio";
        ps.log_log = true;
      }
      break;
    case ScenarioKind::sweep:
      if (c.theorem == "T5") {
        ps.y_column = "scaled";
      } else if (c.theorem == "T8") {
        ps.y_column = "relative_difference";
      } else {
        ps.y_column = "remainder";
        ps.log_log = c.theorem == "T6";
        ps.draw_fit = ps.log_log;
      }
      break;
    case ScenarioKind::resolvent:
      ps.y_column = "gap_norm";
      ps.log_log = true;
      ps.draw_fit = true;
      break;
    case ScenarioKind::embed:
      ps.y_column = "fff_error";
      break;
    case ScenarioKind::validate:
      break;
  }
  if (ps.y_column.empty() || !has(ps.y_column) || !has(ps.x_column)) {
    ps.x_column = r.columns.empty() ? "" : r.columns.front();
    ps.y_column = r.columns.size() > 1 ? r.columns[1] : ps.x_column;
    ps.log_log = false;
    ps.draw_fit = false;
  }
  return ps;
}

std::vector<ScenarioOutcome> run(const std::vector<ScenarioConfig>& configs, const RunOptions& options,
                                 std::ostream* log) {
  std::vector<ScenarioConfig> selected;
  for (ScenarioConfig c : configs) {
    if (!options.kinds.empty() &&
        std::find(options.kinds.begin(), options.kinds.end(), c.kind) == options.kinds.end()) {
      continue;
    }
    if (options.tol) {
      c.tol = *options.tol;
      c.policy.tol = *options.tol;
    }
    selected.push_back(std::move(c));
  }
  std::vector<ScenarioOutcome> out(selected.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= selected.size()) return;
      const ScenarioConfig& c = selected[k];
      ScenarioOutcome& o = out[k];
      o.config = c;
      const auto t0 = std::chrono::steady_clock::now();
      std::string xyz;
      try {
        o.report = dispatch(c, c.kind == ScenarioKind::embed ? &xyz : nullptr);
      } catch (const std::exception& e) {
        o.error = true;
        o.report = base_report(c);
        o.report.verdict = false;
        o.report.criterion = "scenario completed without error";
        o.report.notes.push_back(std::string("error: ") + e.what());
      }
      o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      std::filesystem::path dir = std::filesystem::path(options.out_dir) / c.output;
      try {
        std::filesystem::create_directories(dir);
        write_text(dir / (c.id + ".json"), to_json(o.report));
        std::ostringstream csv;
        write_csv(csv, o.report);
        write_text(dir / (c.id + ".csv"), csv.str());
        if (options.svg && !o.report.columns.empty()) {
          std::ostringstream svg;
          write_svg(svg, o.report, plot_spec_for(c, o.report));
          write_text(dir / (c.id + ".svg"), svg.str());
        }
        if (!xyz.empty()) write_text(dir / (c.id + ".xyz"), xyz);
      } catch (const std::exception& e) {
        o.error = true;
        o.report.verdict = false;
        o.report.notes.push_back(std::string("output error: ") + e.what());
      }
      if (log) {
        std::lock_guard<std::mutex> lock(log_mutex);
        *log << (o.passed() ? "PASS " : "FAIL ") << c.id << " [" << to_string(c.kind) << " " << c.theorem << "] "
             << o.report.criterion << " (" << fmt(o.seconds) << " s)\n";
        for (const auto& n : o.report.notes) *log << "     note: " << n << "\n";
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(selected.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

int exit_code(const std::vector<ScenarioOutcome>& outcomes) {
  for (const auto& o : outcomes) {
    if (!o.passed()) return 1;
  }
  return 0;
}

}  // namespace dnstrip
