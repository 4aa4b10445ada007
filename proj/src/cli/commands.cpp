#include "conebill/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "conebill/cli/svg.hpp"
#include "conebill/curve_builder.hpp"
#include "conebill/elliptic_cone.hpp"
#include "conebill/ndim_cone.hpp"
#include "conebill/spiral_trajectory.hpp"

namespace conebill::cli {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Json envelope(const RunConfig& cfg, const std::string& kind) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  j["config"] = cfg.to_json();
  j["seed"] = cfg.seed;
  return j;
}

// One named pass/fail line with its measured value and limit.
struct Checks {
  Json list = Json::array();
  bool all = true;

  void add(const std::string& name, bool ok, double value, double limit) {
    list.push_back(Json{{"name", name}, {"passed", ok}, {"value", value}, {"limit", limit}});
    all = all && ok;
  }
};

std::string summary_lines(const Checks& c) {
  std::ostringstream os;
  for (const auto& e : c.list)
    os << (e["passed"].get<bool>() ? "PASS " : "FAIL ") << e["name"].get<std::string>()
       << "  value=" << short_number(e["value"].get<double>()) << "  limit=" << short_number(e["limit"].get<double>())
       << "\n";
  return os.str();
}

struct Csv {
  std::ostringstream os;

  explicit Csv(const std::string& schema) { os << "# schema=" << schema << "/" << kSchemaVersion << "\n"; }

  template <typename... T>
  void row(const T&... cells) {
    bool first = true;
    ((os << (first ? "" : ",") << cell(cells), first = false), ...);
    os << "\n";
  }

  static std::string cell(double x) { return format_number(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <typename I, typename = std::enable_if_t<std::is_integral_v<I>>>
  static std::string cell(I v) {
    return std::to_string(v);
  }
};

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Escaped: return "escaped";
    case Termination::MaxSteps: return "max_steps";
    case Termination::ApexFlag: return "apex";
  }
  return "unknown";
}

std::string replace_extension(const std::string& path, const std::string& ext) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ext;
  return path.substr(0, dot) + ext;
}

}  // namespace

// ---- elliptic -----------------------------------------------------------------

CommandResult cmd_elliptic_simulate(const RunConfig& cfg) {
  const EllipticCone cone(cfg.semi_a, cfg.semi_b);
  const double drift_tol = cfg.tol.value_or(1e-7);
  const int max_steps = 1000000;

  struct Row {
    double c1 = 0, c2 = 0, d1 = 0, d2 = 0, theta_sum = 0, min_margin = 0;
    long reflections = 0, bound = -1;
    Termination term = Termination::Escaped;
    bool tangency = false;
  };
  std::vector<Row> rows(static_cast<std::size_t>(cfg.count));
  auto work = [&](long i) {
    const TrajectorySeed s = sample_seed(cone, cfg.seed, static_cast<std::uint64_t>(i));
    const TrajectoryLog log = run_complete(cone, s.point, s.outgoing, max_steps);
    Row& r = rows[static_cast<std::size_t>(i)];
    r.c1 = log.integrals.front().I1;
    r.c2 = log.integrals.front().I2;
    r.d1 = log.max_I1_drift();
    r.d2 = log.max_I2_drift(cone);
    r.theta_sum = log.theta_sum();
    r.reflections = static_cast<long>(log.reflections());
    r.term = log.termination;
    r.tangency = log.tangency_warning;
    r.min_margin = std::numeric_limits<double>::infinity();
    if (r.c1 > 0.0 && r.c2 > 0.0) {
      r.bound = reflection_bound(cone, r.c1, r.c2);
      const double lo = min_vertex_angle(cone, r.c1, r.c2);
      for (double th : log.theta) r.min_margin = std::min(r.min_margin, th - lo);
    }
  };
  const int nthreads = static_cast<int>(std::min<long>(cfg.threads, cfg.count));
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t)
    pool.emplace_back([&, t] {
      for (long i = t; i < cfg.count; i += nthreads) work(i);
    });
  for (auto& th : pool) th.join();

  Csv csv("elliptic_simulate");
  csv.row("seed", "index", "c1", "c2", "reflections", "bound", "max_drift_I1", "max_drift_I2", "theta_sum",
          "min_theta_margin", "termination");
  long violations = 0, theta_violations = 0, unfinished = 0, bounded = 0;
  double max_d1 = 0, max_d2 = 0, max_theta_sum = 0, min_margin = std::numeric_limits<double>::infinity();
  long max_reflections = 0;
  for (long i = 0; i < cfg.count; ++i) {
    const Row& r = rows[static_cast<std::size_t>(i)];
    csv.row(cfg.seed, i, r.c1, r.c2, r.reflections, r.bound >= 0 ? std::to_string(r.bound) : std::string(), r.d1, r.d2,
            r.theta_sum, std::isfinite(r.min_margin) ? format_number(r.min_margin) : std::string(),
            termination_name(r.term));
    if (r.bound >= 0) {
      ++bounded;
      if (r.reflections > r.bound) ++violations;
      if (r.min_margin <= 0.0) ++theta_violations;
      min_margin = std::min(min_margin, r.min_margin);
    }
    if (r.term != Termination::Escaped) ++unfinished;
    max_d1 = std::max(max_d1, r.d1);
    max_d2 = std::max(max_d2, r.d2);
    max_theta_sum = std::max(max_theta_sum, r.theta_sum);
    max_reflections = std::max(max_reflections, r.reflections);
  }

  Checks checks;
  checks.add("reflection count <= bound", violations == 0, static_cast<double>(violations), 0.0);
  checks.add("theta_k > arcsin bound", theta_violations == 0, static_cast<double>(theta_violations), 0.0);
  checks.add("I1 drift", max_d1 < drift_tol, max_d1, drift_tol);
  checks.add("I2 drift", max_d2 < drift_tol, max_d2, drift_tol);
  checks.add("theta sum < pi", max_theta_sum < std::numbers::pi, max_theta_sum, std::numbers::pi);
  checks.add("trajectories escaped", unfinished == 0, static_cast<double>(unfinished), 0.0);

  CommandResult res;
  res.report = envelope(cfg, "elliptic_simulate");
  res.report["passed"] = checks.all;
  res.report["checks"] = checks.list;
  res.report["measured"] = Json{{"trajectories", cfg.count},
                                {"with_bound", bounded},
                                {"bound_violations", violations},
                                {"max_reflections", max_reflections},
                                {"max_drift_I1", max_d1},
                                {"max_drift_I2", max_d2},
                                {"max_theta_sum", max_theta_sum},
                                {"min_theta_margin", min_margin}};
  res.csv = csv.os.str();
  res.summary = summary_lines(checks);
  res.exit_code = checks.all ? kExitPass : kExitFail;
  return res;
}

CommandResult cmd_elliptic_bound(const RunConfig& cfg) {
  const EllipticCone cone(cfg.semi_a, cfg.semi_b);
  CommandResult res;
  const double angle = min_vertex_angle(cone, cfg.c1, cfg.c2);
  const long bound = reflection_bound(cone, cfg.c1, cfg.c2);
  res.report = envelope(cfg, "elliptic_bound");
  res.report["passed"] = true;
  res.report["measured"] = Json{{"min_vertex_angle", angle}, {"reflection_bound", bound}};
  Csv csv("elliptic_bound");
  csv.row("semi_a", "semi_b", "c1", "c2", "min_vertex_angle", "reflection_bound");
  csv.row(cfg.semi_a, cfg.semi_b, cfg.c1, cfg.c2, angle, bound);
  res.csv = csv.os.str();
  res.summary = "min vertex angle " + format_number(angle) + ", reflection bound " + std::to_string(bound) + "\n";
  return res;
}

// ---- spiral -------------------------------------------------------------------

CommandResult cmd_spiral_verify(const RunConfig& cfg) {
  const SpiralParams params = SpiralParams::make(cfg.a);
  if (params.k0 >= cfg.kmax)
    throw UsageError("k0(a) = " + std::to_string(params.k0) + " is not below --kmax");
  const long kmax = cfg.kmax;
  const Spiral spiral(params, kmax);
  const double dist_tol = cfg.tol.value_or(1e-10);
  const double angle_tol = 1e-11, rec_tol = 1e-11, length_tol = 1e-8;

  long first_fail = -1;
  auto note = [&](bool ok, long k) {
    if (!ok && (first_fail < 0 || k < first_fail)) first_fail = k;
  };

  double max_dist = 0.0, max_angle = 0.0;
  for (long k = params.k0; k <= kmax; ++k) {
    const double d = std::abs(spiral.verify_distance(k));
    max_dist = std::max(max_dist, d);
    note(d < dist_tol, k);
    if (k > params.k0) {
      const auto e = spiral.verify_equal_angles(k);
      const double g = std::abs(e.alpha - e.beta);
      max_angle = std::max(max_angle, g);
      note(g < angle_tol, k);
    }
  }
  std::vector<ReflectionRecord<3>> records;
  records.reserve(static_cast<std::size_t>(kmax - params.k0 + 1));
  for (long k = params.k0; k <= kmax; ++k) records.push_back(spiral.record(k));
  const AlphaThetaReport at = alpha_theta_residuals<3>(records);
  double max_rec = 0.0;
  for (std::size_t i = 0; i < at.recurrence.size(); ++i) {
    const double r = std::abs(at.recurrence[i]);
    max_rec = std::max(max_rec, r);
    note(r < rec_tol, params.k0 + static_cast<long>(i));
  }

  const double sum = spiral.partial_length_sum(kmax);
  const double closed = spiral.partial_length_closed(kmax);
  const double length_gap = std::abs(sum - closed);
  note(length_gap < length_tol, kmax);
  const TotalLength total = total_length(params);

  Checks checks;
  checks.add("|dist(l_k,O) - sqrt2|", max_dist < dist_tol, max_dist, dist_tol);
  checks.add("|alpha_k - beta_k|", max_angle < angle_tol, max_angle, angle_tol);
  checks.add("alpha recurrence", max_rec < rec_tol, max_rec, rec_tol);
  checks.add("partial length vs closed form", length_gap < length_tol, length_gap, length_tol);

  Json sigma = Json::array();
  for (long k = 10000; k <= kmax; k *= 10) {
    const double v = spiral_sigma(k) * std::pow(static_cast<double>(k), 2.5);
    const double rel = std::abs(v / 0.1875 - 1.0);
    const double lim = k >= 1000000 ? 1e-3 : 1e-2;
    checks.add("sigma_k k^(5/2) / (3/16) - 1 at k=" + std::to_string(k), rel < lim, rel, lim);
    note(rel < lim, k);
    sigma.push_back(Json{{"k", k}, {"scaled_sigma", v}});
  }

  CommandResult res;
  res.report = envelope(cfg, "spiral_verify");
  res.report["passed"] = checks.all;
  res.report["checks"] = checks.list;
  res.report["first_failing_k"] = first_fail;
  res.report["measured"] = Json{{"k0", params.k0},
                                {"kmax", kmax},
                                {"S_k0", spiral.S(params.k0)},
                                {"partial_length_sum", sum},
                                {"partial_length_closed", closed},
                                {"total_length_infinite", total.infinite},
                                {"total_length", total.infinite ? Json(nullptr) : Json(total.value)},
                                {"sigma", sigma}};
  res.summary = "k0 = " + std::to_string(params.k0) + ", total length " +
                (total.infinite ? std::string("infinite") : format_number(total.value)) + "\n" +
                summary_lines(checks);
  if (first_fail >= 0) res.summary += "first failing k = " + std::to_string(first_fail) + "\n";
  res.exit_code = checks.all ? kExitPass : kExitFail;
  return res;
}

CommandResult cmd_spiral_vertices(const RunConfig& cfg) {
  const SpiralParams params = SpiralParams::make(cfg.a);
  if (params.k0 > cfg.kmax) throw UsageError("k0(a) = " + std::to_string(params.k0) + " exceeds --kmax");
  const Spiral spiral(params, cfg.kmax);
  Csv csv("spiral_vertices");
  csv.row("k", "xi", "S", "A", "t", "x1", "x2", "x3", "chord_length");
  Json rows = Json::array();
  for (long k = params.k0; k <= cfg.kmax; ++k) {
    const Vec3 p = spiral.vertex(k);
    const double len = spiral.chord_length(k);
    csv.row(k, spiral_xi(k), spiral.S(k), spiral.A(k), spiral.t(k), p[0], p[1], p[2], len);
    if (cfg.format == OutputFormat::Json)
      rows.push_back(Json{{"k", k}, {"S", spiral.S(k)}, {"t", spiral.t(k)}, {"p", {p[0], p[1], p[2]}}, {"chord_length", len}});
  }
  CommandResult res;
  res.report = envelope(cfg, "spiral_vertices");
  res.report["passed"] = true;
  res.report["k0"] = params.k0;
  res.report["vertices"] = rows;
  res.csv = csv.os.str();
  res.summary = std::to_string(cfg.kmax - params.k0 + 1) + " vertices from k0 = " + std::to_string(params.k0) + "\n";
  return res;
}

// ---- curve --------------------------------------------------------------------

namespace {

constexpr int kPersistedSamples = 4001;

// ξ grid stored in the curve file: dense on [0, 2ξ_{k1}], coarse elsewhere.
std::vector<double> persisted_grid(const BuiltCurve& curve) {
  std::vector<double> xs;
  const double top = 2.0 * spiral_xi(curve.k1());
  for (int i = 0; i < kPersistedSamples; ++i) xs.push_back(top * (i + 0.5) / kPersistedSamples);
  for (int i = 0; i < 720; ++i) xs.push_back(-std::numbers::pi + 2.0 * std::numbers::pi * (i + 0.5) / 720);
  return xs;
}

Json curve_table(const BuiltCurve& curve) {
  Json xi = Json::array(), rho = Json::array(), d1 = Json::array(), d2 = Json::array(), kappa = Json::array();
  for (double x : persisted_grid(curve)) {
    const PolarSample s = curve.sample(x);
    xi.push_back(x);
    rho.push_back(s.rho());
    d1.push_back(s.d1);
    d2.push_back(s.d2);
    kappa.push_back(polar_curvature(s));
  }
  return Json{{"xi", xi}, {"rho", rho}, {"d1", d1}, {"d2", d2}, {"kappa", kappa}};
}

}  // namespace

CommandResult cmd_curve_build(const RunConfig& cfg) {
  const SpiralParams params = SpiralParams::make(cfg.a);
  const auto curve = BuiltCurve::build(params);
  const double junction_tol = cfg.tol.value_or(1e-10);
  const long census_hi = std::max(cfg.kmax > 0 ? std::min(cfg.kmax, 10000L) : 10000L, curve->k1() + 1);

  const CurvatureSurvey survey = curvature_survey(*curve);
  C2CheckOptions c2opts;
  c2opts.throw_on_failure = false;
  const C2Report c2 = c2_check_at_zero(*curve, c2opts);
  const long census = sign_change_census(*curve, curve->k1() + 1, census_hi);
  const long expected = census_hi - curve->k1();

  Checks checks;
  checks.add("min curvature > 1/2", survey.min_kappa > 0.5, survey.min_kappa, 0.5);
  checks.add("curvature samples >= 1e5", survey.samples >= 100000, static_cast<double>(survey.samples), 1e5);
  checks.add("junction jump rho", survey.junction_rho < junction_tol, survey.junction_rho, junction_tol);
  checks.add("junction jump rho'", survey.junction_d1 < junction_tol, survey.junction_d1, junction_tol);
  checks.add("junction jump rho''", survey.junction_d2 < junction_tol, survey.junction_d2, junction_tol);
  checks.add("slope |rho-1| vs -4", c2.dev.ok, c2.dev.slope, -4.0);
  checks.add("slope |rho'| vs -2.5", c2.d1.ok, c2.d1.slope, -2.5);
  checks.add("slope |rho''| vs -1", c2.d2.ok, c2.d2.slope, -1.0);
  checks.add("sign changes in (k1, " + std::to_string(census_hi) + "]", census == expected,
             static_cast<double>(census), static_cast<double>(expected));

  Json curve_json;
  curve_json["schema_version"] = kSchemaVersion;
  curve_json["kind"] = "curve";
  curve_json["params"] = Json{{"a", params.a}, {"tail_tol", params.tail_tol}, {"k0", params.k0}};
  const CurveBuildOptions& o = curve->options();
  curve_json["options"] = Json{{"kappa_threshold", o.kappa_threshold},
                               {"min_k1", o.min_k1},
                               {"scan_k_max", o.scan_k_max},
                               {"samples_per_window", o.samples_per_window}};
  curve_json["k1"] = curve->k1();
  curve_json["min_sampled_kappa"] = curve->min_sampled_kappa();
  curve_json["envelope"] = Json{{"dev", {{"slope", c2.dev.slope}, {"constant", c2.dev.constant}}},
                                {"d1", {{"slope", c2.d1.slope}, {"constant", c2.d1.constant}}},
                                {"d2", {{"slope", c2.d2.slope}, {"constant", c2.d2.constant}}}};
  curve_json["table"] = curve_table(*curve);

  CommandResult res;
  res.report = envelope(cfg, "curve_build");
  res.report["passed"] = checks.all;
  res.report["checks"] = checks.list;
  res.report["measured"] = Json{{"k1", curve->k1()},
                                {"curvature_samples", survey.samples},
                                {"min_kappa", survey.min_kappa},
                                {"argmin_xi", survey.argmin_xi},
                                {"sign_changes", census}};
  res.report["curve"] = curve_json;
  const std::string svg_path = !cfg.svg.empty() ? cfg.svg : (!cfg.out.empty() ? replace_extension(cfg.out, ".svg") : "");
  if (!svg_path.empty()) res.files.emplace_back(svg_path, curve_svg(*curve));
  res.summary = "k1 = " + std::to_string(curve->k1()) + "\n" + summary_lines(checks);
  res.exit_code = checks.all ? kExitPass : kExitFail;
  return res;
}

CommandResult cmd_curve_export(const RunConfig& cfg) {
  CommandResult res;
  res.report = envelope(cfg, "curve_export");
  std::shared_ptr<const BuiltCurve> curve;
  Json stored;
  if (!cfg.from.empty()) {
    std::ifstream in(cfg.from);
    if (!in) throw UsageError("cannot read " + cfg.from);
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("malformed curve file: " + std::string(e.what()));
    }
    const Json& c = doc.contains("curve") ? doc["curve"] : doc;
    if (c.value("kind", "") != "curve" || c.value("schema_version", -1) != kSchemaVersion)
      throw UsageError("not a version-" + std::to_string(kSchemaVersion) + " curve file");
    SpiralParams params = SpiralParams::make(c["params"]["a"].get<double>(), c["params"]["tail_tol"].get<double>());
    CurveBuildOptions o;
    o.kappa_threshold = c["options"]["kappa_threshold"].get<double>();
    o.min_k1 = c["options"]["min_k1"].get<long>();
    o.scan_k_max = c["options"]["scan_k_max"].get<long>();
    o.samples_per_window = c["options"]["samples_per_window"].get<int>();
    curve = BuiltCurve::build(params, o);
    stored = c;
  } else {
    curve = BuiltCurve::build(SpiralParams::make(cfg.a));
  }

  const Json table = curve_table(*curve);
  long mismatches = 0;
  if (!stored.is_null()) {
    if (stored["k1"].get<long>() != curve->k1()) ++mismatches;
    const Json& old = stored["table"]["kappa"];
    const Json& now = table["kappa"];
    if (old.size() != now.size()) {
      ++mismatches;
    } else {
      for (std::size_t i = 0; i < old.size(); ++i)
        if (format_number(old[i].get<double>()) != format_number(now[i].get<double>())) ++mismatches;
    }
  }

  Csv csv("curve_export");
  csv.row("xi", "rho", "rho_d1", "rho_d2", "kappa");
  for (std::size_t i = 0; i < table["xi"].size(); ++i)
    csv.row(table["xi"][i].get<double>(), table["rho"][i].get<double>(), table["d1"][i].get<double>(),
            table["d2"][i].get<double>(), table["kappa"][i].get<double>());
  res.csv = csv.os.str();
  res.report["passed"] = mismatches == 0;
  res.report["k1"] = curve->k1();
  res.report["reproduced_from"] = cfg.from;
  res.report["mismatches"] = mismatches;
  res.report["table"] = table;
  res.summary = stored.is_null() ? "exported " + std::to_string(table["xi"].size()) + " samples\n"
                                 : "kappa samples reproduced: " + std::string(mismatches == 0 ? "yes" : "no") +
                                       " (" + std::to_string(mismatches) + " mismatches)\n";
  res.exit_code = mismatches == 0 ? kExitPass : kExitFail;
  return res;
}

// ---- replay -------------------------------------------------------------------

CommandResult cmd_replay(const RunConfig& cfg) {
  const SpiralParams params = SpiralParams::make(cfg.a);
  const auto curve = BuiltCurve::build(params);
  const double vertex_tol = cfg.tol.value_or(1e-7);
  const double length_tol = 1e-6;
  CommandResult res;
  res.report = envelope(cfg, "replay");
  ReplayReport rep;
  try {
    rep = replay(curve, cfg.steps, 0, vertex_tol);
  } catch (const ReplayFailure& e) {
    res.report["passed"] = false;
    res.report["first_failing_k"] = e.first_failing_index();
    res.report["error"] = e.what();
    res.summary = std::string("replay failed: ") + e.what() + "\n";
    res.exit_code = kExitFail;
    return res;
  }
  const bool finite = std::abs(params.a) < kHalfPi;
  const long k_end = rep.k_start + rep.steps;
  const Spiral spiral(params, k_end);
  // Closed-form length of the trajectory from p_{k_start} on.
  const double from_start =
      finite ? std::numbers::sqrt2 * std::sin(spiral.S(rep.k_start)) / (std::cos(spiral.A(rep.k_start)) * std::cos(params.a))
             : std::numeric_limits<double>::infinity();
  const double gap = std::abs(rep.cumulative_length - rep.closed_partial_length);

  Checks checks;
  checks.add("max vertex error", rep.max_vertex_error < vertex_tol, rep.max_vertex_error, vertex_tol);
  checks.add("cumulative vs closed-form partial length", gap < length_tol, gap, length_tol);
  checks.add("length increasing", rep.length_increasing, rep.length_increasing ? 1.0 : 0.0, 1.0);
  double closure = std::numeric_limits<double>::quiet_NaN();
  if (finite) {
    closure = std::abs(rep.cumulative_length + rep.remaining_length - from_start);
    checks.add("cumulative + remaining = total", closure < length_tol, closure, length_tol);
  }

  Csv csv("replay");
  csv.row("step", "k", "cumulative_length");
  for (std::size_t i = 0; i < rep.partial_lengths.size(); ++i)
    csv.row(static_cast<long>(i + 1), rep.k_start + static_cast<long>(i) + 1, rep.partial_lengths[i]);

  res.report["passed"] = checks.all;
  res.report["checks"] = checks.list;
  res.report["measured"] = Json{{"k1", curve->k1()},
                                {"k_start", rep.k_start},
                                {"steps", rep.steps},
                                {"max_vertex_error", rep.max_vertex_error},
                                {"max_distance_sq_error", rep.max_distance_sq_error},
                                {"cumulative_length", rep.cumulative_length},
                                {"flight_time", rep.cumulative_length},
                                {"closed_partial_length", rep.closed_partial_length},
                                {"remaining_length", finite ? Json(rep.remaining_length) : Json(nullptr)},
                                {"total_from_start", finite ? Json(from_start) : Json(nullptr)},
                                {"length_infinite", !finite},
                                {"converges", finite}};
  res.csv = csv.os.str();
  res.summary = "replayed " + std::to_string(rep.steps) + " reflections from k = " + std::to_string(rep.k_start) +
                ", flight length " + format_number(rep.cumulative_length) +
                (finite ? ", closed-form total " + format_number(from_start) : std::string(", total infinite")) + "\n" +
                summary_lines(checks);
  res.exit_code = checks.all ? kExitPass : kExitFail;
  return res;
}

// ---- ndim ---------------------------------------------------------------------

CommandResult cmd_ndim_check(const RunConfig& cfg) {
  const SpiralParams params = SpiralParams::make(0.0);
  CurveBuildOptions o;
  o.min_k1 = lift_min_k1();
  const auto curve = BuiltCurve::build(params, o);
  const LiftedSection lifted(curve, cfg.n);
  NegdefOptions nopt;
  nopt.target_points = cfg.points;
  const NegdefReport neg = negdef_check(lifted, nopt, false);
  const double emb_tol = cfg.tol.value_or(1e-10);
  const long k_lo = std::max(curve->k1() + 1, params.k0 + 1);
  const Spiral spiral(params, k_lo + cfg.steps + 1);
  const EmbeddedReport emb = embedded_reflection_check(spiral, lifted, k_lo, cfg.steps);

  Checks checks;
  checks.add("max Hessian eigenvalue < 0", neg.failures.empty(), neg.max_eigenvalue, 0.0);
  checks.add("completed-square oracle agrees", neg.oracle_disagreements == 0,
             static_cast<double>(neg.oracle_disagreements), 0.0);
  checks.add("sup f1 f1'' + f1'^2 < 0", neg.max_scalar_margin < 0.0, neg.max_scalar_margin, 0.0);
  checks.add("window bound on (0, 1/3)", neg.max_scalar_margin_window < neg.window_bound, neg.max_scalar_margin_window,
             neg.window_bound);
  checks.add("window ranges of f1, f1'", neg.window_bounds_ok, neg.window_bounds_ok ? 1.0 : 0.0, 1.0);
  checks.add("embedded tangential residual", emb.max_residual() < emb_tol, emb.max_residual(), emb_tol);

  Json failures = Json::array();
  for (const auto& f : neg.failures) failures.push_back(Json{{"point", f.point}, {"max_eigenvalue", f.max_eigenvalue}});
  CommandResult res;
  res.report = envelope(cfg, "ndim_check");
  res.report["passed"] = checks.all;
  res.report["checks"] = checks.list;
  res.report["n"] = neg.n;
  res.report["grid_size"] = neg.grid_size;
  res.report["max_eigenvalue"] = neg.max_eigenvalue;
  res.report["margin"] = neg.margin;
  res.report["failures"] = failures;
  res.report["measured"] = Json{{"k1", curve->k1()},
                                {"max_scalar_margin", neg.max_scalar_margin},
                                {"max_scalar_margin_window", neg.max_scalar_margin_window},
                                {"window_bound", neg.window_bound},
                                {"f1_prime_range", {neg.min_d1_window, neg.max_d1_window}},
                                {"f1_range", {neg.min_f_window, neg.max_f_window}},
                                {"embedded_k_lo", emb.k_lo},
                                {"embedded_count", emb.count},
                                {"embedded_perpendicular", emb.max_perpendicular},
                                {"embedded_e1", emb.max_e1},
                                {"embedded_e2", emb.max_e2}};
  res.summary = "n = " + std::to_string(neg.n) + ", grid " + std::to_string(neg.grid_size) + ", k1 = " +
                std::to_string(curve->k1()) + "\n" + summary_lines(checks);
  res.exit_code = checks.all ? kExitPass : kExitFail;
  return res;
}

// ---- dispatch -----------------------------------------------------------------

CommandResult run_command(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.command == "elliptic simulate") return cmd_elliptic_simulate(cfg);
  if (cfg.command == "elliptic bound") return cmd_elliptic_bound(cfg);
  if (cfg.command == "spiral verify") return cmd_spiral_verify(cfg);
  if (cfg.command == "spiral vertices") return cmd_spiral_vertices(cfg);
  if (cfg.command == "curve build") return cmd_curve_build(cfg);
  if (cfg.command == "curve export") return cmd_curve_export(cfg);
  if (cfg.command == "replay") return cmd_replay(cfg);
  if (cfg.command == "ndim check") return cmd_ndim_check(cfg);
  throw UsageError("unknown command: " + cfg.command);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string format = "json";
  bool format_given = false;

  CLI::App app{"Billiards in cones: simulation and verification"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* c) {
    c->add_option("--out", cfg.out, "Write the primary output to this file");
    c->add_option("--format", format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->each([&](const std::string&) { format_given = true; });
    c->add_option("--tol", cfg.tol, "Override the primary tolerance");
    c->add_option("--seed", cfg.seed, "Random seed");
  };

  auto* elliptic = app.add_subcommand("elliptic", "Billiard inside the elliptic cone");
  elliptic->require_subcommand(1);
  auto* e_sim = elliptic->add_subcommand("simulate", "Random trajectories against the reflection bound");
  auto* e_bound = elliptic->add_subcommand("bound", "Vertex-angle and reflection-count bound");
  for (auto* c : {e_sim, e_bound}) {
    common(c);
    c->add_option("--semi-a", cfg.semi_a, "Semi-axis a (a > b > 0)");
    c->add_option("--semi-b", cfg.semi_b, "Semi-axis b");
  }
  e_sim->add_option("--count", cfg.count, "Number of trajectories");
  e_bound->add_option("--c1", cfg.c1, "Value of I1");
  e_bound->add_option("--c2", cfg.c2, "Value of I2");

  auto* spiral = app.add_subcommand("spiral", "The vertex sequence p_k");
  spiral->require_subcommand(1);
  auto* s_verify = spiral->add_subcommand("verify", "Distance, angle, length and sigma checks");
  auto* s_vertices = spiral->add_subcommand("vertices", "Vertex table");
  for (auto* c : {s_verify, s_vertices}) {
    common(c);
    c->add_option("--a", cfg.a, "Parameter a in (-pi/2, pi/2]");
    c->add_option("--kmax", cfg.kmax, "Largest index");
  }

  auto* curve = app.add_subcommand("curve", "The constructed cross-section");
  curve->require_subcommand(1);
  auto* c_build = curve->add_subcommand("build", "Build, verify and persist the curve");
  auto* c_export = curve->add_subcommand("export", "Sample table, optionally rebuilt from a curve file");
  for (auto* c : {c_build, c_export}) {
    common(c);
    c->add_option("--a", cfg.a, "Parameter a");
  }
  c_build->add_option("--kmax", cfg.kmax, "Upper end of the sign-change census (at most 1e4)");
  c_build->add_option("--svg", cfg.svg, "SVG output path");
  c_export->add_option("--from", cfg.from, "Curve JSON written by `curve build`");

  auto* rp = app.add_subcommand("replay", "Simulate the cone over the built curve");
  common(rp);
  rp->add_option("--a", cfg.a, "Parameter a");
  rp->add_option("--steps", cfg.steps, "Number of reflections");

  auto* ndim = app.add_subcommand("ndim", "The lifted hypersurface in R^n");
  ndim->require_subcommand(1);
  auto* n_check = ndim->add_subcommand("check", "Hessian definiteness and embedded trajectory");
  common(n_check);
  n_check->add_option("--n", cfg.n, "Dimension n");
  n_check->add_option("--points", cfg.points, "Grid size");
  n_check->add_option("--steps", cfg.steps, "Embedded reflections");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  if (e_sim->parsed()) cfg.command = "elliptic simulate";
  else if (e_bound->parsed()) cfg.command = "elliptic bound";
  else if (s_verify->parsed()) cfg.command = "spiral verify";
  else if (s_vertices->parsed()) cfg.command = "spiral vertices";
  else if (c_build->parsed()) cfg.command = "curve build";
  else if (c_export->parsed()) cfg.command = "curve export";
  else if (rp->parsed()) cfg.command = "replay";
  else if (n_check->parsed()) cfg.command = "ndim check";

  const auto t0 = std::chrono::steady_clock::now();
  CommandResult res;
  try {
    if (cfg.command == "elliptic simulate" && !format_given) format = "csv";
    cfg.format = parse_format(format);
    cfg.threads = threads_from_env();
    res = run_command(cfg);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BilliardsError& e) {
    err << "verification failure: " << e.what() << "\n";
    return kExitFail;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // Single writer: everything is emitted here, after the command has finished.
  const bool csv = cfg.format == OutputFormat::Csv && !res.csv.empty();
  const std::string primary = csv ? res.csv : dump_json(res.report);
  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      err << "cannot write " << cfg.out << "\n";
      return kExitUsage;
    }
    f << primary;
    out << res.summary;
  } else {
    out << primary;
    err << res.summary;
  }
  for (const auto& [path, content] : res.files) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      err << "cannot write " << path << "\n";
      return kExitUsage;
    }
    f << content;
  }
  err << "wall time " << short_number(wall) << " s\n";
  return res.exit_code;
}

}  // namespace conebill::cli
