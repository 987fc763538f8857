#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "noether/bargmann.hpp"
#include "noether/hamiltonian.hpp"
#include "noether/scenario.hpp"
#include "noether/virial.hpp"

namespace noether {

namespace {

constexpr int kRandomStates = 50;
constexpr int kRandomEvents = 20;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

/// Seeded sampler of positions away from singular centres.
class Sampler {
 public:
  Sampler(std::uint64_t seed, double radius) : rng_(seed), coord_(-radius, radius) {}

  Vector position(int n) {
    Vector q(n);
    do {
      for (auto& x : q) x = coord_(rng_);
    } while (q.norm() < 0.3);
    return q;
  }
  Vector velocity(int n) {
    Vector v(n);
    for (auto& x : v) x = coord_(rng_);
    return v;
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> coord_;
};

struct Context {
  const Scenario& sc;
  DynamicalSystem sys;
  Trajectory traj;
  ChargeSeries charge;
  std::optional<BargmannMetric> metric;
  std::optional<BargmannWorldline> lift;
};

IntegrateOptions integrate_options(const Scenario& sc) {
  IntegrateOptions opt;
  opt.tol = sc.tol;
  opt.grid_intervals = sc.grid_intervals;
  return opt;
}

void add(CheckResult& r, const std::string& key, double value) { r.metrics.emplace_back(key, value); }

void require(CheckResult& r, bool ok, const std::string& what) {
  if (ok) return;
  r.pass = false;
  if (!r.detail.empty()) r.detail += "; ";
  r.detail += what;
}

CheckResult check_charge(Context& ctx) {
  CheckResult r{Check::kCharge, true, {}, {}};
  const auto& th = ctx.sc.thresholds;
  const auto& law = ctx.sc.law;
  const auto& q0 = ctx.traj.samples.front();
  add(r, "Q0", ctx.charge.Q0);
  add(r, "drift_abs", ctx.charge.drift_abs);
  add(r, "drift_rel", ctx.charge.drift_rel);
  const double initial = std::abs(ctx.charge.Q0 - law.a * q0.q.dot(ctx.sys.mass_matrix() * q0.qdot));
  add(r, "initial_value_error", initial);
  require(r, ctx.charge.drift_rel <= th.charge_drift,
          "drift_rel " + fmt(ctx.charge.drift_rel) + " > " + fmt(th.charge_drift));
  require(r, initial <= 1e-12, "Q0 differs from a q(0)^T M qdot(0) by " + fmt(initial));

  const auto split = kv_split_charge(ctx.sys, law, ctx.traj);
  double gap = 0.0;
  for (std::size_t j = 0; j < split.series.Q.size(); ++j) gap = std::max(gap, std::abs(split.series.Q[j] - ctx.charge.Q[j]));
  add(r, "kv_split_gap", gap);
  require(r, gap <= th.route_agreement, "K/V split differs by " + fmt(gap));

  if (ctx.sys.is_free()) {
    const auto closed = free_dilation_charge(ctx.traj, law.a);
    double free_gap = 0.0;
    for (std::size_t j = 0; j < closed.Q.size(); ++j) free_gap = std::max(free_gap, std::abs(closed.Q[j] - ctx.charge.Q[j]));
    add(r, "free_dilation_gap", free_gap);
    if (law.a == law.b) require(r, free_gap <= th.route_agreement, "free dilation form differs by " + fmt(free_gap));
  }
  return r;
}

CheckResult check_virial(Context& ctx) {
  CheckResult r{Check::kVirial, true, {}, {}};
  const auto& first = ctx.traj.samples.front();
  const double energy = evaluate_hamiltonian(ctx.sys, PhaseState{first.q, first.qdot, 0.0});
  std::string reason;
  const double tol = ctx.sc.thresholds.virial * (1.0 + std::abs(energy));
  const auto report = periodic_virial_check(ctx.traj, tol, 1e-6, &reason);
  if (!report) {
    r.pass = false;
    r.detail = reason;
    return r;
  }
  add(r, "T", report->T);
  add(r, "avg_K", report->avg_K);
  add(r, "avg_V", report->avg_V);
  add(r, "ratio", report->ratio);
  add(r, "expected_ratio", report->expected_ratio);
  add(r, "defect", report->defect);
  require(r, report->pass, "defect " + fmt(report->defect) + " > " + fmt(tol));
  return r;
}

CheckResult check_symmetry(Context& ctx) {
  CheckResult r{Check::kSymmetryResidual, true, {}, {}};
  Sampler sampler(ctx.sc.seed, 2.0);
  std::vector<PhaseState> states;
  for (int i = 0; i < kRandomStates; ++i) {
    states.push_back(PhaseState{sampler.position(ctx.sys.dim()), sampler.velocity(ctx.sys.dim()), 0.0});
  }
  double worst = 0.0;
  for (double lambda : ctx.sc.lambda_values) {
    worst = std::max(worst, symmetry_residual(ctx.sys, ctx.sc.law, lambda, states));
  }
  add(r, "residual", worst);
  require(r, worst <= ctx.sc.thresholds.symmetry, "residual " + fmt(worst));
  return r;
}

CheckResult check_mapping(Context& ctx) {
  CheckResult r{Check::kMapping, true, {}, {}};
  const auto& th = ctx.sc.thresholds;
  const auto& law = ctx.sc.law;
  const bool periodic = is_periodic_system(ctx.sys, PhaseState{ctx.sc.q0, ctx.sc.qdot0, 0.0});
  const auto base_period = periodic ? detect_period(ctx.traj) : std::nullopt;

  double eom = 0.0;
  double action = 0.0;
  double position = 0.0;
  double period_error = 0.0;
  for (double lambda : ctx.sc.lambda_values) {
    const auto mapped = apply_scaling(ctx.traj, law, lambda);
    eom = std::max(eom, eom_residual(ctx.sys, mapped));

    const PhaseState ic{std::pow(lambda, law.a) * ctx.sc.q0, std::pow(lambda, law.a - law.b) * ctx.sc.qdot0, 0.0};
    const auto direct = integrate_trajectory(ctx.sys, ic, mapped.t_end(), integrate_options(ctx.sc));
    double scale = 0.0;
    double gap = 0.0;
    for (const auto& s : mapped.samples) {
      const auto d = sample_at(direct, s.t);
      scale = std::max(scale, std::abs(s.action));
      gap = std::max(gap, std::abs(d.action - s.action));
      position = std::max(position, (d.q - s.q).cwiseAbs().maxCoeff() / (1.0 + s.q.cwiseAbs().maxCoeff()));
    }
    action = std::max(action, gap / (1.0 + scale));

    if (base_period) {
      const auto mapped_period = detect_period(mapped);
      if (!mapped_period) {
        require(r, false, "no period detected on the curve mapped by lambda = " + fmt(lambda));
      } else {
        const double expected = std::pow(lambda, law.b);
        period_error = std::max(period_error, std::abs(*mapped_period / *base_period - expected));
      }
    }
  }
  add(r, "eom_residual", eom);
  add(r, "action_transport", action);
  add(r, "reintegration_gap", position);
  require(r, eom <= th.eom, "eom residual " + fmt(eom));
  require(r, action <= th.action_transport, "action transport " + fmt(action));
  if (base_period) {
    add(r, "period_ratio_error", period_error);
    require(r, period_error <= th.period_ratio, "period ratio off by " + fmt(period_error));
  }
  return r;
}

CheckResult check_generator(Context& ctx) {
  CheckResult r{Check::kGenerator, true, {}, {}};
  const auto& th = ctx.sc.thresholds;
  Sampler sampler(ctx.sc.seed + 1, 2.0);
  double worst = 0.0;
  for (int i = 0; i < kRandomStates; ++i) {
    const PhasePoint pt{sampler.position(ctx.sys.dim()), sampler.velocity(ctx.sys.dim()),
                        sampler.uniform(0.0, ctx.sc.t_end)};
    worst = std::max(worst, generator_residual(ctx.sys, ctx.sc.law, pt));
  }
  const double flow = generator_flow_defect(ctx.sys, ctx.sc.law, ctx.traj);
  add(r, "residual", worst);
  add(r, "flow_defect", flow);
  require(r, worst <= th.generator, "phase-space residual " + fmt(worst));
  require(r, flow <= th.generator_flow, "d/dt(G - cS) " + fmt(flow));
  return r;
}

CheckResult check_bargmann(Context& ctx) {
  CheckResult r{Check::kBargmann, true, {}, {}};
  const auto& th = ctx.sc.thresholds;
  const auto& law = ctx.sc.law;
  const auto& metric = *ctx.metric;
  const auto& lift = *ctx.lift;
  const int n = ctx.sys.dim();

  const double null = null_residual(metric, lift);
  add(r, "null_residual", null);
  require(r, null <= th.null_lift, "null residual " + fmt(null));

  GeodesicOptions gopt;
  gopt.tol = ctx.sc.tol;
  gopt.grid_intervals = ctx.sc.grid_intervals;
  const auto& start = lift.samples.front();
  const auto geodesic = upstairs_geodesic(metric, start.event(), start.tangent, ctx.sc.t_end, gopt);
  double gap = 0.0;
  for (std::size_t j = 0; j < lift.samples.size(); ++j) {
    gap = std::max(gap, (geodesic.samples[j].q - lift.samples[j].q).cwiseAbs().maxCoeff());
    gap = std::max(gap, std::abs(geodesic.samples[j].s - lift.samples[j].s));
  }
  add(r, "geodesic_gap", gap);
  require(r, gap <= th.geodesic, "upstairs geodesic deviates from the lift by " + fmt(gap));

  const auto y = ConformalVector::scaling(n, law.a, law.b);
  Sampler sampler(ctx.sc.seed + 2, 2.0);
  double defect = 0.0;
  double chi_error = 0.0;
  int signature_errors = 0;
  for (int i = 0; i < kRandomEvents; ++i) {
    const Vector x = make_event(sampler.uniform(0.0, ctx.sc.t_end), sampler.position(n), sampler.uniform(-2.0, 2.0));
    const auto lie = lie_derivative_metric(metric, y, x);
    defect = std::max(defect, lie.defect);
    chi_error = std::max(chi_error, std::abs(lie.two_chi - 2.0 * law.a));
    if (metric.negative_eigenvalues(x) != 1) ++signature_errors;
  }
  const auto psi = chrono_projective_check(y);
  add(r, "conformal_defect", defect);
  add(r, "two_chi", 2.0 * law.a);
  add(r, "two_chi_error", chi_error);
  add(r, "psi", psi ? *psi : std::nan(""));
  require(r, defect <= th.conformal, "conformal defect " + fmt(defect));
  require(r, chi_error <= th.conformal, "2chi off by " + fmt(chi_error));
  require(r, psi && std::abs(*psi - (law.b - 2.0 * law.a)) <= 1e-12, "chrono-projective factor mismatch");
  require(r, signature_errors == 0, "metric is not Lorentzian at every sampled event");

  const auto upstairs = upstairs_charge(metric, y, lift);
  const double coefficient = vertical_coefficient(y).value_or(std::nan(""));
  double route = 0.0;
  for (std::size_t j = 0; j < upstairs.Q.size(); ++j) {
    route = std::max(route, std::abs(upstairs.Q[j] - coefficient * ctx.sc.s0 - ctx.charge.Q[j]));
  }
  add(r, "vertical_coefficient", coefficient);
  add(r, "upstairs_route_gap", route);
  require(r, route <= th.route_agreement, "upstairs charge differs from Q by " + fmt(route));
  return r;
}

CheckResult check_homothety(Context& ctx) {
  CheckResult r{Check::kHomothety, true, {}, {}};
  const auto& th = ctx.sc.thresholds;
  const auto hc = homothety_charge(*ctx.lift, ctx.traj);
  add(r, "Q_hom0", hc.series.Q0);
  add(r, "drift_abs", hc.series.drift_abs);
  add(r, "drift_rel", hc.series.drift_rel);
  add(r, "route_gap", hc.route_gap);
  require(r, hc.series.drift_rel <= th.homothety, "Q_hom drift " + fmt(hc.series.drift_rel));
  require(r, hc.route_gap <= th.route_agreement, "routes differ by " + fmt(hc.route_gap));

  double null = 0.0;
  double geo = 0.0;
  for (double lambda : ctx.sc.lambda_values) {
    const auto mapped = scale_worldline(*ctx.lift, 1.0, 0.0, lambda);
    null = std::max(null, null_residual(*ctx.metric, mapped));
    geo = std::max(geo, geodesic_residual(*ctx.metric, mapped));
  }
  if (!ctx.sc.lambda_values.empty()) {
    add(r, "mapped_null_residual", null);
    add(r, "mapped_geodesic_residual", geo);
    require(r, null <= th.null_lift, "mapped worldline null residual " + fmt(null));
    require(r, geo <= th.geodesic_eq, "mapped worldline geodesic residual " + fmt(geo));
  }
  return r;
}

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::function<void(std::ostream&)>& body) {
  const auto path = dir / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  body(os);
  if (!os) throw Error("failed writing " + path.string());
  return path;
}

}  // namespace

Report run_scenario(const Scenario& sc) {
  validate(sc);
  const auto sys = sc.system();
  Context ctx{sc, sys, integrate_trajectory(sys, PhaseState{sc.q0, sc.qdot0, 0.0}, sc.t_end, integrate_options(sc)),
              {}, std::nullopt, std::nullopt};
  ctx.charge = noether_charge_series(sys, sc.law, ctx.traj);

  Report report;
  report.scenario = sc.name;
  report.facts.emplace_back("system", sys.id());
  report.facts.emplace_back("law", "(" + fmt(sc.law.a) + ", " + fmt(sc.law.b) + ", " + fmt(sc.law.c) + ")");

  const bool upstairs = sc.has_check(Check::kBargmann) || sc.has_check(Check::kHomothety);
  if (upstairs) {
    if (sc.ppwave) {
      const auto profile = sc.ppwave->kind == PPWaveKind::kBrdicka ? PPWaveProfile::brdicka(sc.ppwave->omega)
                                                                    : PPWaveProfile::isotropic_oscillator(sc.ppwave->omega);
      report.facts.emplace_back("profile", profile.name());
      report.facts.emplace_back("profile_trace", fmt(profile.trace()));
      report.facts.emplace_back("vacuum", profile.is_vacuum() ? "true" : "false");
      ctx.metric = BargmannMetric::from_profile(profile);
    } else {
      ctx.metric = BargmannMetric::from_system(sys);
    }
    ctx.lift = lift_trajectory(ctx.traj, sc.s0);
  }

  for (Check check : sc.checks) {
    switch (check) {
      case Check::kCharge: report.checks.push_back(check_charge(ctx)); break;
      case Check::kVirial: report.checks.push_back(check_virial(ctx)); break;
      case Check::kSymmetryResidual: report.checks.push_back(check_symmetry(ctx)); break;
      case Check::kMapping: report.checks.push_back(check_mapping(ctx)); break;
      case Check::kGenerator: report.checks.push_back(check_generator(ctx)); break;
      case Check::kBargmann: report.checks.push_back(check_bargmann(ctx)); break;
      case Check::kHomothety: report.checks.push_back(check_homothety(ctx)); break;
    }
  }
  report.pass = std::all_of(report.checks.begin(), report.checks.end(), [](const auto& c) { return c.pass; });

  std::filesystem::create_directories(sc.output_dir);
  report.artifacts.push_back(
      write_file(sc.output_dir, "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, ctx.traj); }));
  report.artifacts.push_back(
      write_file(sc.output_dir, "charge.csv", [&](std::ostream& os) { write_charge_csv(os, ctx.charge); }));
  if (ctx.lift) {
    report.artifacts.push_back(write_file(sc.output_dir, "worldline.csv",
                                          [&](std::ostream& os) { write_worldline_csv(os, *ctx.metric, *ctx.lift); }));
  }
  const auto report_path = sc.output_dir / "report.json";
  report.artifacts.push_back(report_path);
  write_file(sc.output_dir, "report.json", [&](std::ostream& os) { os << report.to_json(); });
  return report;
}

}  // namespace noether
