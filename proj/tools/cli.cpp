#include "cli.hpp"

#include "pareto/apps.hpp"
#include "pareto/atlas.hpp"
#include "pareto/atlas_io.hpp"
#include "pareto/diagnostics.hpp"
#include "pareto/parallel.hpp"
#include "pareto/perturb.hpp"
#include "pareto/problem.hpp"
#include "pareto/problem_io.hpp"
#include "pareto/solver.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace pareto::cli {

using nlohmann::json;

namespace {

// Input problems that fail validation, bad flags, unreadable files.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

std::string fmt(const VectorXd& v) {
  std::ostringstream os;
  os << std::setprecision(10);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v(i);
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Problem sources

struct Source {
  std::string file;
  std::string builtin;
  double epsilon = 0.1;
  double mu = 0.1;
  std::uint64_t seed = 0;
};

const std::vector<std::string> kBuiltins{"example31",        "example31-perturbed", "example32",
                                         "remark-g",         "location-triangle",   "ridge-demo"};

FamilySpec builtinSpec(const Source& s) {
  if (s.builtin == "example31") return Example31{};
  if (s.builtin == "example31-perturbed") return Example31Perturbed{s.epsilon};
  if (s.builtin == "example32") return Example32{};
  if (s.builtin == "remark-g") return RemarkG{};
  if (s.builtin == "location-triangle") {
    VectorXd a(2), b(2), c(2);
    a << 0, 0;
    b << 1, 0;
    c << 0, 1;
    return DistanceSquared{{a, b, c}};
  }
  if (s.builtin == "ridge-demo") return syntheticRidge(20, 5, s.mu, s.seed).spec();
  throw InputError("unknown builtin '" + s.builtin + "'");
}

FamilySpec loadSpec(const Source& s) {
  if (s.file.empty() == s.builtin.empty())
    throw InputError("give exactly one of a problem file or --builtin");
  if (!s.builtin.empty()) {
    auto spec = builtinSpec(s);
    validateSpec(spec);
    return spec;
  }
  return loadProblemFile(s.file);
}

void addSourceOptions(CLI::App* cmd, Source& s) {
  cmd->add_option("problem", s.file, "problem JSON file");
  cmd->add_option("--builtin", s.builtin, "built-in fixture")->check(CLI::IsMember(kBuiltins));
  cmd->add_option("--epsilon", s.epsilon, "epsilon for example31-perturbed");
}

// ---------------------------------------------------------------------------
// Run report

struct Report {
  json j;
  bool asJson = false;
  std::ostringstream text;

  Report(const std::string& command) {
    j["command"] = command;
    j["tolerances"] = json::object();
    j["metrics"] = json::object();
    j["outputs"] = json::array();
  }
  void input(const FamilySpec& spec) {
    j["input"] = {{"family", familyName(spec)}, {"digest", problemDigest(spec)}};
  }
  int finish(int code, std::ostream& out) {
    j["exit_status"] = code;
    if (asJson)
      out << j.dump(2) << '\n';
    else
      out << text.str();
    return code;
  }
};

void writeFile(const std::string& path, const std::string& content, Report& rep) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << content;
  rep.j["outputs"].push_back(path);
  rep.text << "wrote " << path << '\n';
}

// Shared diagnostics for atlas and verify.
struct Diagnosis {
  CorankCertificate corank;
  FaceConsistencyReport faces;
  InjectivityReport injectivity;
  DominanceReport dominance;
  bool certified = false;
};

Diagnosis diagnose(const Problem& p, const ParetoAtlas& atlas, const SolverConfig& cfg, double tau) {
  Diagnosis d;
  d.corank = certifyCorankOnAtlas(p, atlas, tau);
  d.faces = faceConsistency(p, atlas, cfg);
  d.injectivity = injectivityScan(atlas);
  d.dominance = mutualNonDomination(atlas);
  d.certified = d.corank.simplicialOnSample() && d.faces.consistent && d.injectivity.injective &&
                atlas.summary.failedNodes == 0;
  return d;
}

void describe(const ParetoAtlas& atlas, const Diagnosis& d, Report& rep, bool witnesses) {
  const auto& s = atlas.summary;
  rep.j["metrics"]["summary"] = summaryToJson(s);
  rep.j["metrics"]["corank"] = certificateToJson(d.corank);
  rep.j["metrics"]["faces"] = faceReportToJson(d.faces);
  rep.j["metrics"]["injectivity"] = injectivityToJson(d.injectivity);
  rep.j["metrics"]["non_dominated"] = d.dominance.nonDominated;
  rep.j["metrics"]["simplicial_certificate"] = d.certified;

  auto& t = rep.text;
  t << "nodes: " << atlas.points.size() << " (resolution " << atlas.grid.resolution() << ", "
    << s.failedNodes << " failed)\n";
  t << "max KKT residual: " << sci(s.maxKktResidual) << '\n';
  t << "corank histogram:";
  for (std::size_t k = 0; k < s.corankHistogram.size(); ++k) t << ' ' << k << ':' << s.corankHistogram[k];
  t << "\nmax corank: " << d.corank.maxCorank << " (tau " << sci(d.corank.tau) << ")\n";
  t << "face consistency: " << (d.faces.consistent ? "ok" : "FAILED") << " (max "
    << sci(d.faces.maxDiscrepancy) << ", tol " << sci(d.faces.tolerance) << ")\n";
  t << "injectivity: "
    << (d.injectivity.injective ? "ok"
                                : "NON-INJECTIVE, " + std::to_string(d.injectivity.collapsedPairs.size()) +
                                      " collapsed pairs")
    << '\n';
  t << "non-domination: " << (d.dominance.nonDominated ? "ok" : "FAILED") << '\n';
  t << "dispersion (max adjacent |dx|): " << sci(s.maxAdjacentXDistance) << '\n';
  t << "simplicial certificate: " << (d.certified ? "PASS" : "FAIL") << '\n';
  if (witnesses) {
    std::size_t shown = 0;
    for (const auto& w : d.corank.witnesses) {
      if (shown++ == 10) break;
      t << "  corank " << w.corank << " at node " << w.node << ": w = (" << fmt(w.w) << "), x = ("
        << fmt(w.x) << ")\n";
    }
    for (std::size_t k = 0; k < std::min<std::size_t>(10, d.injectivity.collapsedPairs.size()); ++k) {
      const auto [a, b] = d.injectivity.collapsedPairs[k];
      t << "  collapse: w = (" << fmt(atlas.points[a].w.coords()) << ") and ("
        << fmt(atlas.points[b].w.coords()) << ") -> x = (" << fmt(atlas.points[a].x) << ")\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Commands

struct Common {
  bool json = false;
  int threads = 0;
  int resolution = 20;
  double tau = 1e-8;
  std::string out;
};

void requireResolution(int r) {
  if (r < 1) throw InputError("--resolution must be >= 1");
}

int cmdSolve(const Source& src, const Common& c, const std::vector<double>& weights, std::ostream& out) {
  Report rep("solve");
  rep.asJson = c.json;
  const FamilySpec spec = loadSpec(src);
  rep.input(spec);
  const Problem p = Problem::build(spec);
  if (static_cast<int>(weights.size()) != p.m())
    throw InputError("--w needs " + std::to_string(p.m()) + " weights");
  Weight w = [&] {
    try {
      return Weight::make(Eigen::Map<const VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size())));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }();
  SolverConfig cfg;
  cfg.rankTol = c.tau;
  const ParetoPoint pt = scalarize(p, w, cfg);
  rep.j["tolerances"] = {{"grad_tol", cfg.gradTol}, {"tau", c.tau}};
  rep.j["metrics"]["point"] = pointToJson(pt);
  rep.text << std::setprecision(12) << "w        = " << fmt(pt.w.coords()) << "\nx        = " << fmt(pt.x)
           << "\nf(x)     = " << fmt(pt.fx) << "\nresidual = " << sci(pt.kktResidual)
           << "\ncorank   = " << pt.corank << "\nstatus   = " << toString(pt.status) << '\n';
  return rep.finish(pt.converged() ? kPass : kNumericalFailure, out);
}

int cmdAtlas(const Source& src, const Common& c, bool verify, std::ostream& out) {
  Report rep(verify ? "verify" : "atlas");
  rep.asJson = c.json;
  requireResolution(c.resolution);
  const FamilySpec spec = loadSpec(src);
  rep.input(spec);
  const Problem p = Problem::build(spec);
  SolverConfig cfg;
  cfg.rankTol = c.tau;
  const ParetoAtlas atlas = buildAtlas(p, c.resolution, cfg);
  const Diagnosis d = diagnose(p, atlas, cfg, c.tau);
  rep.j["tolerances"] = {{"grad_tol", cfg.gradTol},
                         {"tau", c.tau},
                         {"collapse_tol", d.injectivity.collapseTol},
                         {"face_tol", d.faces.tolerance},
                         {"dominance_tol", 1e-9}};
  rep.j["metrics"]["resolution"] = c.resolution;
  describe(atlas, d, rep, verify);
  if (!verify) {
    const std::string prefix = c.out.empty() ? "atlas" : c.out;
    std::ostringstream csv;
    writeAtlasCsv(csv, atlas);
    writeFile(prefix + ".csv", csv.str(), rep);
    json j = atlasToJson(atlas);
    j["problem"] = problemToJson(spec);
    j["diagnostics"] = rep.j["metrics"];
    writeFile(prefix + ".json", j.dump(2) + "\n", rep);
    return rep.finish(atlas.summary.failedNodes == 0 ? kPass : kNumericalFailure, out);
  }
  if (atlas.summary.failedNodes > 0) return rep.finish(kNumericalFailure, out);
  return rep.finish(d.certified ? kPass : kCertificateFailed, out);
}

struct PerturbFlags {
  int trials = 20;
  double scale = 0.1;
  std::vector<double> taus;
  bool track = false;
  bool stability = false;
  std::vector<double> scales{1e-1, 1e-2, 1e-3};
};

int cmdPerturb(const Source& src, const Common& c, const PerturbFlags& f, std::ostream& out) {
  Report rep("perturb");
  rep.asJson = c.json;
  if (f.trials < 1) throw InputError("--trials must be >= 1");
  if (!(f.scale >= 0.0)) throw InputError("--scale must be >= 0");
  const FamilySpec spec = loadSpec(src);
  rep.input(spec);
  const Problem p = Problem::build(spec);
  rep.j["metrics"]["seed"] = src.seed;
  auto& t = rep.text;

  if (f.track) {
    TrackerConfig cfg;
    cfg.tau = c.tau;
    rep.j["tolerances"] = {{"newton_tol", cfg.tol}, {"accept", cfg.accept}, {"tau", cfg.tau}};
    json trials = json::array();
    bool all = true, numerical = false;
    for (int k = 0; k < f.trials; ++k) {
      const std::uint64_t seed = src.seed + static_cast<std::uint64_t>(k);
      json row{{"seed", seed}};
      try {
        const auto tr = corank2Tracker(p, LinearPerturbation::sample(p.m(), p.n(), seed, f.scale), cfg);
        const bool ok = tr.corank == 2 && tr.meetsSimplexInterior;
        all = all && ok;
        row.update({{"x_hat", vec(tr.xHat)},
                    {"residual", tr.residual},
                    {"corank", tr.corank},
                    {"cokernel_meets_interior", tr.meetsSimplexInterior},
                    {"interior_margin", tr.interiorMargin}});
        t << "seed " << seed << ": |E| = " << sci(tr.residual) << ", corank " << tr.corank
          << ", cokernel meets interior: " << (tr.meetsSimplexInterior ? "yes" : "no") << '\n';
      } catch (const NumericalError& e) {
        all = false;
        numerical = true;
        row["error"] = e.what();
        t << "seed " << seed << ": " << e.what() << '\n';
      }
      trials.push_back(row);
    }
    rep.j["metrics"]["trials"] = trials;
    rep.j["metrics"]["persistent_corank2"] = all;
    t << "corank-2 point persists in every trial: " << (all ? "PASS" : "FAIL") << '\n';
    if (numerical) return rep.finish(kNumericalFailure, out);
    return rep.finish(all ? kPass : kCertificateFailed, out);
  }

  requireResolution(c.resolution);
  if (f.stability) {
    const auto rows = stabilityExperiment(p, f.scales, c.resolution, src.seed);
    json table = json::array();
    bool decreasing = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      table.push_back({{"scale", rows[k].scale}, {"max_displacement", rows[k].maxDisplacement}});
      t << "scale " << sci(rows[k].scale) << ": sup displacement " << sci(rows[k].maxDisplacement) << '\n';
      if (k > 0 && rows[k - 1].scale > rows[k].scale && !(rows[k].maxDisplacement < rows[k - 1].maxDisplacement))
        decreasing = false;
    }
    rep.j["metrics"]["stability"] = table;
    rep.j["metrics"]["decreasing"] = decreasing;
    t << "displacement shrinks with the perturbation: " << (decreasing ? "PASS" : "FAIL") << '\n';
    return rep.finish(decreasing ? kPass : kCertificateFailed, out);
  }

  GenericityOptions opt;
  opt.trials = f.trials;
  opt.scale = f.scale;
  opt.resolution = c.resolution;
  opt.baseSeed = src.seed;
  if (!f.taus.empty()) opt.taus = f.taus;
  for (double tau : opt.taus)
    if (!(tau > 0.0 && tau < 1.0)) throw InputError("--tau must lie in (0, 1)");
  const GenericityReport g = genericityExperiment(p, opt);
  rep.j["tolerances"] = {{"taus", opt.taus}};
  rep.j["metrics"]["trials"] = opt.trials;
  rep.j["metrics"]["scale"] = opt.scale;
  rep.j["metrics"]["trials_with_corank2"] = g.trialsWithCorank2;
  rep.j["metrics"]["taus_agree"] = g.tausAgree;
  double gap = std::numeric_limits<double>::infinity();
  std::size_t failed = 0;
  for (const auto& tr : g.trials) {
    gap = std::min(gap, tr.minSecondSingularRatio);
    failed += tr.failedNodes;
  }
  rep.j["metrics"]["min_second_singular_ratio"] = num(gap);
  rep.j["metrics"]["failed_nodes"] = failed;
  bool clean = g.tausAgree && failed == 0;
  for (std::size_t k = 0; k < opt.taus.size(); ++k) {
    t << "tau " << sci(opt.taus[k]) << ": " << g.trialsWithCorank2[k] << " of " << opt.trials
      << " trials with corank 2\n";
    clean = clean && g.trialsWithCorank2[k] == 0;
  }
  t << "min sigma_(v-1)/sigma_max over all trials: " << sci(gap) << '\n';
  t << "taus agree: " << (g.tausAgree ? "yes" : "no") << '\n';
  t << "generic corank: " << (clean ? "PASS" : "FAIL") << '\n';
  if (failed > 0) return rep.finish(kNumericalFailure, out);
  return rep.finish(clean ? kPass : kCertificateFailed, out);
}

int cmdRidge(const Source& src, const Common& c, bool standardize, std::ostream& out) {
  Report rep("ridge");
  rep.asJson = c.json;
  requireResolution(c.resolution);
  if (!(src.mu > 0.0)) throw InputError("--mu must be positive");
  RidgeInstance inst = [&] {
    if (src.file.empty() == (src.builtin != "ridge-demo"))
      throw InputError("give exactly one of a CSV file or --builtin ridge-demo");
    if (!src.file.empty()) return RidgeInstance::fromCsv(src.file, src.mu);
    return syntheticRidge(20, 5, src.mu, src.seed);
  }();
  if (standardize) inst = inst.standardized();
  rep.input(inst.spec());
  const RidgePath path = ridgePath(inst, c.resolution);
  rep.j["tolerances"] = {{"oracle_rel_tol", 1e-8}};
  rep.j["metrics"]["rows"] = path.rows.size();
  rep.j["metrics"]["max_oracle_error"] = path.maxOracleError;
  rep.j["metrics"]["monotone"] = path.monotone;
  rep.j["metrics"]["standardized"] = standardize;
  std::ostringstream csv;
  writeRidgePathCsv(csv, path);
  writeFile(c.out.empty() ? "ridge_path.csv" : c.out, csv.str(), rep);
  const bool ok = path.maxOracleError <= 1e-8;
  rep.text << path.rows.size() << " path points, max relative error vs normal equations "
           << sci(path.maxOracleError) << '\n'
           << "norm of theta nonincreasing: " << (path.monotone ? "yes" : "no") << '\n'
           << "ridge oracle: " << (ok ? "PASS" : "FAIL") << '\n';
  return rep.finish(ok ? kPass : kCertificateFailed, out);
}

int cmdLocate(const Source& src, const Common& c, std::ostream& out) {
  Report rep("locate");
  rep.asJson = c.json;
  requireResolution(c.resolution);
  const FamilySpec spec = loadSpec(src);
  const auto* ds = std::get_if<DistanceSquared>(&spec);
  if (!ds) throw InputError("locate needs a distance_squared problem");
  rep.input(spec);
  const auto r = locationParetoSet(LocationInstance::make(ds->points), c.resolution, {}, c.tau);
  rep.j["tolerances"] = {{"barycentric_tol", 1e-8}, {"hull_tol", 1e-9}, {"tau", c.tau}};
  rep.j["metrics"]["general_position"] = r.generalPosition;
  rep.j["metrics"]["max_barycentric_error"] = r.maxBarycentricError;
  rep.j["metrics"]["hull_fraction"] = r.hullFraction;
  rep.j["metrics"]["corank"] = certificateToJson(r.corank);
  const bool ok = r.passed() && (!r.generalPosition || r.corank.simplicialOnSample());
  rep.text << "demand points in general position: " << (r.generalPosition ? "yes" : "no") << '\n'
           << "max |x*(w) - sum w_i p_i|: " << sci(r.maxBarycentricError) << '\n'
           << "in convex hull: " << r.hullFraction * 100.0 << "%\n"
           << "max corank: " << r.corank.maxCorank << '\n'
           << "location certificate: " << (ok ? "PASS" : "FAIL") << '\n';
  if (!c.out.empty()) {
    std::ostringstream csv;
    writeAtlasCsv(csv, r.atlas);
    writeFile(c.out, csv.str(), rep);
  }
  return rep.finish(ok ? kPass : kCertificateFailed, out);
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  applyThreadEnvironment();
  CLI::App app{"Weighted-sum Pareto sets: atlases, corank certificates, perturbation experiments"};
  app.name("paretotool");
  app.require_subcommand(1);

  Source src;
  Common c;
  std::vector<double> weights;
  PerturbFlags pf;
  bool standardize = false;

  auto common = [&](CLI::App* cmd, bool withGrid) {
    cmd->add_flag("--json", c.json, "print the run report as JSON");
    cmd->add_option("--threads", c.threads, "OpenMP threads (default: PARETO_THREADS or all)");
    cmd->add_option("--tau", c.tau, "relative rank tolerance");
    if (withGrid) cmd->add_option("--resolution", c.resolution, "simplex grid resolution");
  };

  auto* solve = app.add_subcommand("solve", "solve one scalarized problem");
  addSourceOptions(solve, src);
  common(solve, false);
  solve->add_option("--w", weights, "weights, comma separated")->delimiter(',')->required();

  auto* atlas = app.add_subcommand("atlas", "sample the Pareto set and export it");
  addSourceOptions(atlas, src);
  common(atlas, true);
  atlas->add_option("--out", c.out, "output prefix (writes PREFIX.csv and PREFIX.json)");

  auto* verify = app.add_subcommand("verify", "certify simpliciality on a sample");
  addSourceOptions(verify, src);
  common(verify, true);

  auto* perturb = app.add_subcommand("perturb", "linear perturbation experiments");
  addSourceOptions(perturb, src);
  common(perturb, true);
  perturb->add_option("--trials", pf.trials, "number of seeded perturbations");
  perturb->add_option("--scale", pf.scale, "entries uniform on [-scale, scale]");
  perturb->add_option("--seed", src.seed, "base seed; trial k uses seed + k");
  perturb->add_option("--taus", pf.taus, "rank tolerances to compare")->delimiter(',');
  perturb->add_flag("--track", pf.track, "track the corank-2 point of a 4 -> 4 map");
  perturb->add_flag("--stability", pf.stability, "sup displacement of the atlas per scale");
  perturb->add_option("--scales", pf.scales, "scales for --stability")->delimiter(',');

  auto* ridge = app.add_subcommand("ridge", "ridge regularization path");
  ridge->add_option("data", src.file, "CSV with header; last column is the response");
  ridge->add_option("--builtin", src.builtin, "ridge-demo: seeded 20x5 instance")
      ->check(CLI::IsMember({"ridge-demo"}));
  ridge->add_option("--mu", src.mu, "ridge parameter mu > 0");
  ridge->add_option("--seed", src.seed, "seed for ridge-demo");
  ridge->add_flag("--standardize", standardize, "center and scale the data first");
  ridge->add_option("--out", c.out, "path CSV (default ridge_path.csv)");
  common(ridge, true);

  auto* locate = app.add_subcommand("locate", "location problem: Pareto set vs convex hull");
  addSourceOptions(locate, src);
  common(locate, true);
  locate->add_option("--out", c.out, "atlas CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "paretotool: " << e.what() << '\n';
    return kInputError;
  }
  if (c.threads > 0) setThreads(c.threads);

  try {
    if (*solve) return cmdSolve(src, c, weights, out);
    if (*atlas) return cmdAtlas(src, c, false, out);
    if (*verify) return cmdAtlas(src, c, true, out);
    if (*perturb) return cmdPerturb(src, c, pf, out);
    if (*ridge) return cmdRidge(src, c, standardize, out);
    if (*locate) return cmdLocate(src, c, out);
  } catch (const NumericalError& e) {
    err << "paretotool: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const InputError& e) {
    err << "paretotool: " << e.what() << '\n';
    return kInputError;
  } catch (const ProblemError& e) {
    err << "paretotool: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "paretotool: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace pareto::cli
