// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "cli.hpp"
#include "oracles.hpp"

#include "pareto/apps.hpp"
#include "pareto/atlas.hpp"
#include "pareto/diagnostics.hpp"
#include "pareto/linalg.hpp"
#include "pareto/perturb.hpp"
#include "pareto/problem_io.hpp"
#include "pareto/solver.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace pareto;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  return cli::runCli(args, out, err);
}

VectorXd interiorWeight(int m, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  VectorXd w(m);
  for (int i = 0; i < m; ++i) w(i) = u(gen);
  return w / w.sum();
}

// 1. Closed-form minimizer of the corank-2 example on grid weights.
Outcome closedForm() {
  const Problem p = Problem::build(Example31{});
  const SimplexGrid grid(3, 9);  // 55 weights
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const VectorXd w = grid.weight(k);
    const ParetoPoint pt = scalarize(p, Weight::make(w));
    worst = std::max(worst, (pt.x - oracle::example31XStar(w(1), w(2))).norm());
  }
  return {grid.size() >= 50 && worst <= 1e-8,
          std::to_string(grid.size()) + " weights, max |x - x*| = " + sci(worst) + " (tol 1e-8)"};
}

// 2. The diagonal w2 = w3 collapses to the origin, where the corank is 2.
Outcome nonInjectivity() {
  const Problem p = Problem::build(Example31{});
  const ParetoAtlas atlas = buildAtlas(p, 20);
  double worst = 0.0;
  int diagonal = 0;
  for (const auto& pt : atlas.points)
    if (pt.w[1] == pt.w[2]) {
      ++diagonal;
      worst = std::max(worst, pt.x.norm());
    }
  const bool injective = injectivityScan(atlas).injective;
  const int corank = corankAt(p, VectorXd::Zero(3)).corank;
  return {diagonal > 0 && worst <= 1e-7 && !injective && corank == 2,
          std::to_string(diagonal) + " diagonal nodes, max |x| = " + sci(worst) +
              " (tol 1e-7), injective = " + (injective ? "yes" : "no") +
              ", corank at origin = " + std::to_string(corank)};
}

// 3. The perturbed family verifies at three epsilons.
Outcome perturbedSimplicial() {
  Outcome o;
  for (const char* eps : {"0.01", "0.1", "1"}) {
    const int code = cli({"verify", "--builtin", "example31-perturbed", "--epsilon", eps, "--resolution", "20"});
    o.pass = o.pass && code == 0;
    o.detail += std::string(o.detail.empty() ? "" : ", ") + "eps " + eps + " -> exit " + std::to_string(code);
  }
  return o;
}

// 4. The corank-free example verifies and every sampled interior point is a fold.
Outcome corankFree() {
  const int code = cli({"verify", "--builtin", "example32", "--resolution", "20"});
  const Problem p = Problem::build(Example32{});
  std::mt19937_64 gen(4);
  int folds = 0;
  for (int s = 0; s < 20; ++s) {
    const ParetoPoint pt = scalarize(p, Weight::make(interiorWeight(3, gen)));
    folds += foldCheck(p, pt.x).isFold;
  }
  return {code == 0 && folds == 20, "verify exit " + std::to_string(code) + ", folds " + std::to_string(folds) + "/20"};
}

// 5. Analytic derivative of x* against central differences.
Outcome derivative() {
  auto fd = [](const Problem& p, const VectorXd& w) {
    const double h = 1e-5;
    SolverConfig tight;
    tight.gradTol = 1e-14;
    const int e = p.m() - 1;
    MatrixXd out(p.n(), p.m() - 1);
    for (int j = 0; j < e; ++j) {
      VectorXd wp = w, wm = w;
      wp(j) += h;
      wp(e) -= h;
      wm(j) -= h;
      wm(e) += h;
      out.col(j) = (minimizeWeightedSum(p, wp, tight).x - minimizeWeightedSum(p, wm, tight).x) / (2 * h);
    }
    return out;
  };
  std::mt19937_64 gen(5);
  Outcome o;
  const std::vector<std::pair<std::string, FamilySpec>> cases{
      {"example31", Example31{}}, {"example32", Example32{}}, {"quadratic", oracle::randomQuadratic(4, 3, 77)}};
  for (const auto& [name, spec] : cases) {
    const Problem p = Problem::build(spec);
    double worst = 0.0;
    int used = 0;
    while (used < 20) {
      const VectorXd w = interiorWeight(p.m(), gen);
      if (name == "example31" && std::abs(w(1) - w(2)) < 0.05) continue;  // off the diagonal
      const ParetoPoint pt = scalarize(p, Weight::make(w));
      const MatrixXd ref = fd(p, w);
      worst = std::max(worst, (xStarDerivative(p, pt) - ref).norm() / ref.norm());
      ++used;
    }
    o.pass = o.pass && worst <= 1e-6;
    o.detail += (o.detail.empty() ? "" : ", ") + name + " " + sci(worst);
  }
  o.detail += " (rel tol 1e-6)";
  return o;
}

// 6. KKT residuals and mutual non-domination on every fixture atlas.
Outcome kkt() {
  Outcome o;
  double worstRatio = 0.0;
  for (const auto& f : oracle::fixtures()) {
    const Problem p = Problem::build(f.spec);
    const ParetoAtlas atlas = buildAtlas(p, p.m() > 3 ? 8 : 20);
    for (const auto& pt : atlas.points) {
      // tolerance = 1e-10 * max(1, |grad at start|)
      worstRatio = std::max(worstRatio, pt.kktResidual / pt.tolerance);
      o.pass = o.pass && pt.converged() && pt.kktResidual <= pt.tolerance;
    }
    const bool nd = mutualNonDomination(atlas).nonDominated;
    o.pass = o.pass && nd;
    if (!nd) o.detail += f.name + " has dominated pairs; ";
  }
  o.detail += std::to_string(oracle::fixtures().size()) + " fixtures, max residual/(1e-10*scale) = " + sci(worstRatio);
  return o;
}

// 7. Location: atlas equals the barycentric map, inside the hull, verified.
Outcome location() {
  std::vector<VectorXd> pts(3, VectorXd(2));
  pts[0] << 0.0, 0.0;
  pts[1] << 3.0, 1.0;
  pts[2] << 1.0, 2.5;
  const auto inst = LocationInstance::make(pts);
  const LocationReport r = locationParetoSet(inst, 20);
  const auto file = std::filesystem::temp_directory_path() / "pareto_acceptance_location.json";
  std::ofstream(file) << serializeProblem(DistanceSquared{pts});
  const int code = cli({"verify", file.string(), "--resolution", "20"});
  std::filesystem::remove(file);
  return {inst.generalPosition() && r.maxBarycentricError <= 1e-8 && r.hullFraction == 1.0 && code == 0,
          "max |x - sum w p| = " + sci(r.maxBarycentricError) + " (tol 1e-8), in hull " +
              std::to_string(r.hullFraction * 100.0).substr(0, 5) + "%, verify exit " + std::to_string(code)};
}

// 8. Ridge path against the normal equations.
Outcome ridge() {
  const RidgeInstance inst = syntheticRidge(20, 5, 0.1, 2024);
  const RidgePath path = ridgePath(inst, 100);
  int interior = 0;
  double worst = 0.0;
  for (const auto& row : path.rows)
    if (row.w1 > 0.0) {
      ++interior;
      const VectorXd ref = ridgeClosedForm(inst.X, inst.y, inst.mu + row.w2 / row.w1);
      worst = std::max(worst, (row.theta - ref).norm() / ref.norm());
    }
  const auto& first = path.rows.front();
  const auto& last = path.rows.back();
  const VectorXd atMu = ridgeClosedForm(inst.X, inst.y, inst.mu);
  const bool ends = first.lambda == inst.mu && (first.theta - atMu).norm() <= 1e-8 * atMu.norm() &&
                    last.w1 == 0.0 && last.theta.isZero(0.0);
  return {interior == 100 && worst <= 1e-8 && ends,
          std::to_string(interior) + " weights, max rel err " + sci(worst) + " (tol 1e-8), endpoints " +
              (ends ? "ok" : "wrong")};
}

// 9. Generic perturbations remove the corank-2 point.
Outcome genericity() {
  GenericityOptions opt;
  opt.trials = 20;
  opt.scale = 0.1;
  opt.resolution = 20;
  opt.taus = {1e-7, 1e-8, 1e-9};
  const GenericityReport r = genericityExperiment(Problem::build(Example31{}), opt);
  bool zero = true;
  std::string counts;
  for (std::size_t k = 0; k < r.taus.size(); ++k) {
    zero = zero && r.trialsWithCorank2[k] == 0;
    counts += (k ? "/" : "") + std::to_string(r.trialsWithCorank2[k]);
  }
  return {zero && r.tausAgree, "corank-2 trials at tau 1e-7/1e-8/1e-9: " + counts +
                                   ", taus agree = " + (r.tausAgree ? "yes" : "no")};
}

// 10. The corank-2 point of the 4 -> 4 counterexample persists.
Outcome persistence() {
  const Problem g = Problem::build(RemarkG{});
  Outcome o;
  double worstE = 0.0;
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pi = LinearPerturbation::sample(4, 4, seed, 1e-3);
    try {
      const auto t = corank2Tracker(g, pi);
      const int corank = corankAt(perturbProblem(g, pi).problem, t.xHat).corank;
      worstE = std::max(worstE, t.residual);
      ok += t.residual <= 1e-10 && corank == 2 && t.meetsSimplexInterior;
    } catch (const std::exception&) {
    }
  }
  const auto base = corank2Tracker(g, LinearPerturbation::zero(4, 4));
  MatrixXd span(4, 2);
  span << 1, 0, 0, 1, 1, 0, 0, 1;
  const double dist = linalg::subspaceDistance(base.cokernelBasis, span);
  o.pass = ok == 10 && dist <= 1e-10;
  o.detail = std::to_string(ok) + "/10 trials, max |E| = " + sci(worstE) + " (tol 1e-10), cokernel distance at pi=0 " +
             sci(dist) + " (tol 1e-10)";
  return o;
}

// 11. Displacement of the Pareto set shrinks with the perturbation.
Outcome stability() {
  const std::vector<double> scales{1e-1, 1e-2, 1e-3};
  const auto rows = stabilityExperiment(Problem::build(Example32{}), scales, 20);
  const bool decreasing = rows[1].maxDisplacement < rows[0].maxDisplacement &&
                          rows[2].maxDisplacement < rows[1].maxDisplacement;
  return {decreasing && rows[2].maxDisplacement <= 1e-2,
          "sup displacement " + sci(rows[0].maxDisplacement) + ", " + sci(rows[1].maxDisplacement) + ", " +
              sci(rows[2].maxDisplacement) + " (smallest tol 1e-2)"};
}

// 12. Property suites on every fixture.
Outcome properties() {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> nd;
  std::vector<std::string> failed;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };
  for (const auto& f : oracle::fixtures()) {
    const Problem p = Problem::build(f.spec);
    // finite-difference gradients and Hessians
    double grad = 0.0, hess = 0.0;
    for (int s = 0; s < 100; ++s) {
      const VectorXd x = VectorXd::NullaryExpr(p.n(), [&] { return nd(gen); });
      const Evaluation e = p.evaluate(x);
      grad = std::max(grad, oracle::relErr(e.jacobian, oracle::fdJacobian(p, x)));
      for (int i = 0; i < p.m(); ++i)
        hess = std::max(hess, oracle::relErr(e.hessians[static_cast<std::size_t>(i)], oracle::fdHessian(p, x, i)));
    }
    check(grad <= 1e-6 && hess <= 1e-6, f.name + ": derivatives");

    const int r = p.m() > 3 ? 4 : 10;
    const ParetoAtlas atlas = buildAtlas(p, r);

    // warm-start independence
    bool warm = true;
    for (std::size_t k = 0; k < atlas.points.size(); k += 3) {
      SolverConfig cfg;
      cfg.initialPoint = VectorXd::NullaryExpr(p.n(), [&] { return 3.0 * nd(gen); });
      const ParetoPoint cold = scalarize(p, atlas.points[k].w, cfg);
      warm = warm && (cold.x - atlas.points[k].x).norm() <= 10 * std::max(cold.tolerance, atlas.points[k].tolerance);
    }
    check(warm, f.name + ": warm-start independence");

    // refinement stability
    const ParetoAtlas fine = buildAtlas(p, 2 * r);
    bool refine = true;
    for (std::size_t k = 0; k < atlas.grid.size(); ++k) {
      std::vector<int> d(atlas.grid.lattice(k).begin(), atlas.grid.lattice(k).end());
      for (int& v : d) v *= 2;
      const auto& b = fine.points[*fine.grid.find(d)];
      refine = refine && (atlas.points[k].x - b.x).norm() <= 10 * std::max(atlas.points[k].tolerance, b.tolerance);
    }
    check(refine, f.name + ": refinement stability");

    // face nesting
    bool nesting = true;
    for (std::uint32_t face = 1; face < fullFace(p.m()); ++face) {
      const auto idx = faceIndices(face);
      const ParetoAtlas sub = buildAtlas(p.subproblem(idx), r);
      for (std::size_t k = 0; k < atlas.grid.size(); ++k) {
        if ((atlas.grid.faceTag(k) & ~face) != 0) continue;
        std::vector<int> local;
        for (int i : idx) local.push_back(atlas.grid.lattice(k)[static_cast<std::size_t>(i)]);
        const auto& b = sub.points[*sub.grid.find(local)];
        nesting = nesting && (atlas.points[k].x - b.x).norm() <= 10 * std::max(atlas.points[k].tolerance, b.tolerance);
      }
    }
    check(nesting && faceConsistency(p, atlas).consistent, f.name + ": face nesting");

    // rank-(m-1) and img(df) = <w>^perp at interior corank-1 points
    bool rank = true, image = true;
    for (const auto& pt : atlas.points) {
      if (pt.corank != 1 || pt.w.support() != fullFace(p.m())) continue;
      const MatrixXd jac = p.jacobian(pt.x);
      rank = rank && differenceRankTest(jac);
      image = image && imageWeightAlignment(jac, pt.w.coords()) <= 1e-8;
    }
    check(rank, f.name + ": rank-(m-1)");
    check(image, f.name + ": img(df) = w-perp");
  }
  std::string detail = std::to_string(oracle::fixtures().size()) + " fixtures x 6 suites";
  for (const auto& s : failed) detail += "; FAILED " + s;
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"closed-form minimizer", closedForm},
      {"non-injectivity of the corank-2 example", nonInjectivity},
      {"perturbed family is simplicial", perturbedSimplicial},
      {"corank-free example and folds", corankFree},
      {"derivative formula vs finite differences", derivative},
      {"KKT residuals and non-domination", kkt},
      {"location problem", location},
      {"ridge regularization path", ridge},
      {"genericity under perturbation", genericity},
      {"corank-2 persistence for the 4 -> 4 map", persistence},
      {"stability under perturbation", stability},
      {"property suites", properties},
  };
  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (k + 1 < 10 ? " " : "") << k + 1 << ". "
              << criteria[k].first << ": " << o.detail << std::endl;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (failures ? "FAILED " : "passed ") << criteria.size() - static_cast<std::size_t>(failures) << "/"
            << criteria.size() << " criteria in " << sci(secs) << " s" << std::endl;
  return failures ? 1 : 0;
}
