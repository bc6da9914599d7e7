#include "oracles.hpp"

#include "pareto/atlas.hpp"
#include "pareto/atlas_io.hpp"
#include "pareto/simplex_grid.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace pareto;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void expectSameAtlas(const ParetoAtlas& a, const ParetoAtlas& b) {
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].x, b.points[i].x) << "node " << i;  // bitwise
    EXPECT_EQ(a.points[i].kktResidual, b.points[i].kktResidual);
    EXPECT_EQ(a.points[i].corank, b.points[i].corank);
  }
  EXPECT_EQ(a.summary.minPairwiseXDistance, b.summary.minPairwiseXDistance);
  EXPECT_EQ(a.summary.corankHistogram, b.summary.corankHistogram);
}

class ThreadGuard {
 public:
  explicit ThreadGuard(int n) : saved_(maxThreads()) { setThreads(n); }
  ~ThreadGuard() { setThreads(saved_); }

 private:
  int saved_;
};

}  // namespace

TEST(SimplexGrid, CountsAndFaces) {
  for (int m = 1; m <= 5; ++m)
    for (int r = 1; r <= 7; ++r) {
      const SimplexGrid g(m, r);
      EXPECT_EQ(g.size(), SimplexGrid::expectedSize(m, r));
      std::set<std::uint32_t> tags;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const VectorXd w = g.weight(k);
        EXPECT_NEAR(w.sum(), 1.0, 1e-15);
        std::uint32_t tag = 0;
        for (int i = 0; i < m; ++i)
          if (w(i) > 0) tag |= 1u << i;
        EXPECT_EQ(tag, g.faceTag(k));
        tags.insert(tag);
        EXPECT_EQ(g.find(g.lattice(k)), k);
      }
      // Every nonempty face holds a node once r >= |I|; with r >= 1 every
      // face contains its vertices.
      for (std::uint32_t face = 1; face < (1u << m); ++face) {
        bool hit = false;
        for (std::size_t k = 0; k < g.size() && !hit; ++k) hit = (g.faceTag(k) & ~face) == 0;
        EXPECT_TRUE(hit);
      }
    }
  EXPECT_EQ(SimplexGrid(3, 10).size(), 66u);
  EXPECT_THROW(SimplexGrid(3, 0), std::invalid_argument);
}

TEST(SimplexGrid, Adjacency) {
  const SimplexGrid g(3, 6);
  for (const auto& [a, b] : g.adjacency()) {
    EXPECT_LT(a, b);
    EXPECT_NEAR((g.weight(a) - g.weight(b)).norm(), g.step(), 1e-14);
  }
  for (std::size_t k = 0; k < g.size(); ++k)
    for (std::size_t nb : g.neighbors(k)) {
      const auto& back = g.neighbors(nb);
      EXPECT_NE(std::find(back.begin(), back.end(), k), back.end());
    }
}

TEST(WarmStart, PlanIsBreadthFirstFromBarycenter) {
  const SimplexGrid g(3, 9);
  const WarmStartPlan plan = planWarmStarts(g);
  const std::size_t root = plan.levels.at(0).at(0);
  EXPECT_EQ(std::vector<int>(g.lattice(root).begin(), g.lattice(root).end()), (std::vector<int>{3, 3, 3}));
  std::vector<int> level(g.size(), -1);
  std::size_t covered = 0;
  for (std::size_t l = 0; l < plan.levels.size(); ++l)
    for (std::size_t node : plan.levels[l]) {
      level[node] = static_cast<int>(l);
      ++covered;
    }
  EXPECT_EQ(covered, g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (k == root) {
      EXPECT_EQ(plan.parent[k], -1);
      continue;
    }
    const auto par = static_cast<std::size_t>(plan.parent[k]);
    EXPECT_EQ(level[par] + 1, level[k]);
    const auto& nb = g.neighbors(k);
    EXPECT_NE(std::find(nb.begin(), nb.end(), par), nb.end());
  }
}

TEST(Atlas, TriangleIsBarycentric) {
  const auto tri = oracle::triangle();
  const ParetoAtlas atlas = buildAtlas(Problem::build(tri), 10);
  ASSERT_EQ(atlas.points.size(), 66u);
  for (const auto& pt : atlas.points)
    EXPECT_LE((pt.x - oracle::distanceMinimizer(tri.points, pt.w.coords(), MatrixXd())).norm(), 1e-12);
  EXPECT_TRUE(injectivityScan(atlas).injective);
}

TEST(Atlas, SingleObjective) {
  const GenericQuadratic q = oracle::randomQuadratic(3, 1, 9);
  const ParetoAtlas atlas = buildAtlas(Problem::build(q), 5);
  ASSERT_EQ(atlas.points.size(), 1u);
  const VectorXd xmin = q.Q[0].llt().solve(-q.b[0]);
  EXPECT_LE((atlas.points[0].x - xmin).norm(), 1e-12);
}

TEST(Atlas, Example31DiagonalCollapses) {
  const ParetoAtlas atlas = buildAtlas(Problem::build(Example31{}), 20);
  int diagonal = 0;
  for (const auto& pt : atlas.points)
    if (pt.w[1] == pt.w[2]) {
      ++diagonal;
      EXPECT_LE(pt.x.norm(), 10 * atlas.gradTol);
    }
  EXPECT_EQ(diagonal, 11);
  const InjectivityReport inj = injectivityScan(atlas);
  EXPECT_FALSE(inj.injective);
  for (const auto& [a, b] : inj.collapsedPairs) {
    EXPECT_EQ(atlas.points[a].w[1], atlas.points[a].w[2]);
    EXPECT_EQ(atlas.points[b].w[1], atlas.points[b].w[2]);
  }
}

TEST(Atlas, InjectiveFixtures) {
  EXPECT_TRUE(injectivityScan(buildAtlas(Problem::build(Example32{}), 20)).injective);
  EXPECT_TRUE(injectivityScan(buildAtlas(Problem::build(oracle::triangle()), 20)).injective);
}

TEST(Atlas, KktAndNonDominationOnFixtures) {
  for (const auto& f : oracle::fixtures()) {
    const Problem p = Problem::build(f.spec);
    const ParetoAtlas atlas = buildAtlas(p, p.m() > 3 ? 6 : 12);
    EXPECT_EQ(atlas.summary.failedNodes, 0u) << f.name;
    for (const auto& pt : atlas.points) EXPECT_LE(pt.kktResidual, pt.tolerance) << f.name;
    const DominanceReport d = mutualNonDomination(atlas);
    EXPECT_TRUE(d.nonDominated) << f.name << " " << d.dominatedPairs.size();
  }
}

TEST(Atlas, DominancePredicate) {
  VectorXd a(2), b(2);
  a << 0.0, 1.0;
  b << 0.0, 2.0;
  EXPECT_TRUE(dominates(a, b));
  EXPECT_FALSE(dominates(b, a));
  EXPECT_FALSE(dominates(a, a));
  b << 0.0, 1.0 + 1e-10;  // inside the tolerance
  EXPECT_FALSE(dominates(a, b));
}

TEST(FaceConsistency, Example32) {
  const Problem p = Problem::build(Example32{});
  const ParetoAtlas atlas = buildAtlas(p, 20);
  const FaceConsistencyReport r = faceConsistency(p, atlas);
  EXPECT_TRUE(r.consistent);
  EXPECT_LE(r.maxDiscrepancy, 1e-8);
  EXPECT_EQ(r.faces.size(), 7u);
}

TEST(FaceConsistency, VerticesAreSingleObjectiveMinimizers) {
  const GenericQuadratic q = oracle::randomQuadratic(3, 3, 5);
  const Problem p = Problem::build(q);
  const ParetoAtlas atlas = buildAtlas(p, 8);
  for (const auto& pt : atlas.points)
    for (int i = 0; i < 3; ++i)
      if (pt.w[i] == 1.0) {
        EXPECT_LE((pt.x - q.Q[static_cast<std::size_t>(i)].llt().solve(-q.b[static_cast<std::size_t>(i)])).norm(), 1e-10);
      }
  EXPECT_TRUE(faceConsistency(p, atlas).consistent);
}

TEST(FaceConsistency, RidgeFirstVertex) {
  const RidgeInstance inst = syntheticRidge(20, 5, 0.1, 4);
  const Problem p = Problem::build(inst.spec());
  const ParetoAtlas atlas = buildAtlas(p, 10);
  for (const auto& pt : atlas.points)
    if (pt.w[0] == 1.0) {
      EXPECT_LE(oracle::relErr(pt.x, ridgeClosedForm(inst.X, inst.y, inst.mu)), 1e-10);
    }
  EXPECT_TRUE(faceConsistency(p, atlas).consistent);
}

TEST(Atlas, RefinementStability) {
  for (const auto& f : oracle::fixtures()) {
    const Problem p = Problem::build(f.spec);
    const int r = p.m() > 3 ? 3 : 8;
    const ParetoAtlas coarse = buildAtlas(p, r);
    const ParetoAtlas fine = buildAtlas(p, 2 * r);
    for (std::size_t k = 0; k < coarse.grid.size(); ++k) {
      std::vector<int> doubled(coarse.grid.lattice(k).begin(), coarse.grid.lattice(k).end());
      for (int& v : doubled) v *= 2;
      const auto node = fine.grid.find(doubled);
      ASSERT_TRUE(node.has_value());
      const auto& a = coarse.points[k];
      const auto& b = fine.points[*node];
      EXPECT_LE((a.x - b.x).norm(), 10 * std::max(a.tolerance, b.tolerance)) << f.name;
    }
  }
}

TEST(Atlas, FaceNesting) {
  // The atlas restricted to a face equals the atlas of the subproblem.
  for (const auto& f : oracle::fixtures()) {
    const Problem p = Problem::build(f.spec);
    const int r = p.m() > 3 ? 4 : 8;
    const ParetoAtlas atlas = buildAtlas(p, r);
    for (std::uint32_t face = 1; face < fullFace(p.m()); ++face) {
      const auto idx = faceIndices(face);
      const ParetoAtlas sub = buildAtlas(p.subproblem(idx), r);
      std::size_t matched = 0;
      for (std::size_t k = 0; k < atlas.grid.size(); ++k) {
        if ((atlas.grid.faceTag(k) & ~face) != 0) continue;
        std::vector<int> local;
        for (int i : idx) local.push_back(atlas.grid.lattice(k)[static_cast<std::size_t>(i)]);
        const auto node = sub.grid.find(local);
        ASSERT_TRUE(node.has_value());
        const auto& a = atlas.points[k];
        const auto& b = sub.points[*node];
        EXPECT_LE((a.x - b.x).norm(), 10 * std::max(a.tolerance, b.tolerance)) << f.name;
        for (std::size_t j = 0; j < idx.size(); ++j)
          EXPECT_NEAR(a.fx(idx[j]), b.fx(static_cast<Eigen::Index>(j)), 1e-9 * std::max(1.0, std::abs(b.fx(static_cast<Eigen::Index>(j)))));
        ++matched;
      }
      EXPECT_EQ(matched, sub.grid.size()) << f.name;
    }
  }
}

TEST(Parallel, AtlasKernelsMatchSerialBitwise) {
  ThreadGuard threads(4);
  for (const auto& f : oracle::fixtures()) {
    const Problem p = Problem::build(f.spec);
    const int r = p.m() > 3 ? 6 : 15;
    const ParetoAtlas s = buildAtlas(p, r, {}, Execution::Serial);
    const ParetoAtlas q = buildAtlas(p, r, {}, Execution::Parallel);
    expectSameAtlas(s, q);
    EXPECT_EQ(injectivityScan(s, 1e-7, Execution::Serial).collapsedPairs,
              injectivityScan(s, 1e-7, Execution::Parallel).collapsedPairs);
    EXPECT_EQ(mutualNonDomination(s, 1e-9, Execution::Serial).dominatedPairs,
              mutualNonDomination(s, 1e-9, Execution::Parallel).dominatedPairs);
    EXPECT_EQ(minPairwiseDistance(s, Execution::Serial), minPairwiseDistance(s, Execution::Parallel));
    const auto fs = faceConsistency(p, s, {}, Execution::Serial);
    const auto fp = faceConsistency(p, s, {}, Execution::Parallel);
    EXPECT_EQ(fs.maxDiscrepancy, fp.maxDiscrepancy);
    EXPECT_EQ(fs.consistent, fp.consistent);
  }
  // A collapsing atlas exercises the pair collection with many hits.
  const ParetoAtlas e31 = buildAtlas(Problem::build(Example31{}), 20, {}, Execution::Serial);
  EXPECT_EQ(injectivityScan(e31, 1e-7, Execution::Serial).collapsedPairs,
            injectivityScan(e31, 1e-7, Execution::Parallel).collapsedPairs);
}

TEST(AtlasIo, CsvAndJson) {
  const ParetoAtlas atlas = buildAtlas(Problem::build(Example32{}), 4);
  std::ostringstream csv;
  writeAtlasCsv(csv, atlas);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "w_1,w_2,w_3,x_1,x_2,x_3,f_1,f_2,f_3,residual,corank,face,sv_1,sv_2,sv_3,status");
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), atlas.points.size() + 1);

  const nlohmann::json j = nlohmann::json::parse(atlasToJson(atlas).dump());
  EXPECT_EQ(j["adjacency"].size(), atlas.adjacency.size());
  const auto back = atlasPointsFromJson(j);
  ASSERT_EQ(back.size(), atlas.points.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].x, atlas.points[i].x);
    EXPECT_EQ(back[i].fx, atlas.points[i].fx);
    EXPECT_EQ(back[i].w.coords(), atlas.points[i].w.coords());
    EXPECT_EQ(back[i].corank, atlas.points[i].corank);
    EXPECT_EQ(back[i].status, atlas.points[i].status);
  }
}
