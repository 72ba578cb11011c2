#include <gtest/gtest.h>

#include <random>

#include "ctlp/certify.hpp"
#include "ctlp/example1.hpp"
#include "ctlp/solver.hpp"
#include "support.hpp"

using namespace ctlp;

namespace {

constexpr double kBeta = 0.125;

std::size_t node_at(const TimeGrid& g, double t) {
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g[k].t == t && (k + 1 == g.size() || g[k + 1].t != t)) return k;
  throw std::runtime_error("no node");
}

TimeGrid example_grid() {
  const std::vector<double> ts{0.0, 0.5, 1.0, 1.5, 1.9, 1.95, 2.0};
  return TimeGrid::from_times(example1::breakpoints(), ts).with_left_limits(example1::breakpoints());
}

CTLPInstance example1_first_half() {
  const Breakpoints bp({0.0, 1.0});
  auto k = [&](double v) { return PiecewiseFn::constant(bp, v); };
  return CTLPInstance({{k(0), k(-1)}, {k(-1), k(0)}, {PiecewiseFn(bp, {Polynomial({-1})}), k(1)}, {k(1), k(1)},
                       {k(0), k(1)}},
                      {k(0), k(0), k(0), k(3), PiecewiseFn(bp, {Polynomial({0.25, 0.625})})},
                      {PiecewiseFn(bp, {Polynomial({-1, 1})}), k(-1)});
}

CTLPInstance identity_instance() {
  const Breakpoints bp({0.0, 1.0});
  auto k = [&](double v) { return PiecewiseFn::constant(bp, v); };
  return CTLPInstance({{k(1), k(0)}, {k(0), k(1)}}, {k(0), k(0)}, {k(-1), k(-1)});
}

Trajectory constant(const TimeGrid& g, Vector v) { return Trajectory(g, std::vector<Vector>(g.size(), std::move(v))); }

}  // namespace

TEST(ActiveSets, Example1Profile) {
  const TimeGrid g = example_grid();
  const ActiveSetProfile p = active_sets(example1::instance(), example1::zbar_on(g), kBeta, g);
  const std::size_t a = node_at(g, 0.5), b = node_at(g, 1.5), c = node_at(g, 1.95);
  EXPECT_EQ(p.Ibeta[a], (IndexSet{3, 4}));
  EXPECT_EQ(p.I0[a], (IndexSet{3, 4}));
  EXPECT_EQ(p.Ibeta[b], (IndexSet{2, 4}));
  EXPECT_EQ(p.I0[b], (IndexSet{2, 4}));
  EXPECT_EQ(p.Ibeta[c], (IndexSet{2, 3, 4}));
  EXPECT_EQ(p.I0[c], (IndexSet{2, 4}));
  EXPECT_EQ(p.I0[node_at(g, 2.0)], (IndexSet{2, 3, 4}));
  for (std::size_t k = 0; k < g.size(); ++k)
    EXPECT_TRUE(std::includes(p.Ibeta[k].begin(), p.Ibeta[k].end(), p.I0[k].begin(), p.I0[k].end()));
}

TEST(ActiveSets, RejectsInfeasibleTrajectoryAndBadBeta) {
  const TimeGrid g = example_grid();
  const CTLPInstance inst = example1::instance();
  try {
    active_sets(inst, constant(g, {10.0, 10.0}), kBeta, g);
    FAIL();
  } catch (const InfeasibleTrajectory& e) {
    EXPECT_DOUBLE_EQ(e.residual(), 17.0);
  }
  EXPECT_THROW(active_sets(inst, example1::zbar_on(g), 0.0, g), InputError);
}

TEST(BetaFR, Example1Fails) {
  const TimeGrid g = example_grid();
  const RegularityCertificate c = check_beta_fr(example1::instance(), example1::zbar_on(g), kBeta, g);
  EXPECT_EQ(c.kind, CertificateKind::Fails);
  ASSERT_TRUE(c.witness_node);
  EXPECT_GE(g[*c.witness_node].t, 1.9);
  EXPECT_EQ(c.node_det[*c.witness_node], 0.0);
}

TEST(BetaFR, FirstHalfHolds) {
  const CTLPInstance inst = example1_first_half();
  const TimeGrid g = refine_grid(inst.breakpoints(), 8);
  const RegularityCertificate c = check_beta_fr(inst, example1::zbar_on(g), kBeta, g);
  EXPECT_EQ(c.kind, CertificateKind::BetaFR);
  EXPECT_NEAR(c.det_lower_bound, 1.0, 1e-12);
}

TEST(BetaFR, IdentityHolds) {
  const CTLPInstance inst = identity_instance();
  const TimeGrid g = refine_grid(inst.breakpoints(), 3);
  const RegularityCertificate c = check_beta_fr(inst, constant(g, {0.0, 0.0}), kBeta, g);
  EXPECT_EQ(c.kind, CertificateKind::BetaFR);
  EXPECT_NEAR(c.det_lower_bound, 1.0, 1e-15);
}

TEST(ConeMember, Examples) {
  EXPECT_TRUE(cone_member(Vector{1, 1}, DenseMatrix{{1, -1}, {0, 1}}));
  EXPECT_FALSE(cone_member(Vector{-1, 0}, DenseMatrix{{1, 0}}));
  EXPECT_TRUE(cone_member(Vector{0, 0}, DenseMatrix{{1, 0}}));
  EXPECT_TRUE(cone_member(Vector{0, 0}, DenseMatrix(0, 2)));
  EXPECT_FALSE(cone_member(Vector{0, 1}, DenseMatrix{{1, -1}, {1, 1}}));
}

TEST(SelectIsharp, ThreeRowsInThePlane) {
  // (0,1) is not a non-negative combination of (1,-1) and (1,1); (1,1) is
  // (1,-1) + 2 (0,1). The only conic basis is {first, third}.
  const DenseMatrix rows{{1, -1}, {1, 1}, {0, 1}};
  EXPECT_EQ(select_isharp(rows), (IndexSet{0, 2}));
}

TEST(SelectIsharp, SmallCases) {
  EXPECT_EQ(select_isharp(DenseMatrix{{2, 3}}), (IndexSet{0}));
  EXPECT_EQ(select_isharp(DenseMatrix{{1, 0}, {1, 0}}), (IndexSet{0}));
  EXPECT_EQ(select_isharp(DenseMatrix{{1, 0}, {2, 0}}), (IndexSet{0}));
}

TEST(SelectIsharp, ConeEqualityOnRandomRows) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const DenseMatrix rows = test::random_int_matrix(rng, 4, 2 + trial % 2, -2, 2);
    const IndexSet sel = select_isharp(rows);
    const DenseMatrix S = rows.select_rows(sel);
    for (std::size_t r = 0; r < rows.rows(); ++r) EXPECT_TRUE(cone_member(rows.row(r), S));
    for (std::size_t a = 0; a < sel.size(); ++a) {
      IndexSet others = sel;
      others.erase(others.begin() + static_cast<std::ptrdiff_t>(a));
      EXPECT_FALSE(cone_member(rows.row(sel[a]), rows.select_rows(others)));
    }
  }
}

TEST(BetaRC, Example1Holds) {
  const TimeGrid g = example_grid();
  const RegularityCertificate c = check_beta_rc(example1::instance(), example1::zbar_on(g), kBeta, g);
  EXPECT_EQ(c.kind, CertificateKind::BetaRC);
  EXPECT_TRUE(c.isharp_in_I0);
  EXPECT_TRUE(c.cone_equality);
  EXPECT_GE(c.det_lower_bound, 1.0 - 1e-9);
  EXPECT_EQ(c.isharp[node_at(g, 1.95)], (IndexSet{2, 4}));
  EXPECT_LE(c.lemma3_residual, 1e-8);
}

TEST(BetaRC, ImpliedByBetaFR) {
  const CTLPInstance inst = example1_first_half();
  const TimeGrid g = refine_grid(inst.breakpoints(), 4);
  const Trajectory z = example1::zbar_on(g);
  const RegularityCertificate fr = check_beta_fr(inst, z, kBeta, g);
  const RegularityCertificate rc = check_beta_rc(inst, z, kBeta, g);
  ASSERT_TRUE(fr.holds());
  ASSERT_TRUE(rc.holds());
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(rc.isharp[k], rc.profile.Ibeta[k]);
}

TEST(BetaRC, ColinearRowsKeepFirst) {
  const Breakpoints bp({0.0, 1.0});
  auto k = [&](double v) { return PiecewiseFn::constant(bp, v); };
  const CTLPInstance inst({{k(1), k(0)}, {k(2), k(0)}}, {k(0), k(0)}, {k(-1), k(0)});
  const TimeGrid g = refine_grid(bp, 2);
  const RegularityCertificate c = check_beta_rc(inst, constant(g, {0.0, 0.0}), kBeta, g);
  EXPECT_EQ(c.kind, CertificateKind::BetaRC);
  EXPECT_EQ(c.isharp[0], (IndexSet{0}));
  EXPECT_NEAR(c.det_lower_bound, 1.0, 1e-15);
}

TEST(BetaA, Example1ViaRegularity) {
  const TimeGrid g = example_grid();
  const RegularityCertificate c = satisfies_beta_a(example1::instance(), example1::zbar_on(g), kBeta, g);
  EXPECT_EQ(c.kind, CertificateKind::BetaA);
  EXPECT_EQ(c.tested, CertificateKind::BetaRC);
}

TEST(RecoverMultipliers, Example1Nodes) {
  const TimeGrid g = example_grid();
  const CTLPInstance inst = example1::instance();
  const Trajectory z = example1::zbar_on(g);
  const RegularityCertificate c = check_beta_rc(inst, z, kBeta, g);
  const MultiplierRecovery rec = recover_multipliers(inst, z, c);
  const Vector u0 = rec.u[node_at(g, 0.0)];
  EXPECT_NEAR(u0[3], 1.0, 1e-12);
  EXPECT_NEAR(u0[4], 0.0, 1e-12);
  const Vector u2 = rec.u[node_at(g, 2.0)];
  EXPECT_NEAR(u2[2], 1.0, 1e-12);
  EXPECT_NEAR(u2[3], 0.0, 1e-12);
  EXPECT_NEAR(u2[4], 2.0, 1e-12);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vector ref = example1::ubar(g[k]);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(rec.u[k][i], ref[i], 1e-10) << "t = " << g[k].t;
    for (std::size_t i = 0; i < 5; ++i)
      if (std::find(c.isharp[k].begin(), c.isharp[k].end(), i) == c.isharp[k].end()) {
        EXPECT_EQ(rec.u[k][i], 0.0);
      }
  }
  EXPECT_LE(rec.lambda_reconstruction_residual, 1e-8);
  EXPECT_GE(rec.lambda_min_entry, -1e-8);
  EXPECT_TRUE(rec.negative_nodes.empty());
}

TEST(RecoverMultipliers, ZeroCostGivesZero) {
  const Breakpoints bp({0.0, 1.0});
  auto k = [&](double v) { return PiecewiseFn::constant(bp, v); };
  const CTLPInstance inst({{k(1), k(0)}, {k(0), k(1)}}, {k(0), k(0)}, {k(0), k(0)});
  const TimeGrid g = refine_grid(bp, 2);
  const Trajectory z = constant(g, {0.0, 0.0});
  const MultiplierRecovery rec = recover_multipliers(inst, z, check_beta_fr(inst, z, kBeta, g));
  for (std::size_t n = 0; n < g.size(); ++n)
    for (double v : rec.u[n]) EXPECT_EQ(v, 0.0);
}

TEST(RecoverMultipliers, FullRankUsesActiveSupport) {
  // Row 1 is beta-active but slack (g = -0.05); the augmented construction
  // puts no weight on it.
  const Breakpoints bp({0.0, 1.0});
  auto k = [&](double v) { return PiecewiseFn::constant(bp, v); };
  const CTLPInstance inst({{k(1), k(0)}, {k(0), k(1)}}, {k(0), k(0.05)}, {k(-1), k(0)});
  const TimeGrid g = refine_grid(bp, 2);
  const Trajectory z = constant(g, {0.0, 0.0});
  const RegularityCertificate c = check_beta_fr(inst, z, 0.1, g);
  ASSERT_TRUE(c.holds());
  ASSERT_EQ(c.profile.Ibeta[0], (IndexSet{0, 1}));
  const MultiplierRecovery rec = recover_multipliers(inst, z, c);
  EXPECT_NEAR(rec.u[0][0], 1.0, 1e-12);
  EXPECT_NEAR(rec.u[0][1], 0.0, 1e-12);
  EXPECT_TRUE(check_kkt(inst, z, rec.u, g).pass);
}

TEST(RecoverMultipliers, RefusesFailedCertificate) {
  const TimeGrid g = example_grid();
  const CTLPInstance inst = example1::instance();
  const Trajectory z = example1::zbar_on(g);
  EXPECT_THROW(recover_multipliers(inst, z, check_beta_fr(inst, z, kBeta, g)), DomainError);
}

TEST(RecoverMultipliers, RoundTripThroughKkt) {
  std::mt19937_64 rng(72);
  int certified = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const CTLPInstance inst = test::random_instance(rng, 2, 3, 2);
    const SolveResult r = solve(inst, 4);
    ASSERT_TRUE(r.ok());
    const RegularityCertificate c = check_beta_rc(inst, *r.z, 1e-6, r.grid);
    if (!c.holds()) continue;
    ++certified;
    const MultiplierRecovery rec = recover_multipliers(inst, *r.z, c);
    const KKTReport kkt = check_kkt(inst, *r.z, rec.u, r.grid);
    EXPECT_LE(kkt.stationarity_residual, 1e-7) << "trial " << trial;
    EXPECT_GE(kkt.min_multiplier, -1e-7) << "trial " << trial;
    for (std::size_t k = 0; k < r.grid.size(); ++k)
      for (std::size_t i : c.profile.Ibeta[k]) EXPECT_TRUE(cone_member(inst.at(r.grid[k]).A.row(i),
                                                                       inst.at(r.grid[k]).A.select_rows(c.isharp[k])));
  }
  EXPECT_GT(certified, 30);
}

TEST(CheckKkt, Examples) {
  const TimeGrid g = example_grid();
  const CTLPInstance inst = example1::instance();
  const Trajectory z = example1::zbar_on(g);
  const KKTReport ok = check_kkt(inst, z, example1::ubar_on(g), g);
  EXPECT_TRUE(ok.pass);
  EXPECT_LE(ok.stationarity_residual, 1e-12);

  const KKTReport zero = check_kkt(inst, z, constant(g, Vector(5, 0.0)), g);
  EXPECT_FALSE(zero.pass);
  EXPECT_GE(zero.stationarity_residual, 1.0);

  std::vector<Vector> vals = example1::ubar_on(g).values();
  vals[node_at(g, 0.5)][4] += 0.1;
  const KKTReport bumped = check_kkt(inst, z, Trajectory(g, vals), g);
  EXPECT_FALSE(bumped.pass);
  EXPECT_NEAR(bumped.stationarity_residual, 0.1, 1e-12);
  EXPECT_LE(bumped.complementarity_residual, 1e-12);
}

TEST(Lemma1, Examples) {
  const CTLPInstance inst = example1_first_half();
  const TimeGrid g = refine_grid(inst.breakpoints(), 4);
  const Lemma1Witness w = lemma1_witness(inst, example1::zbar_on(g), kBeta, g);
  EXPECT_NEAR(w.C, 0.6180339887498949, 1e-12);
  EXPECT_NEAR(w.Khat, 1.0, 1e-12);
  EXPECT_TRUE(w.consistent);

  const Lemma1Check two = lemma1_constants(2.0 * DenseMatrix::identity(2), 2.0, 2);
  EXPECT_NEAR(two.sigma_min, 2.0, 1e-15);
  EXPECT_NEAR(two.gram_det, 16.0, 1e-12);
  EXPECT_TRUE(two.forward_holds);
  EXPECT_TRUE(two.converse_holds);

  const Lemma1Check flat = lemma1_constants(DenseMatrix{{1, -1}, {1, 1}, {0, 1}}, 2.0, 5);
  EXPECT_FALSE(flat.full_rank);
  EXPECT_GT(flat.sigma_min, 0.0);
  EXPECT_EQ(flat.gram_det, 0.0);
}

TEST(Lemma1, ConverseConstantAsStatedCanFail) {
  // det = prod sigma_i^2 >= C^(2k), not C^k: half the identity breaks C^m.
  const Lemma1Check half = lemma1_constants(0.5 * DenseMatrix::identity(2), 1.0, 2);
  EXPECT_NEAR(half.gram_det, 0.0625, 1e-15);
  EXPECT_NEAR(half.converse_khat, 0.25, 1e-15);
  EXPECT_FALSE(half.converse_holds);
  EXPECT_TRUE(half.corrected_holds);
}

TEST(BetaSweep, ReportsPerBeta) {
  const TimeGrid g = example_grid();
  const auto rows = beta_sweep(example1::instance(), example1::zbar_on(g), g, 1e-3, 10.0, 5);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NEAR(rows.front().beta, 1e-3, 1e-18);
  EXPECT_NEAR(rows.back().beta, 10.0, 1e-12);
  EXPECT_TRUE(rows[1].beta_a);
  EXPECT_THROW(beta_sweep(example1::instance(), example1::zbar_on(g), g, 0.0, 1.0, 3), InputError);
}
