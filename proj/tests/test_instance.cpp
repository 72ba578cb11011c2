#include <gtest/gtest.h>

#include <random>

#include "ctlp/example1.hpp"
#include "ctlp/instance.hpp"
#include "support.hpp"

using namespace ctlp;

namespace {

CTLPInstance constant_instance(std::vector<std::vector<double>> A, std::vector<double> b, std::vector<double> c,
                               double T = 1.0) {
  const Breakpoints bp({0.0, T});
  std::vector<std::vector<PiecewiseFn>> FA;
  for (const auto& row : A) {
    std::vector<PiecewiseFn> r;
    for (double v : row) r.push_back(PiecewiseFn::constant(bp, v));
    FA.push_back(std::move(r));
  }
  std::vector<PiecewiseFn> Fb, Fc;
  for (double v : b) Fb.push_back(PiecewiseFn::constant(bp, v));
  for (double v : c) Fc.push_back(PiecewiseFn::constant(bp, v));
  return CTLPInstance(std::move(FA), std::move(Fb), std::move(Fc));
}

Trajectory constant_trajectory(const TimeGrid& g, Vector v) {
  return Trajectory(g, std::vector<Vector>(g.size(), std::move(v)));
}

}  // namespace

TEST(Instance, Example1Shape) {
  const CTLPInstance inst = example1::instance();
  EXPECT_EQ(inst.m(), 5u);
  EXPECT_EQ(inst.n(), 2u);
  EXPECT_EQ(inst.horizon(), 2.0);
  EXPECT_EQ(inst.breakpoints().points(), (std::vector<double>{0.0, 1.0, 2.0}));
}

TEST(Instance, ScalarConstantHasUnitBound) {
  const CTLPInstance inst = constant_instance({{1.0}}, {1.0}, {1.0});
  EXPECT_DOUBLE_EQ(inst.data_bound(), 1.0);
}

TEST(Instance, DataBoundDominatesSampledNorms) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const CTLPInstance inst = test::random_instance(rng, 2, 3, 3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int s = 0; s < 50; ++s) {
      const PointData p = inst.at(U(rng));
      EXPECT_LE(spectral_norm(p.A), inst.data_bound() * (1 + 1e-12));
      EXPECT_LE(norm2(p.b), inst.data_bound() * (1 + 1e-12));
      EXPECT_LE(norm2(p.c), inst.data_bound() * (1 + 1e-12));
    }
  }
}

TEST(Instance, RejectsInconsistentData) {
  const Breakpoints bp({0.0, 1.0});
  const auto one = PiecewiseFn::constant(bp, 1.0);
  EXPECT_THROW(CTLPInstance({{one}}, {one, one}, {one}), InputError);
  EXPECT_THROW(CTLPInstance({{one, one}}, {one}, {one}), InputError);
  const auto other = PiecewiseFn::constant(Breakpoints({0.0, 2.0}), 1.0);
  EXPECT_THROW(CTLPInstance({{one}}, {other}, {one}), InputError);
  const PiecewiseFn quartic(bp, {Polynomial({0, 0, 0, 0, 1})});
  EXPECT_THROW(CTLPInstance({{quartic}}, {one}, {one}), InputError);
}

TEST(Instance, MergesBreakpoints) {
  const auto a = PiecewiseFn::constant(Breakpoints({0.0, 0.5, 1.0}), 1.0);
  const auto b = PiecewiseFn(Breakpoints({0.0, 0.25, 1.0}), {Polynomial({1.0}), Polynomial({2.0})});
  const CTLPInstance inst({{a}}, {b}, {a});
  EXPECT_EQ(inst.breakpoints().points(), (std::vector<double>{0.0, 0.25, 0.5, 1.0}));
  EXPECT_DOUBLE_EQ(inst.b(0).eval(0.6), 2.0);
}

TEST(EvalInstance, Example1Snapshots) {
  const CTLPInstance inst = example1::instance();
  const PointData p0 = eval_instance(inst, 0.0);
  EXPECT_EQ(p0.A(3, 0), 1.0);
  EXPECT_EQ(p0.A(3, 1), 1.0);
  EXPECT_EQ(p0.b[3], 3.0);
  EXPECT_EQ(p0.b[4], 0.25);
  EXPECT_EQ(p0.c, (Vector{-1.0, -1.0}));
  const PointData p2 = eval_instance(inst, 2.0);
  EXPECT_EQ(p2.A(2, 0), 1.0);
  EXPECT_EQ(p2.A(2, 1), -1.0);
  EXPECT_EQ(p2.c, (Vector{-1.0, -1.0}));
  EXPECT_THROW(eval_instance(inst, 2.5), DomainError);
}

TEST(EvalInstance, ConstantInstance) {
  const CTLPInstance inst = constant_instance({{2.0, -1.0}}, {3.0}, {1.0, 4.0});
  for (double t : {0.0, 0.3, 1.0}) {
    const PointData p = eval_instance(inst, t);
    EXPECT_EQ(p.A(0, 1), -1.0);
    EXPECT_EQ(p.b[0], 3.0);
    EXPECT_EQ(p.c[1], 4.0);
  }
}

TEST(EvalInstance, EntrywiseConsistentWithPiecewiseEval) {
  std::mt19937_64 rng(42);
  const CTLPInstance inst = test::random_instance(rng, 3, 2, 4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int s = 0; s < 100; ++s) {
    const double t = U(rng);
    const PointData p = eval_instance(inst, t);
    for (std::size_t i = 0; i < inst.m(); ++i) {
      EXPECT_EQ(p.b[i], eval(inst.b(i), t));
      for (std::size_t j = 0; j < inst.n(); ++j) EXPECT_EQ(p.A(i, j), eval(inst.a(i, j), t));
    }
    for (std::size_t j = 0; j < inst.n(); ++j) EXPECT_EQ(p.c[j], eval(inst.c(j), t));
  }
}

TEST(Dual, TransposedShape) {
  const CDPInstance dual(example1::instance());
  EXPECT_EQ(dual.variables(), 5u);
  EXPECT_EQ(dual.equality_rows(), 2u);
  EXPECT_DOUBLE_EQ(dual.coefficient(0, 2).eval(1.5), 1.0);
}

TEST(FeasibilityResidual, Examples) {
  const CTLPInstance inst = example1::instance();
  const TimeGrid g = TimeGrid::from_times(inst.breakpoints(), std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  EXPECT_LE(feasibility_residual(inst, example1::zbar_on(g)), 1e-12);
  EXPECT_EQ(feasibility_residual(inst, constant_trajectory(g, {0.0, 0.0})), 0.0);
  EXPECT_DOUBLE_EQ(feasibility_residual(inst, constant_trajectory(g, {10.0, 10.0})), 17.0);
  EXPECT_THROW(feasibility_residual(inst, constant_trajectory(g, {1.0})), InputError);
}

TEST(Trajectory, InterpolationAndJumps) {
  const Breakpoints bp({0.0, 1.0, 2.0});
  const TimeGrid g = refine_grid(bp, 1).with_left_limits(bp);
  const Trajectory tr(g, {{0.0}, {1.0}, {5.0}, {7.0}});
  EXPECT_DOUBLE_EQ(tr.at({0.5, 0})[0], 0.5);
  EXPECT_DOUBLE_EQ(tr.at({1.0, 0})[0], 1.0);
  EXPECT_DOUBLE_EQ(tr.at({1.0, 1})[0], 5.0);
  EXPECT_DOUBLE_EQ(tr.at({1.5, 1})[0], 6.0);
  const PiecewiseFn f = tr.component(0, 2.0);
  EXPECT_DOUBLE_EQ(f.integrate(), 0.5 + 6.0);
  const Trajectory right(g, {{0.0}, {1.0}, {5.0}, {7.0}}, Interpolation::PiecewiseConstantRight);
  EXPECT_DOUBLE_EQ(right.at({0.5, 0})[0], 0.0);
  EXPECT_THROW(Trajectory(g, {{0.0}, {1.0}}), InputError);
  EXPECT_THROW(Trajectory(g, {{0.0}, {1.0}, {std::nan("")}, {7.0}}), InputError);
}

TEST(BoundednessProbe, Examples) {
  const CTLPInstance inst = example1::instance();
  EXPECT_EQ(boundedness_probe(inst, example1::grid(4)).kind, BoundednessKind::Bounded);

  const CTLPInstance half = constant_instance({{1.0, 0.0}}, {1.0}, {0.0, 0.0});
  const BoundednessVerdict v = boundedness_probe(half, refine_grid(half.breakpoints(), 2));
  ASSERT_EQ(v.kind, BoundednessKind::UnboundedAt);
  EXPECT_EQ(v.direction, (Vector{0.0, 1.0}));

  const CTLPInstance empty = constant_instance({{1.0}, {-1.0}}, {-1.0, 0.0}, {0.0});
  const BoundednessVerdict e = boundedness_probe(empty, refine_grid(empty.breakpoints(), 2));
  ASSERT_EQ(e.kind, BoundednessKind::InfeasibleAt);
  EXPECT_EQ(e.t, 0.0);
}
