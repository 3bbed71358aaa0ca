#include <gtest/gtest.h>

#include "geogate/double_loop.hpp"
#include "geogate/errors.hpp"
#include "test_util.hpp"

using namespace geogate;

namespace {

struct Frozen {
  double epsilon;
  double x1;
  double x2;
};

// Roots of the Gamma = 1/2 conditions at omega0_tilde = -1, found by an
// independent scalar root search on the midpoint-exponential oracle and frozen.
constexpr Frozen kHalfRoots[] = {
    {0.5, -0.68150623, 0.78027888},
    {0.3, -0.82212744, 1.10500124},
    {0.1, -0.94215194, 1.60919292},
};

GeneralLoopSpec random_spec(std::mt19937_64& rng, bool reversed) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GeneralLoopSpec s;
  s.loop1 = LoopDrive{0.1 + u(rng), -2.0 + 4.0 * u(rng), (u(rng) < 0.5 ? -1 : 1) * (0.3 + u(rng))};
  s.loop2 = LoopDrive{0.1 + u(rng), -2.0 + 4.0 * u(rng), (u(rng) < 0.5 ? -1 : 1) * (0.3 + u(rng))};
  s.loop2_reversed = reversed;
  return s;
}

// Dynamical sum along psi_1+ with the loop-2 field assembled here from its
// definition: tilt by -theta of the (negated if reversed) rotating drive.
double oracle_dynamical_sum(const GeneralLoopSpec& s, int steps) {
  const LoopGeometry g = geometry_of(s);
  const LoopDrive& a = s.loop1;
  const LoopDrive& b = s.loop2;
  auto f1 = [&](double t) {
    return Vec3(a.omega1 * std::cos(a.omega_rf * t), -a.omega1 * std::sin(a.omega_rf * t), a.omega0);
  };
  const double sign = s.loop2_reversed ? -1.0 : 1.0;
  const Eigen::Matrix3d tilt = Eigen::AngleAxisd(-g.theta, Vec3::UnitY()).toRotationMatrix();
  auto f2 = [&](double t) -> Vec3 {
    return tilt * (sign * Vec3(b.omega1 * std::cos(b.omega_rf * t),
                               -b.omega1 * std::sin(b.omega_rf * t), b.omega0));
  };
  const double delta1 = a.omega0 - a.omega_rf;
  const double chi = std::atan2(a.omega1, delta1);
  const PureState psi(std::cos(chi / 2), std::sin(chi / 2));
  const auto r1 = oracle::midpoint_state(f1, 2 * kPi / std::abs(a.omega_rf), steps, psi);
  const auto r2 =
      oracle::midpoint_state(f2, 2 * kPi / std::abs(b.omega_rf), steps, r1.final_state);
  return r1.dynamical + r2.dynamical;
}

}  // namespace

TEST(Geometry, NmrMapping) {
  NmrLoopPair p;
  p.omega0_tilde = -1.0;
  p.epsilon = 0.5;
  p.omega1_rf_tilde = -0.7;
  p.omega2_rf_tilde = 0.8;
  const LoopGeometry g = geometry_of(p);
  EXPECT_NEAR(g.delta1, -1.0 + 0.7, 1e-15);
  EXPECT_NEAR(g.delta2, -1.0 - 0.8, 1e-15);
  EXPECT_NEAR(g.chi1, std::atan2(0.5, g.delta1) - kPi, 1e-15);
  EXPECT_NEAR(g.theta, g.chi2 - g.chi1, 1e-15);
  EXPECT_NEAR(g.Theta, 0.5 * (g.chi1 + g.chi2), 1e-15);
  EXPECT_LE(g.chi1, 0.0);
  EXPECT_GE(g.chi1, -kPi);
  EXPECT_NEAR(std::tan(g.chi2), 0.5 / g.delta2, 1e-12);
}

TEST(Geometry, RejectsSameSignRf) {
  NmrLoopPair p;
  p.omega1_rf_tilde = 0.5;
  p.omega2_rf_tilde = 0.6;
  EXPECT_THROW(p.to_general(), InvalidArgument);
  p.omega1_rf_tilde = -0.5;
  p.omega0_tilde = 1.0;
  EXPECT_THROW(p.to_general(), InvalidArgument);
}

TEST(Residuals, ClosedFormExample) {
  GeneralLoopSpec s;
  s.loop1 = LoopDrive{1.0, 2.0, 1.0};
  s.loop2 = LoopDrive{1.0, 0.0, 1.0};
  const Residuals r = residuals(s, 0.5);
  EXPECT_NEAR(r.r_dyn_closed, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.r_geo_closed, 1.0 / std::sqrt(2.0) + 1.0 / std::sqrt(2.0) - 1.5, 1e-12);
}

TEST(Residuals, GeometricConditionZero) {
  // Delta/Omega = 3/4 on both loops gives 3/2 = 2 - Gamma at Gamma = 1/2.
  GeneralLoopSpec s;
  const double delta = 3.0 / std::sqrt(7.0);
  s.loop1 = LoopDrive{1.0, 1.0 + delta, 1.0};
  s.loop2 = LoopDrive{1.0, delta - 1.0, 1.0};
  EXPECT_NEAR(residuals(s, 0.5).r_geo_closed, 0.0, 1e-12);
}

TEST(PhaseSums, IdenticalLoopsWithoutReversal) {
  GeneralLoopSpec s;
  s.loop1 = LoopDrive{kPi, 2 * kPi, 1.6 * kPi};
  s.loop2 = s.loop1;
  s.loop2_reversed = false;
  const PhaseSums sums = phase_sums_oracle(s);
  const double gd = cyclic_report(s.loop1.field()).plus.dynamical;
  EXPECT_NEAR(geometry_of(s).theta, 0.0, 1e-15);
  EXPECT_NEAR(sums.dynamical, 2 * gd, 1e-7);
  EXPECT_EQ(sums.loop2_branch, Branch::Plus);
}

TEST(PhaseSums, OracleMatchesClosedFormOnRandomSpecs) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 40; ++k) {
    const GeneralLoopSpec s = random_spec(rng, k % 2 == 0);
    const PhaseSums o = phase_sums_oracle(s);
    const PhaseSums c = phase_sums_closed(s);
    EXPECT_NEAR(o.dynamical, c.dynamical, 1e-6);
    EXPECT_NEAR(o.geometric_loop1, c.geometric_loop1, 1e-6);
    EXPECT_NEAR(o.geometric_loop2, c.geometric_loop2, 1e-6);
    EXPECT_NEAR(o.cyclicity, 1.0, 1e-9);
  }
}

TEST(PhaseSums, IndependentFieldConstruction) {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 6; ++k) {
    const GeneralLoopSpec s = random_spec(rng, k % 2 == 1);
    EXPECT_NEAR(phase_sums_oracle(s).dynamical, oracle_dynamical_sum(s, 20000), 1e-6);
  }
}

TEST(Connection, BlochAxesMeet) {
  std::mt19937_64 rng(33);
  for (int k = 0; k < 50; ++k) {
    const GeneralLoopSpec s = random_spec(rng, k % 2 == 0);
    const LoopGeometry g = geometry_of(s);
    const Vec3 m1 = rotating_frame(s.loop1.field()).m;
    const FieldFunction f2 = loop2_lab_field(s, g);
    LabField untilted = s.loop2.field();
    if (s.loop2_reversed) {
      untilted.omega0 = -untilted.omega0;
      untilted.phi = kPi;
    }
    const Vec3 m2 = so3_rotation_y(-g.theta) * rotating_frame(untilted).m;
    const Branch b = connection_branch(s, g.theta);
    EXPECT_LT((b == Branch::Plus ? Vec3(m1 - m2) : Vec3(m1 + m2)).norm(), 1e-9);
    EXPECT_LT((f2(0.0) - so3_rotation_y(-g.theta) * field_at(untilted, 0.0)).norm(), 1e-12);
  }
}

TEST(Connection, WrongAngleIsAConventionError) {
  std::mt19937_64 rng(34);
  const GeneralLoopSpec s = random_spec(rng, true);
  EXPECT_THROW(connection_branch(s, geometry_of(s).theta + 0.3), ConventionError);
}

TEST(Solve, HalfPhaseRootsMatchFrozenValues) {
  for (const auto& f : kHalfRoots) {
    const SolvedPair sp = solve(f.epsilon, 0.5);
    EXPECT_NEAR(sp.pair.omega1_rf_tilde, f.x1, 1e-7) << f.epsilon;
    EXPECT_NEAR(sp.pair.omega2_rf_tilde, f.x2, 1e-7) << f.epsilon;
    EXPECT_LE(std::abs(sp.residuals.r_dyn), 1e-8);
    EXPECT_LE(std::abs(sp.residuals.r_geo), 1e-8);
    EXPECT_NE(std::signbit(sp.pair.omega1_rf_tilde), std::signbit(sp.pair.omega2_rf_tilde));
    EXPECT_NEAR(sp.residuals.dyn_sum_closed, 0.0, 1e-8);
    EXPECT_NEAR(wrap_pi(sp.residuals.geo_sum_closed - 0.5 * kPi), 0.0, 1e-8);
    EXPECT_NEAR(oracle_dynamical_sum(sp.pair.to_general(), 20000), 0.0, 1e-6);
  }
}

TEST(Solve, DoubledStepsReverification) {
  for (double gamma : {0.25, 1.0}) {
    const SolvedPair sp = solve(0.3, gamma);
    const PhaseSums d = phase_sums_oracle(sp.pair, 2 * kDefaultSteps);
    EXPECT_LE(std::abs(d.dynamical), 1e-7);
    EXPECT_LE(std::abs(wrap_pi(d.geometric - gamma * kPi)), 1e-7);
  }
}

TEST(Solve, Deterministic) {
  const SolvedPair a = solve(0.5, 0.25);
  const SolvedPair b = solve(0.5, 0.25);
  EXPECT_EQ(a.pair.omega1_rf_tilde, b.pair.omega1_rf_tilde);
  EXPECT_EQ(a.pair.omega2_rf_tilde, b.pair.omega2_rf_tilde);
  EXPECT_EQ(a.start_index, b.start_index);
}

TEST(Solve, GuessIsUsedFirst) {
  SolveOptions o;
  o.guess = std::make_pair(0.68, -0.78);
  const SolvedPair sp = solve(0.5, 0.5, -1.0, o);
  EXPECT_EQ(sp.start_index, -1);
  EXPECT_NEAR(sp.pair.omega1_rf_tilde, kHalfRoots[0].x1, 1e-7);
}

TEST(Solve, ScalingInvariance) {
  const SolvedPair sp = solve(0.5, 0.5);
  const double c = 3.7;
  NmrLoopPair scaled = sp.pair;
  scaled.omega0_tilde *= c;
  scaled.omega1_rf_tilde *= c;
  scaled.omega2_rf_tilde *= c;
  const LoopGeometry g = geometry_of(scaled);
  EXPECT_NEAR(g.chi1, sp.geometry.chi1, 1e-12);
  EXPECT_NEAR(g.theta, sp.geometry.theta, 1e-12);
  EXPECT_NEAR(g.Theta, sp.geometry.Theta, 1e-12);
  const PhaseSums s1 = phase_sums_oracle(sp.pair);
  const PhaseSums s2 = phase_sums_oracle(scaled);
  EXPECT_NEAR(s1.dynamical, s2.dynamical, 1e-9);
  EXPECT_NEAR(s1.geometric, s2.geometric, 1e-9);

  const SolvedPair direct = solve(0.5, 0.5, -c);
  EXPECT_NEAR(direct.pair.omega1_rf_tilde / c, sp.pair.omega1_rf_tilde, 1e-7);
}

TEST(Solve, Errors) {
  EXPECT_THROW(solve(0.0, 0.5), SolverFailure);
  EXPECT_THROW(solve(2.5, 0.5), InvalidArgument);
  EXPECT_THROW(solve(0.5, 2.0), InvalidArgument);
  EXPECT_THROW(solve(0.5, 0.0), InvalidArgument);
  EXPECT_THROW(solve(0.5, 0.5, 1.0), InvalidArgument);
  try {
    solve(0.0, 0.5);
  } catch (const SolverFailure& e) {
    EXPECT_NE(std::string(e.what()).find("zero transverse field"), std::string::npos);
  }
}

TEST(Conventions, EnumerationAndReporting) {
  const auto all = enumerate_conventions();
  EXPECT_EQ(all.size(), 12u);
  EXPECT_EQ(all.front().id(), "rf+/chi-lower/theta+");
  const SolvedPair sp = solve(0.5, 0.5);
  const ReportedSolution r = report_under(sp.pair, table_convention());
  EXPECT_NEAR(r.ratio1, -0.6815, 0.6815 * 0.02);
  EXPECT_NEAR(r.ratio2, 0.7803, 0.7803 * 0.02);
  EXPECT_NEAR(r.theta, -sp.geometry.theta, 1e-15);
  EXPECT_NEAR(r.Theta, sp.geometry.Theta, 1e-15);
  const ReportedSolution upper = report_under(sp.pair, {1, ChiBranch::Upper, 1});
  EXPECT_NEAR(upper.Theta, sp.geometry.Theta + kPi, 1e-12);
}

TEST(Table1, DiscrepancyIsReportedHonestly) {
  const Table1Report rep = table1_report();
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_EQ(rep.convention.id(), table_convention().id());
  EXPECT_TRUE(rep.rows[0].match);
  EXPECT_TRUE(rep.rows[2].match);
  // The middle row's theta differs from the published value by about 6.6 %.
  EXPECT_FALSE(rep.rows[1].match);
  EXPECT_NEAR(rep.rows[1].deviation[2], 0.066, 0.002);
  EXPECT_LE(rep.rows[1].deviation[0], kRatioTolerance);
  EXPECT_LE(rep.rows[1].deviation[1], kRatioTolerance);
  EXPECT_LE(rep.rows[1].deviation[3], kAngleTolerance);
  EXPECT_FALSE(rep.all_rows_match);
  EXPECT_NE(rep.summary.find("discrepancy"), std::string::npos);
}

TEST(Fig3, ReportIsConsistent) {
  const Fig3Report r = fig3_report();
  EXPECT_LE(r.doubling_consistency, 1e-7);
  EXPECT_FALSE(r.dynamical_nulled);
  EXPECT_NEAR(r.gamma_from_closed, r.gamma_from_oracle, 1e-6);
  EXPECT_NEAR(r.sums.dynamical, phase_sums_closed(r.spec).dynamical, 1e-6);
  EXPECT_NE(r.note.find("discrepancy"), std::string::npos);
}
