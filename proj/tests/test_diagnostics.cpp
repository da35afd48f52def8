#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "stefan_track/diagnostics.hpp"

using namespace stefan_track;
namespace fs = std::filesystem;

namespace {

const PhysicalParams kZinc = PhysicalParams::zinc();

Planner planner_with(const PhysicalParams& phys) {
  return Planner::with_estimated_certificate(phys, Reference::exp_trig(ReferenceParams::baseline()));
}

// Plant state sampled exactly from the reference profile, with the interface offset by `shift`.
SimState state_on_reference(const SeriesPlan& plan, double shift, double offset = 0.0) {
  SimState st;
  st.t = plan.t;
  st.s = plan.s_r + shift;
  st.sdot = plan.sdot_r;
  st.temp.resize(202);
  for (std::size_t i = 0; i < st.temp.size(); ++i) {
    st.temp[i] = reference_temperature(plan, st.x(i) - shift).value + offset;
  }
  return st;
}

std::vector<TrajectoryRecord> exponential_records(double e0, double c, double scale = 1.0) {
  std::vector<TrajectoryRecord> out;
  for (int i = 0; i <= 100; ++i) {
    TrajectoryRecord r{};
    r.t = 60.0 * i;
    r.E_r = scale * (30.0 + 1e-4 * r.t);
    r.E = r.E_r + scale * e0 * std::exp(-c * r.t);
    out.push_back(r);
  }
  return out;
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("stefan_track_diag_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(TrackingFunctional, ZeroOnReference) {
  const Planner p = planner_with(kZinc);
  const SeriesPlan plan = p.plan_at(1800.0);
  EXPECT_NEAR(tracking_functional(state_on_reference(plan, 0.0), plan), 0.0, 1e-20);
}

TEST(TrackingFunctional, InterfaceOffsetCounts) {
  const Planner p = planner_with(kZinc);
  const SeriesPlan plan = p.plan_at(1800.0);
  const double phi = tracking_functional(state_on_reference(plan, 1e-3), plan);
  EXPECT_GE(phi, 1e-6);
  EXPECT_NEAR(phi, 1e-6, 1e-12);
}

TEST(TrackingFunctional, InvariantUnderCommonTemperatureShift) {
  PhysicalParams warm = kZinc;
  warm.T_m = 7.5;
  const SeriesPlan cold_plan = planner_with(kZinc).plan_at(900.0);
  const SeriesPlan warm_plan = planner_with(warm).plan_at(900.0);
  SimState st = state_on_reference(cold_plan, 2e-4);
  for (std::size_t i = 0; i < st.temp.size(); ++i) st.temp[i] += 0.3 * std::sin(40.0 * st.x(i));
  SimState shifted = st;
  for (double& T : shifted.temp) T += 7.5;
  const double a = tracking_functional(st, cold_plan);
  const double b = tracking_functional(shifted, warm_plan);
  EXPECT_NEAR(a, b, 1e-9 * a);
}

TEST(EnergyDecayResidual, ExactExponentialIsZero) {
  EXPECT_NEAR(energy_decay_residual(exponential_records(-3.7, 0.002), 0.002), 0.0, 1e-12);
}

TEST(EnergyDecayResidual, WrongGainIsDetected) {
  EXPECT_GT(energy_decay_residual(exponential_records(-3.7, 0.004), 0.002), 0.2);
}

TEST(EnergyDecayResidual, ScaleInvariant) {
  const auto a = exponential_records(-3.7, 0.0021);
  const auto b = exponential_records(-3.7, 0.0021, 250.0);
  EXPECT_NEAR(energy_decay_residual(a, 0.002), energy_decay_residual(b, 0.002), 1e-12);
  EXPECT_THROW(energy_decay_residual({}, 0.002), std::invalid_argument);
}

TEST(FitDecayRate, ExactExponential) {
  std::vector<double> t, v;
  for (int i = 0; i < 50; ++i) {
    t.push_back(10.0 * i);
    v.push_back(std::exp(-0.003 * t.back()));
  }
  const DecayFit f = fit_decay_rate(t, v);
  EXPECT_NEAR(f.rate, 0.003, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.points, 50u);
}

TEST(FitDecayRate, ConstantAndErrors) {
  const std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_EQ(fit_decay_rate(t, std::vector<double>(10, 2.0)).rate, 0.0);
  std::vector<double> bad(10, 1.0);
  bad[4] = 0.0;
  EXPECT_THROW(fit_decay_rate(t, bad), std::invalid_argument);
  EXPECT_THROW(fit_decay_rate({0, 1, 2}, {1, 1, 1}), std::invalid_argument);
}

TEST(Records, EmptyListIsHeaderOnly) {
  const auto d = temp_dir("empty");
  write_records({}, d / "t.csv", {"config-hash: 0, version: test"});
  std::ifstream in(d / "t.csv");
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), std::string("# config-hash: 0, version: test\n") + kTrajectoryHeader + "\n");
  EXPECT_TRUE(parse_records(d / "t.csv").empty());
  EXPECT_FALSE(fs::exists(d / "t.csv.tmp"));
}

TEST(Records, RoundTripToNineDigits) {
  std::vector<TrajectoryRecord> recs(2);
  recs[0] = {0.0, 0.1, 0.0, 23043.123456789, 29.2396, 32.9187, 3.397, 0.0, 10.0, {}};
  recs[1] = {3.0, 0.10000012345678, 3.1e-5, -133.7, 29.3, 32.92, std::nan(""), -0.0075, 9.5, {}};
  recs[1].flags.flux_nonneg = false;
  recs[1].flags.temp_valid = false;
  std::istringstream in(format_records(recs, {"p"}));
  const auto back = parse_records(in);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& a = recs[i];
    const auto& b = back[i];
    const std::vector<std::pair<double, double>> fields{{a.t, b.t},     {a.s, b.s},         {a.sdot, b.sdot},
                                                        {a.q_c, b.q_c}, {a.E, b.E},         {a.E_r, b.E_r},
                                                        {a.T_min, b.T_min}, {a.T_at0, b.T_at0}};
    for (auto [x, y] : fields) EXPECT_NEAR(x, y, 1e-8 * std::abs(x) + 1e-300);
    EXPECT_EQ(a.flags.flux_nonneg, b.flags.flux_nonneg);
    EXPECT_EQ(a.flags.temp_valid, b.flags.temp_valid);
  }
  EXPECT_NEAR(back[0].Phi, 3.397, 1e-12);
  EXPECT_TRUE(std::isnan(back[1].Phi));
}

TEST(Records, MalformedInputRejected) {
  std::istringstream no_header("1,2,3\n");
  EXPECT_THROW(parse_records(no_header), std::invalid_argument);
  std::istringstream short_row(std::string(kTrajectoryHeader) + "\n1,2,3\n");
  EXPECT_THROW(parse_records(short_row), std::invalid_argument);
  EXPECT_THROW(parse_records(fs::path("/nonexistent/t.csv")), std::runtime_error);
}

TEST(Records, UnwritablePathReported) {
  try {
    write_records({}, "/nonexistent_dir/t.csv");
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent_dir/t.csv"), std::string::npos);
  }
}
