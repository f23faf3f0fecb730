#include <gtest/gtest.h>

#include <filesystem>

#include "pinchflow/io.hpp"
#include "pinchflow/oracle.hpp"

using namespace pinchflow;

TEST(Io, NumbersRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) EXPECT_EQ(io::to_double(io::num(x)), x);
  EXPECT_THROW(io::to_double("1.5x"), Error);
}

TEST(Io, TimeseriesRoundTrip) {
  const Trajectory tr = synthetic_trajectory(1.3, 0.5, 0.01, 64);
  const std::string text = io::timeseries_csv(tr);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,r,u_boundary,supA2,H_boundary,dt,argmax_at_boundary");
  const auto back = io::parse_timeseries(text);
  ASSERT_EQ(back.size(), tr.samples.size());
  for (std::size_t j = 0; j < back.size(); ++j) {
    EXPECT_EQ(back[j].t, tr.samples[j].t);
    EXPECT_EQ(back[j].sup_A2, tr.samples[j].sup_A2);
    EXPECT_EQ(back[j].argmax_at_boundary, tr.samples[j].argmax_at_boundary);
  }
  EXPECT_THROW(io::parse_timeseries("t,r\n1,2\n"), Error);
}

TEST(Io, SnapshotsRoundTripAndKeepInvariants) {
  const auto cone = profiles::cone(1.0);
  std::vector<GraphState> snaps = {sphere_state(2.0, 3, 0.0, 1.0, 40), sphere_state(2.0, 3, 0.5, 1.0, 40)};
  const auto back = io::parse_snapshots(io::snapshots_csv(snaps), 3);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back[k].t, snaps[k].t);
    EXPECT_EQ(back[k].N(), snaps[k].N());
    for (std::size_t i = 0; i <= snaps[k].N(); ++i) EXPECT_NEAR(back[k].u(i), snaps[k].u(i), 1e-15);
    EXPECT_TRUE(check_invariants(back[k], cone).consistent());
  }
}

TEST(Io, ReportQuotingAndParse) {
  io::Report r;
  r.put("a", 1.5);
  r.put("b", std::string("say \"hi\"\nthere"));
  r.put("c", true);
  r.put_null("d");
  const auto m = io::parse_report(r.text());
  EXPECT_EQ(m.at("a"), "1.5");
  EXPECT_EQ(m.at("b"), "say \"hi\"\nthere");
  EXPECT_EQ(m.at("c"), "true");
  EXPECT_EQ(m.at("d"), "null");
  r.replace_raw("a", "2");
  EXPECT_EQ(io::parse_report(r.text()).at("a"), "2");
}

TEST(Io, ReportHasRequiredKeys) {
  const Trajectory tr = synthetic_trajectory(1.5, 0.5, 0.01, 64);
  SingularityReport rep = classify(tr);
  rep.bound_verdicts.push_back(check_bounds(rep, tr, Type2Certificate(1, 1, 1, 3, 3, 1)));
  io::RunInfo info;
  info.certificate = "type2(...)";
  const auto m = io::parse_report(io::build_report(tr, rep, {}, info).text());
  for (const char* k : {"profile_label", "certificate", "T_est", "T_uncertainty", "p_fit", "p_residual", "type",
                        "bound_verdicts.count", "bound_verdicts.0.pass", "stop_reason", "grid.N", "steps.accepted"}) {
    EXPECT_TRUE(m.count(k)) << k;
  }
  EXPECT_EQ(m.at("type"), "Type2");
}

TEST(Io, AtomicWrite) {
  const auto dir = std::filesystem::temp_directory_path() / "pinchflow_io_test";
  std::filesystem::create_directories(dir);
  io::write_atomic(dir / "x.txt", "hello\n");
  EXPECT_EQ(io::read_file(dir / "x.txt"), "hello\n");
  EXPECT_FALSE(std::filesystem::exists(dir / "x.txt.tmp"));
  std::filesystem::remove_all(dir);
}
