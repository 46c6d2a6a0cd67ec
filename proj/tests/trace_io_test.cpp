#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "aamkit/error.hpp"
#include "aamkit/rng.hpp"
#include "aamkit/trace_io.hpp"

using namespace aamkit;
using namespace aamkit::io;

namespace {

AamTrace random_trace(std::size_t rows, std::uint64_t seed) {
  Rng rng(seed);
  AamTrace t;
  t.status = RunStatus::kConverged;
  t.eps_estimated = true;
  for (std::size_t n = 0; n < rows; ++n) {
    TraceRecord r;
    r.n = n;
    r.p = {rng.normal(), rng.uniform() * 1e-300, -rng.uniform() * 1e300};
    r.q = {rng.normal() / 3.0};
    r.cost = rng.normal();
    r.eps = rng.uniform();
    if (n > 0) {
      r.cross_cost = rng.normal();
      r.gamma = t.records.back().eps + r.eps;
    }
    if (n % 3 == 1) {
      r.drift_ok = n % 2 == 0;
      r.drift_slack = rng.normal();
    }
    if (n % 5 == 2) r.oracle_cross = std::numeric_limits<double>::infinity();
    if (n % 7 == 3) r.proof_a = -0.0;
    t.records.push_back(r);
  }
  t.liminf_estimate = rng.normal();
  if (rows > 0) t.limit_candidates.push_back({t.records.back().p, t.records.back().q, 1.5, rows - 1});
  return t;
}

bool same(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) ||
         (a == b && std::signbit(a) == std::signbit(b));
}

void expect_equal(const AamTrace& a, const AamTrace& b) {
  ASSERT_EQ(a.records.size(), b.records.size());
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.eps_available, b.eps_available);
  EXPECT_EQ(a.eps_estimated, b.eps_estimated);
  EXPECT_TRUE(same(a.liminf_estimate, b.liminf_estimate));
  ASSERT_EQ(a.limit_candidates.size(), b.limit_candidates.size());
  for (std::size_t k = 0; k < a.limit_candidates.size(); ++k) {
    EXPECT_EQ(a.limit_candidates[k].p, b.limit_candidates[k].p);
    EXPECT_EQ(a.limit_candidates[k].n, b.limit_candidates[k].n);
  }
  for (std::size_t n = 0; n < a.records.size(); ++n) {
    const auto& x = a.records[n];
    const auto& y = b.records[n];
    EXPECT_EQ(x.n, y.n);
    EXPECT_EQ(x.p, y.p);
    EXPECT_EQ(x.q, y.q);
    EXPECT_TRUE(same(x.cost, y.cost));
    EXPECT_TRUE(same(x.cross_cost, y.cross_cost));
    EXPECT_TRUE(same(x.eps, y.eps));
    EXPECT_TRUE(same(x.gamma, y.gamma));
    EXPECT_EQ(x.drift_ok, y.drift_ok);
    EXPECT_EQ(x.drift_slack.has_value(), y.drift_slack.has_value());
    if (x.drift_slack) EXPECT_TRUE(same(*x.drift_slack, *y.drift_slack));
    EXPECT_EQ(x.oracle_cross, y.oracle_cross);
    EXPECT_EQ(x.proof_a.has_value(), y.proof_a.has_value());
    if (x.proof_a) EXPECT_TRUE(same(*x.proof_a, *y.proof_a));
  }
}

}  // namespace

TEST(TraceIo, EmptyTraceRoundTrips) {
  const AamTrace t;
  std::stringstream s;
  write_trace(s, t);
  const auto back = read_trace(s);
  expect_equal(t, back.trace);
}

TEST(TraceIo, ThousandRowsBitExact) {
  const auto t = random_trace(1000, 5);
  std::stringstream s;
  write_trace(s, t, {"round trip", 0xdeadbeefcafef00dULL, 77});
  const auto text = s.str();
  const auto back = read_trace(s);
  expect_equal(t, back.trace);
  EXPECT_EQ(back.header.scenario, "round trip");
  EXPECT_EQ(back.header.scenario_hash, 0xdeadbeefcafef00dULL);
  EXPECT_EQ(back.header.seed, 77u);
  std::stringstream again;
  write_trace(again, back.trace, back.header);
  EXPECT_EQ(again.str(), text);
}

TEST(TraceIo, TruncationReportsTheRow) {
  const auto t = random_trace(50, 6);
  std::stringstream s;
  write_trace(s, t);
  const auto text = s.str();
  // Cut in the middle of the row for n = 20.
  const auto pos = text.find("\n20\t");
  ASSERT_NE(pos, std::string::npos);
  std::stringstream cut(text.substr(0, pos + 8));
  try {
    read_trace(cut);
    FAIL() << "expected CorruptTraceError";
  } catch (const CorruptTraceError& e) {
    EXPECT_EQ(e.row(), 20u);
  }
  // Dropping only the end marker is detected too.
  std::stringstream no_end(text.substr(0, text.rfind("# end")));
  EXPECT_THROW(read_trace(no_end), CorruptTraceError);
}

TEST(TraceIo, GarbageFieldIsCorrupt) {
  const auto t = random_trace(5, 7);
  std::stringstream s;
  write_trace(s, t);
  auto text = s.str();
  const auto pos = text.find("\n3\t");
  text.replace(pos + 3, 1, "x");
  std::stringstream bad(text);
  EXPECT_THROW(read_trace(bad), CorruptTraceError);
}

TEST(TraceIo, MissingFileIsAnIoError) {
  EXPECT_THROW(read_trace(std::string("/nonexistent/trace.tsv")), IoError);
  EXPECT_THROW(write_trace(std::string("/nonexistent/dir/trace.tsv"), AamTrace{}), IoError);
}
