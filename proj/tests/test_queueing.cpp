#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "d2dsim/queueing.hpp"

using namespace d2dsim;

TEST_CASE("realize_transfer: physical minimum binds") {
  RngStream rng(1, 0);
  TransferOutcome o = realize_transfer(10, 1.0, 1.0, 5, 0.0, rng);
  CHECK(o.sent == 1);
  CHECK(o.delivered == 1);

  o = realize_transfer(10, 5.0, 5.0, 5, 1.0, rng);
  CHECK(o.sent == 5);
  CHECK(o.delivered == 0);

  o = realize_transfer(10, 5.0, 2.0, 5, 0.0, rng);
  CHECK(o.sent == 2);  // receiver capability binds

  o = realize_transfer(3, 5.0, 5.0, 0, 0.0, rng);
  CHECK(o.sent == 0);  // empty sender queue
}

TEST_CASE("realize_transfer: binomial thinning within 4 sigma on fixed seeds") {
  // n=1000, deliver probability 0.7: mean 700, sigma = sqrt(1000*0.7*0.3).
  double sigma = std::sqrt(1000.0 * 0.7 * 0.3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(seed, 11);
    TransferOutcome o = realize_transfer(1000, 1000.0, 1000.0, 1000, 0.3, rng);
    CHECK(o.sent == 1000);
    CHECK(std::fabs(static_cast<double>(o.delivered) - 700.0) < 4.0 * sigma);
  }
}

TEST_CASE("realize_transfer: fluid expectation rounds the mean") {
  RngStream rng(1, 0);
  TransferOutcome o =
      realize_transfer(100, 100.0, 100.0, 100, 0.3, rng, LossMode::FluidExpectation);
  CHECK(o.delivered == 70);
  o = realize_transfer(100, 100.0, 100.0, 100, 1.0, rng, LossMode::FluidExpectation);
  CHECK(o.delivered == 0);
}

TEST_CASE("realize_transfer: fluid equals stochastic when lossless") {
  RngStream rng(5, 0);
  for (int i = 0; i < 50; ++i) {
    std::int64_t sched = static_cast<std::int64_t>(rng.next_u64() % 10);
    std::int64_t backlog = static_cast<std::int64_t>(rng.next_u64() % 10);
    RngStream r1(9, 1), r2(9, 1);
    TransferOutcome a =
        realize_transfer(sched, 4.0, 3.0, backlog, 0.0, r1, LossMode::Stochastic);
    TransferOutcome b = realize_transfer(sched, 4.0, 3.0, backlog, 0.0, r2,
                                         LossMode::FluidExpectation);
    CHECK(a.sent == b.sent);
    CHECK(a.delivered == b.delivered);
    CHECK(a.delivered == a.sent);
  }
}

TEST_CASE("update_queue examples") {
  CHECK(update_queue(5, 2, 1, 0) == 4);
  CHECK(update_queue(1, 3, 2, 0) == 2);
  CHECK(update_queue(0, 0, 0, 7) == 7);
}

TEST_CASE("carry accumulator realizes fractional rates exactly") {
  CarryAccumulator carry;
  std::int64_t total = 0;
  for (int t = 0; t < 1000; ++t) total += carry.take(0.1);
  CHECK(total == 100);
  // Unused whole budget does not bank.
  CarryAccumulator c2;
  CHECK(c2.take(1.7) == 1);
  CHECK(c2.take(1.7) == 2);  // 0.7 + 1.7
  CHECK(c2.carry == doctest::Approx(0.4));
}

TEST_CASE("backlog sums match a brute-force table walk") {
  RngStream rng(3, 0);
  QueueState q(5, 3);
  std::int64_t expect_total = 0;
  std::vector<std::int64_t> expect_flow(3, 0);
  for (NodeId n = 0; n < 5; ++n) {
    for (FlowId f = 0; f < 3; ++f) {
      auto v = static_cast<std::int64_t>(rng.next_u64() % 100);
      q.set_backlog(n, f, v);
      expect_total += v;
      expect_flow[f] += v;
    }
  }
  CHECK(q.total_backlog() == expect_total);
  std::int64_t flow_sum = 0;
  for (FlowId f = 0; f < 3; ++f) {
    CHECK(q.per_flow_backlog(f) == expect_flow[f]);
    flow_sum += q.per_flow_backlog(f);
  }
  CHECK(flow_sum == q.total_backlog());
  CHECK(QueueState(4, 2).total_backlog() == 0);
  QueueState single(2, 1);
  single.set_backlog(1, 0, 42);
  CHECK(single.total_backlog() == 42);
}

TEST_CASE("fuzzed transfer/update sequences: conservation and nonnegativity") {
  // Two-node relay chain driven by random decisions; tracks the exact
  // integer identity admitted = delivered + backlog + lost.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RngStream rng(seed, 21);
    RngStream loss_rng(seed, 22);
    std::int64_t u0 = 0, u1 = 0;
    std::int64_t admitted = 0, delivered = 0, lost = 0;
    CarryAccumulator link0, link1, cap1, cap2;
    for (int t = 0; t < 5000; ++t) {
      std::int64_t add = static_cast<std::int64_t>(rng.next_u64() % 3);
      std::int64_t sched0 = static_cast<std::int64_t>(rng.next_u64() % 4);
      std::int64_t sched1 = static_cast<std::int64_t>(rng.next_u64() % 4);
      double p = 0.25;

      TransferOutcome t0 = realize_transfer_budgeted(
          sched0, link0.take(1.3), cap1.take(0.9), u0, p, loss_rng,
          LossMode::Stochastic);
      TransferOutcome t1 = realize_transfer_budgeted(
          sched1, link1.take(2.0), cap2.take(1.5), u1, p, loss_rng,
          LossMode::Stochastic);

      u0 = update_queue(u0, t0.sent, 0, add);
      u1 = update_queue(u1, t1.sent, t0.delivered, 0);
      admitted += add;
      delivered += t1.delivered;
      lost += (t0.sent - t0.delivered) + (t1.sent - t1.delivered);

      CHECK(u0 >= 0);
      CHECK(u1 >= 0);
      CHECK(t0.delivered <= t0.sent);
      CHECK(t0.sent <= std::max<std::int64_t>(t0.scheduled, 0));
      REQUIRE(admitted == delivered + u0 + u1 + lost);
    }
  }
}
