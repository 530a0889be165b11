#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "uavcov/agent.hpp"
#include "uavcov/errors.hpp"

using namespace uavcov;

namespace {

Transition tagged(double tag, std::size_t dim = 4) {
  Transition t;
  t.observation.assign(dim, tag);
  t.next_observation.assign(dim, tag);
  t.reward = tag;
  return t;
}

// Network whose outputs are exactly its output bias.
QNetwork constant_net(const QValues& q, HeadMode head = HeadMode::Linear) {
  QNetwork net(3, head, 2);
  std::copy(q.begin(), q.end(), net.output_bias().begin());
  return net;
}

}  // namespace

TEST(ReplayMemoryTest, EvictsOldestBeyondCapacity) {
  ReplayMemory m;
  for (int i = 1; i <= 61; ++i) m.record(tagged(i));
  EXPECT_EQ(m.size(), 60u);
  EXPECT_EQ(m[0].reward, 2.0);
  EXPECT_EQ(m[59].reward, 61.0);
}

TEST(ReplayMemoryTest, KeepsMostRecentInOrder) {
  ReplayMemory m;
  for (int i = 1; i <= 100; ++i) {
    m.record(tagged(i));
    EXPECT_LE(m.size(), 60u);
  }
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(m[i].reward, 41.0 + i);
}

TEST(ReplayMemoryTest, RejectsShapeChange) {
  ReplayMemory m;
  m.record(tagged(1, 4));
  EXPECT_THROW(m.record(tagged(2, 5)), DimensionMismatch);
}

TEST(EpsilonScheduleTest, ClosedForm) {
  EpsilonSchedule e;
  EXPECT_DOUBLE_EQ(e.value(), 0.47);
  EXPECT_NEAR(e.decay(), 0.4371, 1e-12);
  EXPECT_NEAR(e.value_at(10), 0.47 * std::pow(0.93, 10), 1e-15);
  EXPECT_NEAR(e.value_at(10), 0.2274, 1e-4);
  EXPECT_EQ(e.value_at(1000), 0.05);
  double prev = 1.0;
  for (int k = 0; k <= 100; ++k) {
    EXPECT_LE(e.value_at(k), prev);
    prev = e.value_at(k);
  }
}

TEST(SelectActionTest, EpsilonOneIsUniform) {
  Rng rng(1);
  const QNetwork net = constant_net({0, 5, 0, 0});
  const std::vector<double> obs(3, 0.0);
  std::array<int, 4> counts{};
  for (int i = 0; i < 10000; ++i) ++counts[action_index(select_action(net, obs, 1.0, rng))];
  for (int c : counts) EXPECT_NEAR(c / 10000.0, 0.25, 0.02);
}

TEST(SelectActionTest, GreedyArgmaxAndTieBreak) {
  Rng rng(1);
  const std::vector<double> obs(3, 0.0);
  EXPECT_EQ(select_action(constant_net({0.1, 0.9, 0.3, 0.2}), obs, 0.0, rng), Action::South);
  EXPECT_EQ(select_action(constant_net({0.5, 0.5, 0.5, 0.5}), obs, 0.0, rng), Action::North);
  EXPECT_EQ(greedy_action({1, 3, 3, 2}), Action::South);
}

TEST(SelectActionTest, HeadModeDoesNotChangeGreedyChoice) {
  Rng rng(8);
  std::normal_distribution<double> noise(0.0, 3.0);
  const std::vector<double> obs(3, 0.0);
  for (int i = 0; i < 100; ++i) {
    const QValues q{noise(rng), noise(rng), noise(rng), noise(rng)};
    EXPECT_EQ(select_action(constant_net(q, HeadMode::Linear), obs, 0.0, rng),
              select_action(constant_net(q, HeadMode::Softmax), obs, 0.0, rng));
  }
}

TEST(SelectActionTest, InvariantUnderIncreasingTransform) {
  Rng rng(12);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 200; ++i) {
    const QValues q{u(rng), u(rng), u(rng), u(rng)};
    QValues t;
    for (int k = 0; k < 4; ++k) t[k] = std::exp(0.3 * q[k]) + 7.0;
    EXPECT_EQ(greedy_action(q), greedy_action(t));
  }
}

TEST(QTargetTest, Values) {
  EXPECT_DOUBLE_EQ(q_target(-31.14, {0, 0, 0, 0}, false, 0.91), -31.14);
  EXPECT_NEAR(q_target(100, {1, 10, -3, 2}, false, 0.91), 109.1, 1e-12);
  EXPECT_DOUBLE_EQ(q_target(50, {1e6, 1e6, 1e6, 1e6}, true, 0.91), 50.0);
}

TEST(QTargetTest, Linearity) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-500, 500);
  for (int i = 0; i < 100; ++i) {
    const QValues q{u(rng), u(rng), u(rng), u(rng)};
    const double r = u(rng);
    // Exact for rewards and Q-values on a 1/64 grid, where the sums are exact.
    const double rr = std::round(r * 64) / 64;
    QValues qq;
    for (int k = 0; k < 4; ++k) qq[k] = std::round(q[k] * 64) / 64;
    EXPECT_EQ(q_target(rr, qq, false, 0.5) - q_target(0, qq, false, 0.5), rr);
  }
}

namespace {

Transition random_transition(std::size_t dim, Rng& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  Transition t;
  for (std::size_t i = 0; i < dim; ++i) {
    t.observation.push_back(u(rng) < 0.5);
    t.next_observation.push_back(u(rng) < 0.5);
  }
  t.action = static_cast<Action>(static_cast<int>(u(rng) * 4) % 4);
  t.reward = u(rng) * 10 - 5;
  return t;
}

ControllerConfig small_config(ControllerMode mode) {
  ControllerConfig c;
  c.mode = mode;
  c.hidden_width = 6;
  return c;
}

}  // namespace

TEST(ControllerTest, GlobalNetSharesParameters) {
  Rng rng(3);
  Controller c(small_config(ControllerMode::GlobalNet), 8, 2, rng);
  EXPECT_EQ(c.networks().size(), 1u);
  c.record(0, random_transition(8, rng));
  c.record(1, random_transition(8, rng));
  const QNetwork before = c.network_for(0);
  c.learn(1, rng);
  EXPECT_NE(c.network_for(0), before);
  EXPECT_EQ(&c.network_for(0), &c.network_for(1));
}

TEST(ControllerTest, PerUavNetIsolatesParameters) {
  Rng rng(3);
  Controller c(small_config(ControllerMode::PerUavNet), 8, 2, rng);
  EXPECT_EQ(c.networks().size(), 2u);
  c.record(0, random_transition(8, rng));
  const QNetwork other = c.network_for(1);
  const QNetwork mine = c.network_for(0);
  c.learn(0, rng);
  EXPECT_EQ(c.network_for(1), other);
  EXPECT_NE(c.network_for(0), mine);
}

TEST(ControllerTest, MemoriesStayPerUav) {
  for (ControllerMode mode : {ControllerMode::GlobalNet, ControllerMode::PerUavNet}) {
    Rng rng(5);
    Controller c(small_config(mode), 4, 3, rng);
    for (int i = 0; i < 30; ++i) c.record(i % 3, tagged(i % 3));
    for (int u = 0; u < 3; ++u) {
      EXPECT_EQ(c.memory_for(u).size(), 10u);
      for (const auto& t : c.memory_for(u).entries()) EXPECT_EQ(t.reward, u);
    }
  }
}

TEST(ControllerTest, LearnNeedsMemory) {
  Rng rng(3);
  Controller c(small_config(ControllerMode::GlobalNet), 4, 1, rng);
  EXPECT_THROW(c.learn(0, rng), EmptyMemory);
}

TEST(ControllerTest, SmallMemoryUsesWholeMemoryAsBatch) {
  // With 5 transitions and a batch of 16, one learn call equals a train_step
  // over all 5 (order is irrelevant to the mean loss gradient).
  Rng rng(13);
  ControllerConfig cfg = small_config(ControllerMode::GlobalNet);
  Rng init(1);
  Controller c(cfg, 6, 1, init);
  std::vector<Transition> ts;
  for (int i = 0; i < 5; ++i) {
    ts.push_back(random_transition(6, rng));
    c.record(0, ts.back());
  }
  QNetwork reference = c.network_for(0);
  RmsProp opt(reference.parameter_count(), cfg.optimizer);
  std::vector<TrainingExample> batch;
  for (const auto& t : ts) {
    batch.push_back({t.observation, action_index(t.action),
                     q_target(t.reward, reference.forward(t.next_observation), t.terminal, cfg.gamma)});
  }
  const double expected_loss = train_step(reference, opt, batch);
  const double loss = c.learn(0, rng);
  EXPECT_NEAR(loss, expected_loss, 1e-9);
  for (std::size_t i = 0; i < reference.parameter_count(); ++i) {
    EXPECT_NEAR(c.network_for(0).parameters()[i], reference.parameters()[i], 1e-12);
  }
}

TEST(ControllerTest, RejectsBadGamma) {
  Rng rng(1);
  ControllerConfig cfg;
  cfg.gamma = 1.5;
  EXPECT_THROW(Controller(cfg, 4, 1, rng), RangeError);
}
