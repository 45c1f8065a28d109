#include <cmath>
#include <random>

#include "doctest.h"
#include "partition_gen.hpp"
#include "ptc/partition.hpp"

using namespace ptc;

TEST_CASE("partition examples") {
  NestedPartition halves{{{{0, 0.5L}, {0.5L, 0.5L}}}, 0};
  CHECK(validate_partition(halves).ok());

  NestedPartition crossing{{{{0, 0.25L}, {0.5L, 0.25L}}, {{0.25L, 0.25L}, {0.75L, 0.25L}}}, 0};
  CHECK(validate_partition(crossing).violation == PartitionViolation::crossing);

  NestedPartition unequal{{{{0, 0.3L}, {0.3L, 0.2L}}, {{0.5L, 0.5L}, {0.5L, 0.5L}}}, 0};
  CHECK(validate_partition(unequal).violation == PartitionViolation::unequal_lengths);

  NestedPartition gap{{{{0, 0.4L}, {0.5L, 0.4L}}}, 0};
  auto c = validate_partition(gap);
  CHECK(c.violation == PartitionViolation::not_tiling);
  CHECK(c.detail.find("gap") != std::string::npos);

  NestedPartition four{{{{0.125L, 0.25L}, {0.375L, 0.25L}}, {{0.625L, 0.25L}, {0.875L, 0.25L}}}, 0};
  CHECK(validate_partition(four).ok());
  four.marked_pair = 5;
  CHECK(validate_partition(four).violation == PartitionViolation::no_adjacent_pair);
}

TEST_CASE("partitions from PT-graphs") {
  PTGraph edge{{0, 1}, {{0, 1, 0.5L}}, 0};
  auto p = partition_from_graph(edge);
  REQUIRE(p.pairs.size() == 1);
  CHECK(p.pairs[0].first.length == doctest::Approx(0.5));
  CHECK(p.pairs[0].second.length == doctest::Approx(0.5));
  CHECK(validate_partition(p).ok());

  const real l = 1.0L / 6;
  PTGraph tripod{{0, 1, std::polar<real>(1, 2 * pi / 3), std::polar<real>(1, -2 * pi / 3)},
                 {{0, 1, l}, {0, 2, l}, {0, 3, l}},
                 1};
  auto t = partition_from_graph(tripod);
  REQUIRE(t.pairs.size() == 3);
  CHECK(validate_partition(t).ok());
  for (auto& pr : t.pairs) {
    CHECK(pr.first.length == doctest::Approx(1.0 / 6));
    // every leg is a leaf edge, so each pair is adjacent (cyclically)
    const real gap1 = std::abs(pr.first.end() - pr.second.start);
    const real gap2 = std::abs(std::fmod(pr.second.end(), 1.0L) - pr.first.start);
    CHECK(std::min(gap1, gap2) < 1e-15L);
  }

  PTGraph path{{0, 1, 2}, {{0, 1, 0.25L}, {1, 2, 0.25L}}, 0};
  CHECK_THROWS_AS(partition_from_graph(path), std::invalid_argument);
  PTGraph short_tree{{0, 1}, {{0, 1, 0.4L}}, 0};
  CHECK_THROWS_AS(partition_from_graph(short_tree), std::invalid_argument);
}

TEST_CASE("randomized laminar partitions and violations") {
  std::mt19937_64 rng(20240611);
  for (int i = 0; i < 200; ++i) {
    const auto s = gen::laminar(rng);
    const auto c = validate_partition(s.partition);
    CHECK_MESSAGE(c.ok(), c.detail);
  }
  for (int i = 0; i < 200; ++i) {
    const auto s = gen::violation(rng, i % 3);
    CHECK(validate_partition(s.partition).violation == s.expected);
  }
  for (int i = 0; i < 200; ++i) {
    const auto g = gen::random_graph(rng);
    const auto p = partition_from_graph(g);
    CHECK(p.pairs.size() == g.edges.size());
    const auto c = validate_partition(p);
    CHECK_MESSAGE(c.ok(), c.detail);
  }
}
