#include <cmath>
#include <set>
#include <vector>

#include "confheat/parallel.hpp"
#include "confheat/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace confheat;

TEST_CASE("philox known-answer vectors") {
  using A = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(7, 1, 2, StreamTag::kDiffuse), b(7, 1, 2, StreamTag::kDiffuse), c(7, 1, 3, StreamTag::kDiffuse),
      d(7, 1, 2, StreamTag::kPath);
  std::vector<std::uint32_t> va, vb, vc, vd;
  for (int i = 0; i < 64; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
    vd.push_back(d());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
}

TEST_CASE("seek restarts at a block") {
  RandomStream a(3, 0, 0, StreamTag::kAuxiliary);
  std::vector<std::uint32_t> first;
  for (int i = 0; i < 8; ++i) first.push_back(a());
  a.seek(0);
  for (int i = 0; i < 8; ++i) CHECK(a() == first[static_cast<std::size_t>(i)]);
}

TEST_CASE("uniform lies in the open unit interval with the right moments") {
  RandomStream rng(11, 0, 0, StreamTag::kAuxiliary);
  std::vector<double> v(200000);
  for (double& x : v) {
    x = rng.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
  }
  const auto m = oracle::mean_se(v);
  CHECK(oracle::within(m.mean, m.se, 0.5));
}

TEST_CASE("normal moments") {
  RandomStream rng(12, 0, 0, StreamTag::kAuxiliary);
  std::vector<double> v(200000), sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = rng.normal();
    sq[i] = v[i] * v[i];
  }
  const auto m = oracle::mean_se(v);
  const auto s = oracle::mean_se(sq);
  CHECK(oracle::within(m.mean, m.se, 0.0));
  CHECK(oracle::within(s.mean, s.se, 1.0));
}

TEST_CASE("poisson mean and variance, small and chunked means") {
  for (double mean : {0.3, 4.0, 75.0}) {
    RandomStream rng(13, 0, 0, StreamTag::kPoisson);
    std::vector<double> v(100000), dev(v.size());
    for (double& x : v) x = static_cast<double>(rng.poisson(mean));
    for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - mean) * (v[i] - mean);
    const auto m = oracle::mean_se(v);
    const auto var = oracle::mean_se(dev);
    CHECK(oracle::within(m.mean, m.se, mean));
    CHECK(oracle::within(var.mean, var.se, mean));
  }
  RandomStream rng(1, 0, 0, StreamTag::kPoisson);
  CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("derived seeds differ from the parent and each other") {
  std::set<std::uint64_t> seen{5};
  for (std::uint32_t k = 0; k < 100; ++k) CHECK(seen.insert(derive_seed(5, k)).second);
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}

TEST_CASE("parallel_for covers every index once and rethrows the lowest failing index") {
  for (unsigned threads : {1u, 3u, 8u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 37 || i == 90) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "37");
  }
}
