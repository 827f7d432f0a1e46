#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "supercrit/error.hpp"
#include "supercrit/sequences.hpp"
#include "supercrit/shell_profile.hpp"

using namespace supercrit;

namespace {

ShellProfile delta_profile() {
  ShellProfile p;
  p.set_magnitude(0, 1.0);
  return p;
}

// Brute-force M: smallest M >= 1 with the tail sum below epsilon^2 / 2.
std::int64_t oracle_cutoff(const ShellProfile& p, double epsilon) {
  for (std::int64_t m = 1;; ++m) {
    double tail = 0.0;
    for (const auto& [j, w] : p.critical_amplitudes())
      if (std::abs(j) >= m) tail += w * w;
    if (tail <= epsilon * epsilon / 2.0) return m;
  }
}

}  // namespace

TEST_CASE("entries and critical amplitudes") {
  ShellProfile p;
  CHECK(p.empty());
  p.set_magnitude(4, 0.5);
  CHECK(p.critical_amplitude(4) == doctest::Approx(2.0));
  CHECK(p.magnitude(4) == doctest::Approx(0.5));
  p.set_magnitude(-2, 3.0);
  CHECK(p.critical_amplitude(-2) == doctest::Approx(1.5));
  CHECK(p.size() == 2);
  p.set_magnitude(4, 0.0);
  CHECK(p.size() == 1);
  CHECK_THROWS_AS(p.set_magnitude(1, -1.0), InvalidInput);
  CHECK_THROWS_AS(p.set_magnitude(1, std::numeric_limits<double>::infinity()), InvalidInput);
  CHECK_THROWS_AS(p.set_critical_amplitude(1, std::nan("")), InvalidInput);
}

TEST_CASE("norms on hand-computed profiles") {
  ShellProfile p;
  p.set_magnitude(2, 1.0);  // w = 2
  p.set_magnitude(4, 1.0);  // w = 4, a(4) = 2
  CHECK(x1_norm(p) == doctest::Approx(std::sqrt(4.0 + 4.0)));
  CHECK(shell_sobolev_norm(p, 0.5) == doctest::Approx(std::sqrt(4.0 + 16.0)));
  CHECK(shell_sobolev_norm(p, 0.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(plain_l2_norm(p) == doctest::Approx(std::sqrt(2.0)));
  CHECK(x1_norm(ShellProfile{}) == 0.0);
}

TEST_CASE("critical Sobolev norm is invariant under every dyadic rescaling") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const ShellProfile p = random_decaying_profile(rng);
    const double base = shell_sobolev_norm(p, 0.5);
    for (std::int64_t shift : {std::int64_t{1}, std::int64_t{-7}, std::int64_t{1} << 16, std::int64_t{1} << 32}) {
      CHECK(shell_sobolev_norm(scale_profile(p, {shift}), 0.5) == base);
    }
  }
}

TEST_CASE("scaling overflow is rejected") {
  ShellProfile p;
  p.set_critical_amplitude(std::numeric_limits<std::int64_t>::max() - 1, 1.0);
  CHECK_THROWS_AS(scale_profile(p, {2}), InvalidInput);
  CHECK_THROWS_AS(ScalingParams::tower(6), InvalidInput);
  CHECK(ScalingParams::tower(5).shift == (std::int64_t{1} << 32));
  CHECK(ScalingParams::tower(0).shift == 2);
}

TEST_CASE("tower X1 norm: closed form agrees with the materialized shift") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const ShellProfile p = random_decaying_profile(rng);
    for (int level = 0; level <= kMaxMaterializedLevel; ++level) {
      CHECK(tower_x1_norm(p, level) ==
            doctest::Approx(x1_norm(scale_profile(p, ScalingParams::tower(level)))).epsilon(1e-14));
    }
  }
  const ShellProfile d = delta_profile();
  for (int level = 1; level <= 40; ++level) CHECK(tower_x1_norm(d, level) == std::ldexp(1.0, -level));
  CHECK_THROWS_AS(tower_x1_norm(d, 63), InvalidInput);
}

TEST_CASE("tail cutoff against brute force") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const ShellProfile p = random_decaying_profile(rng);
    for (double eps : {0.5, 0.1, 0.01, 1e-4}) CHECK(find_tail_cutoff(p, eps) == oracle_cutoff(p, eps));
  }
  CHECK(find_tail_cutoff(delta_profile(), 0.1) == 1);
  ShellProfile wide;
  wide.set_critical_amplitude(-9, 1.0);
  CHECK(find_tail_cutoff(wide, 0.1) == 10);
  CHECK_THROWS_AS(find_tail_cutoff(wide, 0.0), InvalidInput);
}

TEST_CASE("l0 threshold formula") {
  CHECK(l0_threshold(1, 1.0, 0.1) == 5);
  CHECK(l0_threshold(9, 1.0, 0.1) == 10);
  // M = 4: log2 M = 2, ceil(log2(2 * 3 / 0.01)) + 1 = 11
  CHECK(l0_threshold(4, 3.0, 0.01) == 11);
  CHECK(l0_threshold(3, 0.0, 0.1) == 4);
}

TEST_CASE("delta profile certificate") {
  const SmallnessCertificate c = verify_scaling_smallness(delta_profile(), 0.1);
  CHECK(c.pass);
  CHECK(c.tail_cutoff == 1);
  CHECK(c.l0 == 5);
  REQUIRE(c.checked_levels.size() == 4);
  CHECK(c.checked_levels[0].level == 5);
  CHECK(c.checked_levels[0].materialized);
  CHECK(c.checked_levels[0].x1_after_scaling == 1.0 / 32.0);
  CHECK_FALSE(c.checked_levels[1].materialized);
  CHECK(c.checked_levels[3].x1_after_scaling == 1.0 / 256.0);
}

TEST_CASE("empty profile passes vacuously") {
  const SmallnessCertificate c = verify_scaling_smallness(ShellProfile{}, 0.1);
  CHECK(c.pass);
  for (const auto& level : c.checked_levels) CHECK(level.x1_after_scaling == 0.0);
}

TEST_CASE("random profiles certify at every checked level") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const ShellProfile p = random_decaying_profile(rng);
    for (double eps : {0.1, 0.01}) {
      const SmallnessCertificate c = verify_scaling_smallness(p, eps);
      CHECK(c.pass);
      CHECK(c.l0 > c.tail_cutoff);
      for (const auto& level : c.checked_levels) CHECK(level.x1_after_scaling <= eps);
    }
  }
}

TEST_CASE("uniform certificate takes the worst M and X1") {
  std::mt19937_64 rng(9);
  std::vector<ShellProfile> ps;
  std::int64_t m = 1;
  double x1 = 0.0;
  for (int i = 0; i < 10; ++i) {
    ps.push_back(random_decaying_profile(rng));
    m = std::max(m, find_tail_cutoff(ps.back(), 0.1));
    x1 = std::max(x1, x1_norm(ps.back()));
  }
  const SmallnessCertificate c = verify_scaling_smallness_uniform(ps, 0.1);
  CHECK(c.tail_cutoff == m);
  CHECK(c.x1 == x1);
  CHECK(c.l0 == l0_threshold(m, x1, 0.1));
  CHECK(c.pass);
  CHECK_THROWS_AS(verify_scaling_smallness_uniform({}, 0.1), InvalidInput);
  CHECK_THROWS_AS(verify_scaling_smallness(ps[0], -1.0), InvalidInput);
}

TEST_CASE("profile text format") {
  std::istringstream in("# comment\n\n0\t1\n  -3   0.25\n5\t0\n");
  const ShellProfile p = read_profile(in);
  CHECK(p.size() == 2);
  CHECK(p.magnitude(0) == 1.0);
  CHECK(p.magnitude(-3) == doctest::Approx(0.25).epsilon(1e-15));

  std::ostringstream out;
  write_profile(out, p);
  std::istringstream back(out.str());
  const ShellProfile q = read_profile(back);
  REQUIRE(q.size() == p.size());
  for (const auto& [j, w] : p.critical_amplitudes()) CHECK(q.critical_amplitude(j) == doctest::Approx(w).epsilon(1e-15));

  auto line_of = [](const std::string& text) {
    std::istringstream s(text);
    try {
      read_profile(s);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0L;
  };
  CHECK(line_of("0\t1\n1\tabc\n") == 2);
  CHECK(line_of("# x\n2.5\t1\n") == 2);
  CHECK(line_of("7\n") == 1);
  CHECK(line_of("1\t-2\n") == 1);
  CHECK(line_of("1\t2\n1\t3\n") == 2);
  CHECK(line_of("1\t2 3\n") == 1);
  CHECK_THROWS_AS(read_profile_file("/nonexistent/profile.txt"), ParseError);
}

TEST_CASE("random profiles are seeded and supported in the range") {
  std::mt19937_64 a(42), b(42);
  for (int i = 0; i < 5; ++i) {
    const ShellProfile p = random_decaying_profile(a);
    CHECK(p == random_decaying_profile(b));
    for (const auto& [j, w] : p.critical_amplitudes()) {
      CHECK(j >= -30);
      CHECK(j <= 30);
      CHECK(w < std::ldexp(1.0, -static_cast<int>(std::abs(j))));
    }
  }
}
