#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wbc/core_model.hpp"
#include "wbc/rng.hpp"

using namespace wbc;

namespace {

NetworkParams default_net() { return NetworkParams{}; }
ChannelParams default_channel() { return ChannelParams{}; }
EconParams default_econ() { return EconParams{}; }

}  // namespace

TEST_CASE("energy per block matches hand evaluations") {
  NetworkParams net = default_net();
  CHECK(energy_per_block({11, 3, 5}, net) == doctest::Approx(6607.5).epsilon(1e-12));
  CHECK(energy_per_block({13, 20, 20}, net) == doctest::Approx(8000.0).epsilon(1e-12));
}

TEST_CASE("energy per block is additively separable in connectivity") {
  NetworkParams net = default_net();
  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    const double h = rng.uniform(1.0, 20.0);
    const double p = rng.uniform(0.5, 30.0);
    const double d1 = energy_per_block({h, 2, p}, net) - energy_per_block({h, 1, p}, net);
    const double d2 = energy_per_block({h, 7, p}, net) - energy_per_block({h, 6, p}, net);
    const double slope = net.block_size / net.rate * p;
    CHECK(d1 == doctest::Approx(slope).epsilon(1e-12));
    CHECK(d2 == doctest::Approx(slope).epsilon(1e-12));
  }
}

TEST_CASE("energy per block rejects invalid capabilities") {
  NetworkParams net = default_net();
  CHECK_THROWS_AS(validate(Capability{0.0, 3, 5}, net), std::invalid_argument);
  CHECK_THROWS_AS(validate(Capability{11, 0.0, 5}, net), std::invalid_argument);
  CHECK_THROWS_AS(validate(Capability{11, 3, 0.0}, net), std::invalid_argument);
  CHECK_THROWS_AS(validate(Capability{11, 1000, 5}, net), std::invalid_argument);
}

TEST_CASE("hash race is exactly fair for the average device") {
  for (int z : {2, 3, 10, 100, 997}) {
    NetworkParams net = default_net();
    net.z = z;
    CHECK(hash_confirm_prob(net.mean_hash, net) == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("hash race hand evaluations") {
  NetworkParams net = default_net();
  CHECK(hash_confirm_prob(15.0, net) == doctest::Approx(0.502).epsilon(1e-12));
  net.z = 2;
  net.mean_hash = 12.5;
  CHECK(hash_confirm_prob(10.0, net) == doctest::Approx(0.4).epsilon(1e-12));
  net.z = 1;
  CHECK_THROWS_AS(hash_confirm_prob(10.0, net), std::invalid_argument);
}

TEST_CASE("outage probability matches hand evaluations and limits") {
  ChannelParams ch = default_channel();
  CHECK(outage_prob(5.0, ch, 2000.0) == doctest::Approx(5.519362678973921e-07).epsilon(1e-9));
  CHECK(outage_prob(20.0, ch, 2000.0) == doctest::Approx(1.3798409553376133e-07).epsilon(1e-9));
  CHECK(outage_prob(1e15, ch, 2000.0) < 1e-15);
  CHECK(outage_prob(20.0, ch, 2000.0) < outage_prob(5.0, ch, 2000.0));
}

TEST_CASE("outage probability is monotone in power and rate") {
  ChannelParams ch = default_channel();
  Rng rng(17);
  for (int k = 0; k < 200; ++k) {
    const double p = rng.uniform(0.1, 50.0);
    const double r = rng.uniform(100.0, 1e6);
    CHECK(outage_prob(p * 1.5, ch, r) < outage_prob(p, ch, r));
    CHECK(outage_prob(p, ch, r * 1.5) > outage_prob(p, ch, r));
    const double v = outage_prob(p, ch, r);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("outage probability agrees with Monte Carlo fade sampling") {
  ChannelParams ch = default_channel();
  // A regime where outages are actually observable: rate equal to bandwidth.
  const double rate = ch.bandwidth;
  const double p = 4e-3;
  const double closed = outage_prob(p, ch, rate);
  const double threshold =
      (std::pow(2.0, rate / ch.bandwidth) - 1.0) / (p / ch.noise_power);
  const long n = 1'000'000;
  Rng rng(2024);
  long hits = 0;
  for (long i = 0; i < n; ++i)
    if (rng.exponential(ch.fading_scale) < threshold) ++hits;
  const double mc = static_cast<double>(hits) / n;
  const double se = std::sqrt(closed * (1.0 - closed) / n);
  CHECK(std::abs(mc - closed) <= 3.0 * se);

  // Default operating point: outages are ~5.5e-7, the Monte Carlo bound still applies.
  const double closed_default = outage_prob(5.0, ch, 2000.0);
  const double thr_default =
      (std::pow(2.0, 2000.0 / ch.bandwidth) - 1.0) / (5.0 / ch.noise_power);
  hits = 0;
  for (long i = 0; i < n; ++i)
    if (rng.exponential(ch.fading_scale) < thr_default) ++hits;
  const double se_default =
      std::sqrt(closed_default * (1.0 - closed_default) / n) + 1e-12;
  CHECK(std::abs(static_cast<double>(hits) / n - closed_default) <=
        3.0 * se_default + 3.0 / n);
}

TEST_CASE("connectivity confirmation matches the fitted model") {
  FitParams fit;  // shipped sign-corrected defaults
  CHECK(connectivity_confirm_prob(1.0, fit) ==
        doctest::Approx(0.9758732934052535).epsilon(1e-10));
  CHECK(connectivity_confirm_prob(0.1, fit) ==
        doctest::Approx(0.9077450441703461).epsilon(1e-10));
}

TEST_CASE("connectivity confirmation edge cases") {
  FitParams fit;
  fit.beta2 = 0.0;
  fit.beta1 = 0.42;
  for (double c : {0.01, 0.3, 1.0})
    CHECK(connectivity_confirm_prob(c, fit) == doctest::Approx(0.42));

  FitParams big;
  big.beta1 = 1.5;  // raw model above 1, must clamp
  big.beta2 = 0.0;
  CHECK(connectivity_confirm_prob(0.5, big) == 1.0);
  FitParams low;
  low.beta1 = -0.5;
  low.beta2 = 0.0;
  CHECK(connectivity_confirm_prob(0.5, low) == 0.0);

  FitParams bad;
  bad.beta3 = 0.1;
  CHECK_THROWS_AS(connectivity_confirm_prob(-0.2, bad), std::invalid_argument);
}

TEST_CASE("total confirmation probability composes the three channels") {
  // No forking, perfect connectivity model, effectively no outage.
  NetworkParams net = default_net();
  net.fork_prob = 0.0;
  FitParams one;
  one.beta1 = 1.0;
  one.beta2 = 0.0;
  ChannelParams ch = default_channel();
  Capability strong{11.0, 3.0, 1e12};
  CHECK(total_confirm_prob(strong, net, ch, one) == doctest::Approx(1.0).epsilon(1e-9));

  // Average hash power, even fork odds: bracket is exactly 0.75.
  NetworkParams net2 = default_net();
  FitParams fit2;
  fit2.beta1 = 0.9;
  fit2.beta2 = 0.0;
  Capability avg{12.5, 3.0, 5.0};
  const double pout = outage_prob(5.0, ch, net2.rate);
  CHECK(total_confirm_prob(avg, net2, ch, fit2) ==
        doctest::Approx(0.75 * 0.9 * (1.0 - pout)).epsilon(1e-12));

  // Fully hand-computed composition: P_F=1, P_h=0.4, P_c=0.9, P_out=0.1.
  NetworkParams net3 = default_net();
  net3.z = 2;
  net3.fork_prob = 1.0;
  FitParams fit3;
  fit3.beta1 = 0.9;
  fit3.beta2 = 0.0;
  const double delta = net3.rate / ch.bandwidth;
  const double p_for_01 =
      ch.noise_power * (std::pow(2.0, delta) - 1.0) / std::log(10.0 / 9.0);
  Capability cap3{10.0, 1.0, p_for_01};
  CHECK(total_confirm_prob(cap3, net3, ch, fit3) == doctest::Approx(0.324).epsilon(1e-9));
}

TEST_CASE("total confirmation probability stays in [0,1] on the valid domain") {
  Rng rng(23);
  ChannelParams ch = default_channel();
  for (int k = 0; k < 500; ++k) {
    NetworkParams net = default_net();
    net.z = 2 + static_cast<int>(rng.below(300));
    net.fork_prob = rng.uniform01();
    net.mean_hash = rng.uniform(1.0, 30.0);
    FitParams fit;
    fit.beta1 = rng.uniform(0.5, 1.2);
    fit.beta2 = rng.uniform(-0.1, 0.1);
    fit.beta3 = rng.uniform(1e-4, 0.5);
    Capability cap;
    // Stay below the hash-power bound that keeps the race probability < 1.
    cap.hash_power = rng.uniform(0.1, net.mean_hash * (0.5 * net.z + 1.0) * 0.99);
    cap.connectivity = 1.0 + rng.uniform01() * (net.z - 2);
    cap.tx_power = rng.uniform(0.01, 100.0);
    const double g = total_confirm_prob(cap, net, ch, fit);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0);
  }
}

TEST_CASE("energy cost coefficient") {
  NetworkParams net = default_net();
  EconParams econ = default_econ();
  CHECK(energy_cost_coeff({11, 3, 5}, net, econ) == doctest::Approx(0.66075).epsilon(1e-12));
  CHECK(energy_cost_coeff({13, 20, 20}, net, econ) == doctest::Approx(0.8).epsilon(1e-12));
  EconParams bad = econ;
  bad.gamma = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("device utility closed form") {
  EconParams econ = default_econ();
  // IR-binding salary gives exactly zero.
  const double lam = 0.7, b = 42.0;
  const double s = lam * b * b / (econ.theta - 1.0);
  CHECK(device_utility(lam, b, s, econ) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(device_utility(2.0, 3.0, 10.0, econ) == doctest::Approx(13.0).epsilon(1e-12));
}

TEST_CASE("device utility equals the brute-force maximum of the raw form") {
  // Raw utility: s + g*b*e - f*e^2/2 - theta*s, maximized over the effort e.
  EconParams econ = default_econ();
  const double g = 0.75, b = 3.0, s = 10.0;
  const double f = g * g / (2.0 * 2.0);  // lambda = 2
  const double lam = type_lambda(g, f);
  double best = -1e18;
  for (double e = 0.0; e <= 40.0; e += 0.001) {
    best = std::max(best, s + g * b * e - 0.5 * f * e * e - econ.theta * s);
  }
  CHECK(best == doctest::Approx(device_utility(lam, b, s, econ)).epsilon(1e-6));

  // The maximizing effort agrees with the closed form within grid resolution.
  const double estar = optimal_block_count(g, f, b);
  double arg_best = 0.0;
  best = -1e18;
  for (double e = 0.0; e <= 40.0; e += 0.001) {
    const double u = s + g * b * e - 0.5 * f * e * e - econ.theta * s;
    if (u > best) {
      best = u;
      arg_best = e;
    }
  }
  CHECK(std::abs(arg_best - estar) <= 0.001 + 1e-12);
}

TEST_CASE("optimal block count") {
  CHECK(optimal_block_count(0.9, 0.7, 0.0) == 0.0);
  CHECK(optimal_block_count(0.75, 0.66075, 100.0) ==
        doctest::Approx(113.50737797956869).epsilon(1e-12));
  CHECK_THROWS_AS(optimal_block_count(0.9, 0.7, -1.0), std::invalid_argument);
}

TEST_CASE("type lambda") {
  CHECK(type_lambda(0.75, 0.66075) == doctest::Approx(0.42565266742338254).epsilon(1e-12));
  CHECK(type_lambda(0.0, 0.5) == 0.0);

  NetworkParams net = default_net();
  ChannelParams ch = default_channel();
  EconParams econ = default_econ();
  FitParams fit;
  const Capability cap{12.0, 10.0, 10.0};
  const double g = total_confirm_prob(cap, net, ch, fit);
  const double f = energy_cost_coeff(cap, net, econ);
  CHECK(type_lambda(cap, net, ch, fit, econ) == doctest::Approx(g * g / (2 * f)));
}

TEST_CASE("type lambda is invariant under g -> k*g, f -> k^2*f") {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const double g = rng.uniform(0.05, 1.0);
    const double f = rng.uniform(0.1, 2.0);
    const double k = rng.uniform(0.1, 5.0);
    CHECK(type_lambda(k * g, k * k * f) ==
          doctest::Approx(type_lambda(g, f)).epsilon(1e-12));
  }
}

TEST_CASE("two capabilities with equal g^2/(2f) collapse to the same lambda") {
  NetworkParams net = default_net();
  ChannelParams ch = default_channel();
  EconParams econ = default_econ();
  FitParams fit;
  const Capability a{11.0, 10.0, 10.0};
  const double g = total_confirm_prob(a, net, ch, fit);
  const double f = energy_cost_coeff(a, net, econ);
  // A synthetic pair with scaled g and f maps to the identical type.
  CHECK(type_lambda(0.5 * g, 0.25 * f) == doctest::Approx(type_lambda(g, f)).epsilon(1e-12));
}

TEST_CASE("parameter validation names the offending field") {
  EconParams econ;
  econ.theta = 1.0;
  try {
    validate(econ);
    FAIL("theta = 1 must be rejected");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("theta") != std::string::npos);
  }
}
