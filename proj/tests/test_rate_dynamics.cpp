#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "relaxo/errors.hpp"
#include "relaxo/rate_dynamics.hpp"

using namespace relaxo;
using rates::InitPulse;
using rates::Populations;
using rates::Protocol;
using rates::RateParams;
using rates::ReadoutModel;
using rates::ReadPulse;

namespace {

Eigen::Vector3d to_vector(const Populations& p) { return {p.p_minus, p.p_zero, p.p_plus}; }

// Sorted nonzero eigenvalues of the generator via a direct eigensolve.
std::pair<double, double> nonzero_eigenvalues(const RateParams& rp) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(rates::rate_generator(rp));
  return {solver.eigenvalues()(0), solver.eigenvalues()(1)};
}

}  // namespace

TEST_CASE("rate generator structure") {
  SUBCASE("zero rates give the zero matrix") {
    CHECK(rates::rate_generator({0.0, 0.0}).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("columns sum to zero and uniform is a fixed point") {
    const auto g = rates::rate_generator({35.1, 99.8});
    CHECK(g.colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g * Eigen::Vector3d::Constant(1.0 / 3.0)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("nonzero eigenvalues {-3, -1} for omega=1, gamma=0") {
    const auto [lo, hi] = nonzero_eigenvalues({1.0, 0.0});
    CHECK(lo == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(hi == doctest::Approx(-1.0).epsilon(1e-12));
  }
  SUBCASE("nonzero eigenvalues for the measured rates") {
    const auto [lo, hi] = nonzero_eigenvalues({35.1, 99.8});
    CHECK(lo == doctest::Approx(-234.7).epsilon(1e-12));
    CHECK(hi == doctest::Approx(-105.3).epsilon(1e-12));
  }
}

TEST_CASE("spectral structure over random rate pairs") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> log_rate(std::log(0.1), std::log(1e3));
  for (int trial = 0; trial < 500; ++trial) {
    const RateParams rp{std::exp(log_rate(rng)), std::exp(log_rate(rng))};
    const auto [lo, hi] = nonzero_eigenvalues(rp);
    const double expected_lo = -std::max(3.0 * rp.omega_khz, rp.omega_khz + 2.0 * rp.gamma_khz);
    const double expected_hi = -std::min(3.0 * rp.omega_khz, rp.omega_khz + 2.0 * rp.gamma_khz);
    CHECK(std::abs(lo - expected_lo) <= 1e-9 * std::abs(expected_lo));
    CHECK(std::abs(hi - expected_hi) <= 1e-9 * std::abs(expected_hi));
  }
}

TEST_CASE("analytic evolution") {
  const RateParams rp{35.1, 99.8};
  SUBCASE("tau = 0 is the identity") {
    const Populations p{0.2, 0.5, 0.3};
    const auto evolved = rates::evolve_analytic(p, rp, 0.0);
    CHECK(evolved.p_minus == p.p_minus);
    CHECK(evolved.p_zero == p.p_zero);
    CHECK(evolved.p_plus == p.p_plus);
  }
  SUBCASE("polarized state relaxes as 1/3 + 2/3 exp(-3 omega tau)") {
    for (double tau : {0.5, 2.0, 10.0}) {
      const auto evolved = rates::evolve_analytic({0.0, 1.0, 0.0}, rp, tau);
      CHECK(evolved.p_zero ==
            doctest::Approx(1.0 / 3.0 + 2.0 / 3.0 * std::exp(-3.0 * rp.omega_khz * tau * 1e-3))
                .epsilon(1e-12));
    }
  }
  SUBCASE("population difference decays at omega + 2 gamma") {
    for (double tau : {0.5, 2.0, 10.0}) {
      const auto evolved = rates::evolve_analytic({0.0, 0.0, 1.0}, rp, tau);
      CHECK(evolved.p_plus - evolved.p_minus ==
            doctest::Approx(std::exp(-(rp.omega_khz + 2.0 * rp.gamma_khz) * tau * 1e-3))
                .epsilon(1e-12));
    }
  }
  SUBCASE("negative tau rejected") {
    CHECK_THROWS_AS(rates::evolve_analytic({0.0, 1.0, 0.0}, rp, -1.0), InvalidInput);
  }
}

TEST_CASE("analytic evolution matches the matrix-exponential oracle") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> log_rate(std::log(0.1), std::log(1e3));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const RateParams rp{std::exp(log_rate(rng)), std::exp(log_rate(rng))};
    double a = uniform(rng), b = uniform(rng), c = uniform(rng);
    const double sum = a + b + c;
    const Populations p{a / sum, b / sum, c / sum};
    const double tau = 50.0 * uniform(rng);

    const Eigen::Vector3d expected =
        oracles::expm(rates::rate_generator(rp) * tau * 1e-3) * to_vector(p);
    const Eigen::Vector3d got = to_vector(rates::evolve_analytic(p, rp, tau));
    CHECK((expected - got).cwiseAbs().maxCoeff() < 1e-9);

    // conservation and range
    CHECK(got.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(got.minCoeff() >= -1e-12);
    CHECK(got.maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("numeric integrator") {
  const RateParams rp{35.1, 99.8};
  SUBCASE("tau = 0 is the identity") {
    const auto evolved = rates::evolve_numeric({0.1, 0.6, 0.3}, rp, 0.0, 0.01);
    CHECK(evolved.p_zero == 0.6);
  }
  SUBCASE("uniform state is a fixed point") {
    const Populations uniform{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    const auto evolved = rates::evolve_numeric(uniform, rp, 25.0, 0.01);
    CHECK(std::abs(evolved.p_minus - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(evolved.p_zero - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(evolved.p_plus - 1.0 / 3.0) < 1e-12);
  }
  SUBCASE("agrees with the analytic path") {
    const double tau = 10.0;
    const auto numeric = rates::evolve_numeric({0.0, 1.0, 0.0}, rp, tau, tau / 1000.0);
    const auto analytic = rates::evolve_analytic({0.0, 1.0, 0.0}, rp, tau);
    CHECK(std::abs(numeric.p_zero - analytic.p_zero) < 1e-8);
    CHECK(std::abs(numeric.p_plus - analytic.p_plus) < 1e-8);
  }
  SUBCASE("invalid step rejected") {
    CHECK_THROWS_AS(rates::evolve_numeric({0.0, 1.0, 0.0}, rp, 1.0, 0.0), InvalidInput);
  }
}

TEST_CASE("equilibrium reached at long times") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> log_rate(std::log(0.5), std::log(500.0));
  for (int trial = 0; trial < 50; ++trial) {
    const RateParams rp{std::exp(log_rate(rng)), std::exp(log_rate(rng))};
    const double slowest_khz =
        std::min(3.0 * rp.omega_khz, rp.omega_khz + 2.0 * rp.gamma_khz);
    const double tau = 20.0 * 1e3 / slowest_khz;
    const auto evolved = rates::evolve_analytic({0.0, 1.0, 0.0}, rp, tau);
    CHECK(std::abs(evolved.p_minus - 1.0 / 3.0) < 1e-6);
    CHECK(std::abs(evolved.p_zero - 1.0 / 3.0) < 1e-6);
  }
}

TEST_CASE("protocol simulation") {
  const ReadoutModel readout{0.8, 0.25, 1.0};
  SUBCASE("polarize-only readout at tau = 0") {
    const double s = rates::simulate_protocol({InitPulse::PolarizeOnly, ReadPulse::Direct, ""},
                                              {35.1, 99.8}, readout, 0.0);
    CHECK(s == doctest::Approx(0.25 + 0.8).epsilon(1e-12));
  }
  SUBCASE("F1 and F2 reduce to single exponentials at unit fidelity") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> log_rate(std::log(0.1), std::log(1e3));
    std::uniform_real_distribution<double> tau_dist(0.0, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
      const RateParams rp{std::exp(log_rate(rng)), std::exp(log_rate(rng))};
      const double tau = tau_dist(rng);
      const double f1 = rates::f1_signal(rp, readout, tau);
      const double f2 = rates::f2_signal(rp, readout, tau);
      CHECK(std::abs(f1 - 0.8 * std::exp(-3.0 * rp.omega_khz * tau * 1e-3)) < 1e-10);
      CHECK(std::abs(f2 - 0.8 * std::exp(-(2.0 * rp.gamma_khz + rp.omega_khz) * tau * 1e-3)) <
            1e-10);
    }
  }
  SUBCASE("tau = 0 gives the bare amplitude") {
    CHECK(rates::f1_signal({35.1, 99.8}, readout, 0.0) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(rates::f2_signal({35.1, 99.8}, readout, 0.0) == doctest::Approx(0.8).epsilon(1e-12));
  }
  SUBCASE("F2 value at the measured rates") {
    const double f2 = rates::f2_signal({35.1, 99.8}, {1.0, 0.0, 1.0}, 5.0);
    CHECK(f2 == doctest::Approx(std::exp(-234.7 * 5.0 * 1e-3)).epsilon(1e-12));
    CHECK(f2 == doctest::Approx(0.3093).epsilon(1e-3));
  }
  SUBCASE("omega = 0 leaves F2 a pure DQ decay") {
    const double f2 = rates::f2_signal({0.0, 50.0}, {1.0, 0.0, 1.0}, 4.0);
    CHECK(f2 == doctest::Approx(std::exp(-2.0 * 50.0 * 4.0 * 1e-3)).epsilon(1e-12));
  }
}

TEST_CASE("imperfect pulses stay inside the three-mode dictionary") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> fidelity_dist(0.05, 1.0);
  std::uniform_real_distribution<double> log_rate(std::log(1.0), std::log(300.0));

  for (int trial = 0; trial < 20; ++trial) {
    const RateParams rp{std::exp(log_rate(rng)), std::exp(log_rate(rng))};
    const ReadoutModel readout{1.0, 0.3, fidelity_dist(rng)};
    const Protocol protocol{InitPulse::PiPlus, ReadPulse::PiMinus, ""};

    const int n = 40;
    Eigen::MatrixXd basis(n, 3);
    Eigen::VectorXd samples(n);
    for (int i = 0; i < n; ++i) {
      const double tau = i * 0.8;
      basis(i, 0) = 1.0;
      basis(i, 1) = std::exp(-3.0 * rp.omega_khz * tau * 1e-3);
      basis(i, 2) = std::exp(-(rp.omega_khz + 2.0 * rp.gamma_khz) * tau * 1e-3);
      samples(i) = rates::simulate_protocol(protocol, rp, readout, tau);
    }
    CHECK(oracles::dictionary_residual(basis, samples) < 1e-8);
  }
}

TEST_CASE("relaxation times") {
  SUBCASE("room-temperature rates") {
    CHECK(rates::t1_full_us({40.73, 88.26}) == doctest::Approx(1e3 / 210.45).epsilon(1e-12));
    CHECK(rates::t1_full_us({40.73, 88.26}) == doctest::Approx(4.752).epsilon(1e-3));
  }
  SUBCASE("453 K rates") {
    CHECK(rates::t1_full_us({112.54, 255.6}) == doctest::Approx(1.686).epsilon(1e-3));
  }
  SUBCASE("gamma = 0 collapses the two definitions") {
    CHECK(rates::t1_full_us({40.0, 0.0}) == rates::t1_conventional_us({40.0, 0.0}));
  }
  SUBCASE("full T1 never exceeds the conventional one and shrinks with gamma") {
    double previous = 1e9;
    for (double gamma : {0.0, 10.0, 50.0, 200.0}) {
      const double t1 = rates::t1_full_us({40.0, gamma});
      CHECK(t1 <= rates::t1_conventional_us({40.0, gamma}));
      CHECK(t1 < previous);
      previous = t1;
    }
  }
  SUBCASE("undefined rates rejected") {
    CHECK_THROWS_AS(rates::t1_full_us({0.0, 0.0}), UndefinedRate);
    CHECK_THROWS_AS(rates::t1_conventional_us({0.0, 5.0}), UndefinedRate);
  }
}
