#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rssloc/bench.hpp"
#include "rssloc/error.hpp"
#include "rssloc/model.hpp"

namespace rssloc {
namespace {

TEST(EquivalentMeasurement, ReadingAtP0IsZero) {
  EXPECT_DOUBLE_EQ(equivalent_measurement(10.0 * std::log10(3.5), 3.5, 2.7), 0.0);
}

TEST(EquivalentMeasurement, LogArithmetic) {
  EXPECT_DOUBLE_EQ(equivalent_measurement(-40.0, 1.0, 2.0), 2.0);
}

TEST(EquivalentMeasurement, NoiseFreeReadingGivesLogDistance) {
  // sensor (0,20), source (70,30): d = sqrt(5000)
  const double d = std::sqrt(5000.0);
  EXPECT_NEAR(equivalent_measurement(noise_free_db(d, 1.0, 2.0), 1.0, 2.0), 1.8494850021680094, 1e-14);
}

TEST(EquivalentMeasurement, RejectsNonFiniteAndNonPositive) {
  EXPECT_THROW(equivalent_measurement(NAN, 1.0, 2.0), Error);
  EXPECT_THROW(equivalent_measurement(INFINITY, 1.0, 2.0), Error);
  EXPECT_THROW(equivalent_measurement(-40.0, 0.0, 2.0), Error);
  EXPECT_THROW(equivalent_measurement(-40.0, 1.0, -1.0), Error);
}

TEST(EquivalentMeasurement, RoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.01, 1e4), p0(1e-6, 1e6), alpha(0.5, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double d = dist(rng), p = p0(rng), a = alpha(rng);
    const double y = equivalent_measurement(noise_free_db(d, p, a), p, a);
    EXPECT_NEAR(y, std::log10(d), 1e-12 * std::max(1.0, std::fabs(std::log10(d)))) << d << ' ' << p << ' ' << a;
  }
}

TEST(LognormalBias, ZeroNoiseIsOne) {
  EXPECT_EQ(lognormal_bias(0.0, 2.0), 1.0);
  EXPECT_EQ(lognormal_bias_variance(0.0, 2.0), 0.0);
}

TEST(LognormalBias, FrozenValues) {
  // exp((ln 10)^2 sigma^2 / (50 alpha^2)), evaluated at 30 digits offline
  EXPECT_NEAR(lognormal_bias(2.0, 2.0), 1.11186408452275873, 1e-14);
  EXPECT_NEAR(lognormal_bias_variance(2.0, 2.0), 0.29205190332821578, 1e-13);
  EXPECT_NEAR(lognormal_bias(1.0, 2.0), 1.02686399272195957, 1e-14);
  EXPECT_NEAR(lognormal_bias(4.0, 3.0), 1.20745149119834217, 1e-14);
}

TEST(LognormalBias, MonotoneAndAtLeastOne) {
  double prev = 1.0;
  for (double s = 0.1; s < 8.0; s += 0.1) {
    const double b = lognormal_bias(s, 2.0);
    EXPECT_GT(b, prev);
    prev = b;
  }
  EXPECT_THROW(lognormal_bias(-1.0, 2.0), Error);
  EXPECT_THROW(lognormal_bias(1.0, 0.0), Error);
}

TEST(LognormalBias, MonteCarloMoments) {
  const double sigma = 2.0, alpha = 2.0;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> eps(0.0, sigma);
  const int draws = 1'000'000;
  long double sum = 0, sq = 0;
  for (int i = 0; i < draws; ++i) {
    const double v = std::pow(10.0, 2.0 * (-eps(rng) / (10.0 * alpha)));
    sum += v;
    sq += static_cast<long double>(v) * v;
  }
  const double mean = static_cast<double>(sum / draws);
  const double var = static_cast<double>(sq / draws - (sum / draws) * (sum / draws));
  EXPECT_NEAR(mean / lognormal_bias(sigma, alpha), 1.0, 0.005);
  EXPECT_NEAR(var / lognormal_bias_variance(sigma, alpha), 1.0, 0.02);
}

TEST(NoiseModel, DerivedQuantities) {
  const NoiseModel nm{2.0, 2.0};
  EXPECT_DOUBLE_EQ(nm.omega_std(), 0.1);
  EXPECT_DOUBLE_EQ(nm.bias(), lognormal_bias(2.0, 2.0));
  const double b = nm.bias();
  EXPECT_DOUBLE_EQ(nm.bias_variance(), b * b * (b * b - 1.0));
}

TEST(Scenario, ValidationRejectsBadInput) {
  Scenario s = make_scenario("2d-fixed");
  EXPECT_NO_THROW(s.validate());

  Scenario on_source = s;
  on_source.sensors.row(3) = on_source.source.transpose();
  try {
    on_source.validate();
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateGeometry);
  }

  Scenario near = s;
  near.sensors.row(0) = (near.source + Eigen::Vector2d(1e-10, 0)).transpose();
  EXPECT_THROW(near.validate(), Error);

  Scenario empty = s;
  empty.sensors.resize(0, 2);
  EXPECT_THROW(empty.validate(), Error);

  Scenario nonfinite = s;
  nonfinite.sensors(0, 0) = NAN;
  EXPECT_THROW(nonfinite.validate(), Error);

  Scenario bad_rounds = s;
  bad_rounds.rounds = 0;
  EXPECT_THROW(bad_rounds.validate(), Error);
}

TEST(GenerateMeasurements, ZeroNoiseIsExactLogDistance) {
  Scenario s = make_scenario("3d-fixed");
  s.sigma_db = 0.0;
  s.rounds = 3;
  const MeasurementSet ms = generate_measurements(s, 5);
  ASSERT_EQ(ms.size(), 30);
  for (int k = 0; k < ms.size(); ++k) {
    const double d = (s.sensors.row(k % 10).transpose() - s.source).norm();
    EXPECT_EQ(ms.y[k], std::log10(d));
    EXPECT_EQ(ms.sensors.row(k), s.sensors.row(k % 10));
  }
}

TEST(GenerateMeasurements, DeterministicForSeed) {
  Scenario s = make_scenario("2d-fixed");
  s.rounds = 7;
  const MeasurementSet a = generate_measurements(s, 99);
  const MeasurementSet b = generate_measurements(s, 99);
  const MeasurementSet c = generate_measurements(s, 100);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(*a.raw_db, *b.raw_db);
  EXPECT_EQ(a.sensors, b.sensors);
  EXPECT_NE(a.y, c.y);
}

TEST(GenerateMeasurements, RawReadingsMapOntoY) {
  Scenario s = make_scenario("2d-fixed");
  s.rounds = 50;
  s.p0 = 3.0;
  s.alpha = 2.5;
  const MeasurementSet ms = generate_measurements(s, 1);
  ASSERT_TRUE(ms.raw_db.has_value());
  for (int k = 0; k < ms.size(); ++k) {
    EXPECT_NEAR(equivalent_measurement((*ms.raw_db)[k], s.p0, s.alpha), ms.y[k], 1e-12 * std::fabs(ms.y[k]));
  }
}

TEST(GenerateMeasurements, TransformedModelIdentity) {
  // 10^{2y} = d^2 10^{2 omega}, with omega recovered from the dB-domain noise.
  Scenario s = make_scenario("2d-fixed");
  s.rounds = 100;
  const MeasurementSet ms = generate_measurements(s, 3);
  for (int k = 0; k < ms.size(); ++k) {
    const double d = (ms.sensors.row(k).transpose() - s.source).norm();
    const double eps = (*ms.raw_db)[k] - noise_free_db(d, s.p0, s.alpha);
    const double omega = -eps / (10.0 * s.alpha);
    const double lhs = std::pow(10.0, 2.0 * ms.y[k]);
    const double rhs = d * d * std::pow(10.0, 2.0 * omega);
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-12);
  }
}

TEST(GenerateMeasurements, OmegaStdMatchesSigmaOverTenAlpha) {
  Scenario s = make_scenario("2d-fixed");
  s.sigma_db = 2.0;
  s.alpha = 2.0;
  s.rounds = 100'000;  // 10^6 readings
  const MeasurementSet ms = generate_measurements(s, 77);
  long double sum = 0, sq = 0;
  for (int k = 0; k < ms.size(); ++k) {
    const double w = ms.y[k] - std::log10((ms.sensors.row(k).transpose() - s.source).norm());
    sum += w;
    sq += static_cast<long double>(w) * w;
  }
  const double mean = static_cast<double>(sum / ms.size());
  const double sd = std::sqrt(static_cast<double>(sq / ms.size()) - mean * mean);
  EXPECT_GE(sd, 0.099);
  EXPECT_LE(sd, 0.101);
}

TEST(MeasurementSet, ValidateChecksShapes) {
  MeasurementSet ms;
  ms.sensors = PointSet::Random(5, 2);
  ms.y = Eigen::VectorXd::Random(4);
  EXPECT_THROW(ms.validate(), Error);
  ms.y = Eigen::VectorXd::Random(5);
  EXPECT_NO_THROW(ms.validate());
  ms.sensors = PointSet::Random(2, 2);
  ms.y = Eigen::VectorXd::Random(2);
  EXPECT_THROW(ms.validate(), Error);
}

TEST(Seeds, DerivedStreamsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
}

}  // namespace
}  // namespace rssloc
