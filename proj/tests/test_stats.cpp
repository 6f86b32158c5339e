#include <doctest.h>

#include <vector>

#include "oracles.hpp"
#include "semtype/error.hpp"
#include "semtype/rng.hpp"
#include "semtype/stats.hpp"

using namespace semtype;

namespace {

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("describe") {
  SUBCASE("constant series uses the degenerate convention") {
    const DfVector df = describe(to_vec({5, 5, 5, 5}));
    CHECK(df.mean == doctest::Approx(5.0));
    CHECK(df.std_dev == 0.0);
    CHECK(df.variance == 0.0);
    CHECK(df.skewness == 0.0);
    CHECK(df.kurtosis == 0.0);
    CHECK(df.stationarity == 2);
  }
  SUBCASE("hand arithmetic on 1..4") {
    const DfVector df = describe(to_vec({1, 2, 3, 4}));
    CHECK(df.mean == doctest::Approx(2.5));
    CHECK(df.variance == doctest::Approx(1.25));
  }
  SUBCASE("10k standard-normal samples match the moment oracle") {
    Rng rng(42);
    std::vector<double> x(10000);
    for (auto& v : x) v = rng.normal();
    const DfVector df = describe(to_vec(x));
    const auto oracle = oracles::naive_moments(x);
    CHECK(df.mean == doctest::Approx(oracle.mean).epsilon(1e-9));
    CHECK(df.variance == doctest::Approx(oracle.variance).epsilon(1e-9));
    CHECK(df.std_dev == doctest::Approx(oracle.std_dev).epsilon(1e-9));
    CHECK(df.skewness == doctest::Approx(oracle.skewness).epsilon(1e-9));
    CHECK(df.kurtosis == doctest::Approx(oracle.kurtosis).epsilon(1e-9));
    CHECK(std::abs(df.skewness) < 0.1);
    CHECK(std::abs(df.kurtosis) < 0.2);
  }
  SUBCASE("variance equals std squared") {
    Rng rng(7);
    std::vector<double> x(500);
    for (auto& v : x) v = rng.uniform(-3, 9);
    const DfVector df = describe(to_vec(x));
    CHECK(df.variance == doctest::Approx(df.std_dev * df.std_dev).epsilon(1e-9));
  }
  SUBCASE("fixed field order, length 6") {
    const DfVector df = describe(to_vec({1, 2, 3, 4}));
    const auto v = df.as_vector();
    REQUIRE(v.size() == 6);
    CHECK(v[0] == df.mean);
    CHECK(v[1] == df.std_dev);
    CHECK(v[2] == df.variance);
    CHECK(v[3] == static_cast<double>(df.stationarity));
    CHECK(v[4] == df.kurtosis);
    CHECK(v[5] == df.skewness);
  }
  SUBCASE("too short") {
    try {
      describe(to_vec({1, 2, 3}));
      FAIL("expected TooShort");
    } catch (const Error& e) {
      CHECK(e.code() == Err::TooShort);
    }
  }
}

TEST_CASE("describe shift and scale behaviour") {
  Rng rng(19);
  std::vector<double> x(400);
  for (auto& v : x) v = rng.normal() * 2.0 + 1.0;
  const DfVector base = describe(to_vec(x));

  SUBCASE("shift changes only the mean") {
    std::vector<double> shifted = x;
    for (auto& v : shifted) v += 17.5;
    const DfVector df = describe(to_vec(shifted));
    CHECK(df.mean == doctest::Approx(base.mean + 17.5).epsilon(1e-9));
    CHECK(df.std_dev == doctest::Approx(base.std_dev).epsilon(1e-9));
    CHECK(df.variance == doctest::Approx(base.variance).epsilon(1e-9));
    CHECK(df.skewness == doctest::Approx(base.skewness).epsilon(1e-9));
    CHECK(df.kurtosis == doctest::Approx(base.kurtosis).epsilon(1e-9));
    CHECK(df.stationarity == base.stationarity);
  }
  SUBCASE("positive scaling") {
    const double alpha = 3.5;
    std::vector<double> scaled = x;
    for (auto& v : scaled) v *= alpha;
    const DfVector df = describe(to_vec(scaled));
    CHECK(df.std_dev == doctest::Approx(alpha * base.std_dev).epsilon(1e-9));
    CHECK(df.variance == doctest::Approx(alpha * alpha * base.variance).epsilon(1e-9));
    CHECK(df.skewness == doctest::Approx(base.skewness).epsilon(1e-9));
    CHECK(df.kurtosis == doctest::Approx(base.kurtosis).epsilon(1e-9));
    CHECK(df.stationarity == base.stationarity);
  }
}

TEST_CASE("stationarity_ordinal") {
  SUBCASE("constant series scores 2") {
    CHECK(stationarity_ordinal(Eigen::VectorXd::Constant(60, 3.0)) == 2);
  }
  SUBCASE("strong linear ramp scores 0") {
    Eigen::VectorXd ramp(1000);
    for (int i = 0; i < 1000; ++i) ramp[i] = static_cast<double>(i);
    CHECK(stationarity_ordinal(ramp) == 0);
  }
  SUBCASE("white noise scores 2 in at least 99 of 100 seeds") {
    int stationary = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      Eigen::VectorXd x(3000);
      for (int i = 0; i < 3000; ++i) x[i] = rng.normal();
      if (stationarity_ordinal(x) == 2) ++stationary;
    }
    CHECK(stationary >= 99);
  }
  SUBCASE("affine invariance") {
    Rng rng(55);
    Eigen::VectorXd x(300);
    for (int i = 0; i < 300; ++i) x[i] = rng.normal() + 0.01 * i;
    const int base = stationarity_ordinal(x);
    CHECK(stationarity_ordinal((-4.0 * x).eval()) == base);
    Eigen::VectorXd affine = 2.5 * x;
    affine.array() += 100.0;
    CHECK(stationarity_ordinal(affine) == base);
  }
  SUBCASE("length gate") {
    try {
      stationarity_ordinal(Eigen::VectorXd::Zero(29));
      FAIL("expected TooShort");
    } catch (const Error& e) {
      CHECK(e.code() == Err::TooShort);
    }
  }
}
