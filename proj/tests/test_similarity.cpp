#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "semtype/error.hpp"
#include "semtype/rng.hpp"
#include "semtype/similarity.hpp"

using namespace semtype;

namespace {

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("cosine_similarity") {
  SUBCASE("self similarity is 1") {
    CHECK(cosine_similarity(to_vec({1, 2, 3}), to_vec({1, 2, 3})) == doctest::Approx(1.0));
  }
  SUBCASE("orthogonal vectors score 0") {
    CHECK(cosine_similarity(to_vec({1, 0}), to_vec({0, 1})) == doctest::Approx(0.0));
  }
  SUBCASE("matches the naive oracle to 1e-12") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> a(6);
      std::vector<double> b(6);
      for (auto& v : a) v = rng.normal();
      for (auto& v : b) v = rng.normal();
      CHECK(cosine_similarity(to_vec(a), to_vec(b)) ==
            doctest::Approx(oracles::naive_cosine(a, b)).epsilon(1e-12));
    }
  }
  SUBCASE("scaling laws and symmetry") {
    Rng rng(4);
    std::vector<double> a(5);
    std::vector<double> b(5);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal();
    const double base = cosine_similarity(to_vec(a), to_vec(b));
    CHECK(cosine_similarity(to_vec(b), to_vec(a)) == base);
    std::vector<double> a_scaled = a;
    for (auto& v : a_scaled) v *= 7.0;
    CHECK(cosine_similarity(to_vec(a_scaled), to_vec(b)) == doctest::Approx(base).epsilon(1e-12));
    for (auto& v : a_scaled) v *= -1.0;
    CHECK(cosine_similarity(to_vec(a_scaled), to_vec(b)) == doctest::Approx(-base).epsilon(1e-12));
    CHECK(base >= -1.0);
    CHECK(base <= 1.0);
  }
  SUBCASE("errors") {
    try {
      cosine_similarity(to_vec({0, 0}), to_vec({1, 1}));
      FAIL("expected ZeroVector");
    } catch (const Error& e) {
      CHECK(e.code() == Err::ZeroVector);
    }
    try {
      cosine_similarity(to_vec({1, 2}), to_vec({1, 2, 3}));
      FAIL("expected LengthMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Err::LengthMismatch);
    }
  }
}

TEST_CASE("build_signatures") {
  SUBCASE("single-instance label copies that instance") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 2, 5, 6, 9, 9;
    const SignatureSet sigs = build_signatures(x, {0, 1, 1}, 2, 20, 1);
    CHECK(sigs.signatures(0, 0) == doctest::Approx(1.0));
    CHECK(sigs.signatures(0, 1) == doctest::Approx(2.0));
    CHECK(sigs.sample_counts[0] == 1);
    CHECK(sigs.sample_counts[1] == 2);
  }
  SUBCASE("twenty identical vectors average to themselves") {
    Eigen::MatrixXd x(20, 3);
    for (int i = 0; i < 20; ++i) x.row(i) << 2.0, -1.0, 0.5;
    const std::vector<int> y(20, 0);
    const SignatureSet sigs = build_signatures(x, y, 1, 20, 7);
    CHECK(sigs.signatures(0, 0) == doctest::Approx(2.0));
    CHECK(sigs.signatures(0, 1) == doctest::Approx(-1.0));
    CHECK(sigs.signatures(0, 2) == doctest::Approx(0.5));
  }
  SUBCASE("seeded draw over 100 instances matches the sampling oracle") {
    Rng data_rng(10);
    Eigen::MatrixXd x(100, 4);
    for (Eigen::Index i = 0; i < 100; ++i) {
      for (Eigen::Index j = 0; j < 4; ++j) x(i, j) = data_rng.normal();
    }
    const std::vector<int> y(100, 0);
    const std::uint64_t seed = 99;
    const SignatureSet sigs = build_signatures(x, y, 1, 20, seed);

    // Reimplement the documented procedure: per-label derived stream, partial
    // Fisher-Yates over the member list, mean of the picks.
    Rng pick_rng(derive_seed(seed, 0));
    const auto picks = pick_rng.sample_without_replacement(100, 20);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(4);
    for (const auto p : picks) mean += x.row(static_cast<Eigen::Index>(p));
    mean /= 20.0;
    CHECK((sigs.signatures.row(0) - mean).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("sampling everything equals the full label mean") {
    Rng rng(12);
    Eigen::MatrixXd x(15, 2);
    for (Eigen::Index i = 0; i < 15; ++i) {
      x(i, 0) = rng.normal();
      x(i, 1) = rng.normal();
    }
    const std::vector<int> y(15, 0);
    const SignatureSet sigs = build_signatures(x, y, 1, 15, 3);
    CHECK(sigs.signatures(0, 0) == doctest::Approx(x.col(0).mean()).epsilon(1e-12));
    CHECK(sigs.signatures(0, 1) == doctest::Approx(x.col(1).mean()).epsilon(1e-12));
  }
  SUBCASE("determinism") {
    Rng rng(1);
    Eigen::MatrixXd x(30, 3);
    std::vector<int> y;
    for (Eigen::Index i = 0; i < 30; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rng.normal();
      y.push_back(static_cast<int>(i) % 3);
    }
    const SignatureSet a = build_signatures(x, y, 3, 5, 17);
    const SignatureSet b = build_signatures(x, y, 3, 5, 17);
    CHECK((a.signatures - b.signatures).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("empty label raises") {
    Eigen::MatrixXd x(2, 2);
    x << 1, 2, 3, 4;
    try {
      build_signatures(x, {0, 0}, 2, 20, 1);
      FAIL("expected EmptyLabel");
    } catch (const Error& e) {
      CHECK(e.code() == Err::EmptyLabel);
    }
  }
}

TEST_CASE("cd_features") {
  SUBCASE("instance equal to a signature scores 1 in that column") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 0, 0, 1, 1, 1;
    const SignatureSet sigs = build_signatures(x, {0, 1, 2}, 3, 20, 1);
    const Eigen::MatrixXd cd = cd_features(x, sigs);
    REQUIRE(cd.rows() == 3);
    REQUIRE(cd.cols() == 3);
    CHECK(cd(0, 0) == doctest::Approx(1.0));
    CHECK(cd(1, 1) == doctest::Approx(1.0));
    CHECK(cd(2, 2) == doctest::Approx(1.0));
    CHECK(cd(0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("every cell matches the per-pair oracle") {
    Rng rng(20);
    Eigen::MatrixXd x(40, 6);
    std::vector<int> y;
    for (Eigen::Index i = 0; i < 40; ++i) {
      for (Eigen::Index j = 0; j < 6; ++j) x(i, j) = rng.normal();
      y.push_back(static_cast<int>(i % 4));
    }
    const SignatureSet sigs = build_signatures(x, y, 4, 20, 5);
    const Eigen::MatrixXd cd = cd_features(x, sigs);
    for (Eigen::Index i = 0; i < 40; ++i) {
      for (Eigen::Index j = 0; j < 4; ++j) {
        std::vector<double> a(6);
        std::vector<double> b(6);
        for (Eigen::Index c = 0; c < 6; ++c) {
          a[static_cast<std::size_t>(c)] = x(i, c);
          b[static_cast<std::size_t>(c)] = sigs.signatures(j, c);
        }
        REQUIRE(cd(i, j) == doctest::Approx(oracles::naive_cosine(a, b)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("zero instance rows produce zero cells and a warning") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 0, 0, 0, 0, 1;
    const SignatureSet sigs = build_signatures(x, {0, 0, 1}, 2, 20, 2);
    std::vector<std::string> warnings;
    const Eigen::MatrixXd cd = cd_features(x, sigs, &warnings);
    CHECK(cd.row(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(warnings.size() == 1);
  }
}

TEST_CASE("label_polar_table") {
  LabelTable labels = LabelTable::from_names({"a", "b", "c"});
  SignatureSet sigs;
  sigs.signatures.resize(3, 2);
  sigs.signatures << 1, 0,   // a: reference
      0, 1,                  // b: orthogonal
      1, 1;                  // c: 45 degrees
  sigs.sample_counts = {1, 1, 1};

  const auto rows = label_polar_table(sigs, labels, 0);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].label == "a");
  CHECK(rows[0].angle_deg == doctest::Approx(0.0));
  CHECK(rows[1].label == "c");
  CHECK(rows[1].angle_deg == doctest::Approx(45.0).epsilon(1e-9));
  CHECK(rows[2].label == "b");
  CHECK(rows[2].angle_deg == doctest::Approx(90.0).epsilon(1e-9));
  for (const auto& row : rows) {
    CHECK(row.angle_deg == doctest::Approx(std::acos(row.similarity) * 180.0 /
                                           std::acos(-1.0)).epsilon(1e-9));
  }

  const std::string csv = polar_table_csv(rows);
  CHECK(csv.rfind("label,reference,similarity,angle_deg\n", 0) == 0);
}
