#include <cmath>

#include "doctest.h"
#include "tnsim/metrics/distances.hpp"
#include "tnsim/rng.hpp"

using namespace tnsim;
using namespace tnsim::metrics;

TEST_CASE("histograms normalize counts") {
  Eigen::VectorXd c(3);
  c << 1, 1, 2;
  const auto h = Histogram::from_counts(c);
  CHECK(h.normalized);
  CHECK(h.bins(2) == 0.5);
  CHECK(Histogram::uniform(4).bins(3) == 0.25);
  CHECK_THROWS_AS(Histogram::from_counts(Eigen::VectorXd::Zero(3)), std::invalid_argument);
  c(0) = -1;
  CHECK_THROWS_AS(Histogram::from_counts(c), std::invalid_argument);
}

TEST_CASE("emd between point masses is their distance") {
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(5), q = Eigen::VectorXd::Zero(5);
      p(i) = 1;
      q(j) = 1;
      CHECK(emd_1d(p, q, 0.25) == doctest::Approx(0.25 * std::abs(i - j)));
    }
  }
  Eigen::VectorXd a(3), b(3);
  a << 0.5, 0.5, 0;
  b << 0, 0.5, 0.5;
  CHECK(emd_1d(a, b) == doctest::Approx(1.0));
  CHECK_THROWS_AS(emd_1d(a, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("jsd bounds and symmetry") {
  Eigen::VectorXd p(2), q(2);
  p << 1, 0;
  q << 0, 1;
  CHECK(jsd(p, q) == doctest::Approx(1.0));
  CHECK(jsd(p, p) == 0.0);
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd a(6), b(6);
    for (int i = 0; i < 6; ++i) {
      a(i) = rng.uniform();
      b(i) = rng.uniform();
    }
    a /= a.sum();
    b /= b.sum();
    const double d = jsd(a, b);
    CHECK(d >= 0);
    CHECK(d <= 1);
    CHECK(d == doctest::Approx(jsd(b, a)));
  }
  Histogram raw{p, false};
  CHECK_THROWS_AS(jsd(raw, raw), std::invalid_argument);
}

TEST_CASE("wasserstein matches sorted differences for equal sizes") {
  Rng rng(2);
  std::vector<double> a, b;
  for (int k = 0; k < 40; ++k) {
    a.push_back(rng.uniform());
    b.push_back(2 * rng.uniform());
  }
  std::vector<double> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double want = 0;
  for (std::size_t k = 0; k < sa.size(); ++k) want += std::abs(sa[k] - sb[k]);
  want /= static_cast<double>(sa.size());
  CHECK(wasserstein_1d(a, b) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("wasserstein with unequal sizes") {
  // {0} vs {0, 1}: half the mass moves by 1.
  CHECK(wasserstein_1d({0.0}, {0.0, 1.0}) == doctest::Approx(0.5));
  CHECK(wasserstein_1d({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(wasserstein_1d({0.0}, {5.0}) == doctest::Approx(5.0));
  CHECK_THROWS_AS(wasserstein_1d({}, {1.0}), std::invalid_argument);
}

TEST_CASE("rmse") {
  const std::vector<double> a{1, 2, 3}, b{1, 2, 5};
  CHECK(rmse(a, b) == doctest::Approx(std::sqrt(4.0 / 3.0)));
  const std::vector<double> c{1};
  CHECK_THROWS_AS(rmse(a, c), std::invalid_argument);
}
