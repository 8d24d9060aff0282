#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qflow/csv.hpp"
#include "qflow/phase_space.hpp"

using namespace qflow;
using QC = QuadratureConvention;

TEST_CASE("convert_quadrature examples") {
  CHECK(convert_quadrature(1.0, QC::AmplitudeParts, QC::OperatorQuadratures) == 2.0);
  CHECK(convert_quadrature(3.0, QC::OperatorQuadratures, QC::AmplitudeParts) == 1.5);
  CHECK(convert_quadrature(0.7, QC::AmplitudeParts, QC::AmplitudeParts) == 0.7);
  CHECK(convert_variance(0.5, QC::AmplitudeParts, QC::OperatorQuadratures) == 2.0);
}

TEST_CASE("convention round trip is exact") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    for (auto a : {QC::AmplitudeParts, QC::OperatorQuadratures}) {
      for (auto b : {QC::AmplitudeParts, QC::OperatorQuadratures}) {
        CHECK(convert_quadrature(convert_quadrature(v, a, b), b, a) == v);
        CHECK(convert_variance(convert_variance(std::abs(v), a, b), b, a) == std::abs(v));
      }
    }
  }
}

TEST_CASE("convention names") {
  CHECK(to_string(QC::AmplitudeParts) == "amplitude");
  CHECK(to_string(QC::OperatorQuadratures) == "quadrature");
  CHECK(parse_convention("amplitude") == QC::AmplitudeParts);
  CHECK(parse_convention("quadrature") == QC::OperatorQuadratures);
  CHECK_THROWS(parse_convention("polar"));
}

TEST_CASE("ComplexAmplitude rejects non-finite parts") {
  CHECK_THROWS(ComplexAmplitude(NAN, 0.0));
  CHECK_THROWS(ComplexAmplitude(0.0, INFINITY));
  ComplexAmplitude a(3.0, 4.0);
  CHECK(a.norm_squared() == 25.0);
  CHECK(a.value() == Complex(3.0, 4.0));
}

TEST_CASE("TimeGrid") {
  TimeGrid g(0.0, 3.0, 300);
  CHECK(g.n_points() == 301);
  CHECK(g.step() == doctest::Approx(0.01));
  CHECK(g.time(0) == 0.0);
  CHECK(g.time(300) == 3.0);
  CHECK_THROWS(TimeGrid(0.0, 1.0, 0));
  CHECK_THROWS(TimeGrid(1.0, 0.0, 10));
}

TEST_CASE("mixture_pdf examples") {
  CHECK(mixture_pdf(GaussianMixture1D::single(0, 1), 0) ==
        doctest::Approx(1 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-14));
  CHECK(mixture_pdf(GaussianMixture1D::single(0, 0.5), 0) ==
        doctest::Approx(0.5641895835477563).epsilon(1e-14));
  GaussianMixture1D two({{0.5, -1, 0.25}, {0.5, 1, 0.25}});
  const double expect = std::exp(-2.0) * (2 / std::sqrt(2 * std::numbers::pi * 0.25)) * 0.5;
  CHECK(mixture_pdf(two, 0) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(expect == doctest::Approx(0.10798).epsilon(1e-4));
}

TEST_CASE("mixture validation") {
  CHECK_THROWS(GaussianMixture1D(std::vector<GaussianComponent>{}));
  CHECK_THROWS(GaussianMixture1D({{0.5, 0, 1}}));
  CHECK_THROWS(GaussianMixture1D({{1.0, 0, 0}}));
  CHECK_THROWS(GaussianMixture1D({{1.5, 0, 1}, {-0.5, 0, 1}}));
}

TEST_CASE("mixture is nonnegative and normalized") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mean(-5, 5), var(0.01, 4), w(0.1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GaussianComponent> c(1 + trial % 4);
    double total = 0;
    for (auto& k : c) {
      k = {w(rng), mean(rng), var(rng)};
      total += k.weight;
    }
    for (auto& k : c) k.weight /= total;
    GaussianMixture1D m(c);
    const auto [lo, hi] = m.envelope(10);
    for (int i = 0; i <= 200; ++i) CHECK(m.pdf(lo + (hi - lo) * i / 200.0) >= 0.0);
    CHECK(mixture_mass(m) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("mixture moments and affine transform") {
  GaussianMixture1D m({{0.25, -1, 0.5}, {0.75, 2, 0.1}});
  CHECK(m.mean() == doctest::Approx(0.25 * -1 + 0.75 * 2));
  const double second = 0.25 * (0.5 + 1) + 0.75 * (0.1 + 4);
  CHECK(m.variance() == doctest::Approx(second - m.mean() * m.mean()));
  const auto t = m.transformed(0.5, 1.0);
  CHECK(t.mean() == doctest::Approx(0.5 * m.mean() + 1.0));
  CHECK(t.variance() == doctest::Approx(0.25 * m.variance()));
  CHECK(m.cdf(1e9) == doctest::Approx(1.0));
  CHECK(m.cdf(-1e9) == doctest::Approx(0.0));
}

TEST_CASE("csv formatting") {
  CHECK(csv_number(0.1) == "0.10000000000000001");
  CHECK(csv_number(3.0) == "3");
  CHECK(csv_number(-2.5e-20) == "-2.4999999999999999e-20");
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}
