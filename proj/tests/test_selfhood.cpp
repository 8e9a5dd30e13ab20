#include <doctest.h>

#include "aif/selfhood.hpp"

using namespace aif;

TEST_CASE("evidence window mean and eviction") {
  EvidenceWindow w(2, 10.0);
  w.push(0.5);
  CHECK(w.mean() == doctest::Approx(0.5));
  w.push(1.0);
  w.push(3.0);
  w.push(5.0);  // evicts 1.0 -> [3, 5]
  CHECK(w.size() == 2);
  CHECK(w.mean() == doctest::Approx(4.0));
}

TEST_CASE("constant stream keeps the mean at that value") {
  for (int cap : {1, 3, 50}) {
    EvidenceWindow w(cap, 0.0);
    for (int i = 0; i < 100; ++i) w.push(2.25);
    CHECK(w.mean() == doctest::Approx(2.25));
  }
}

TEST_CASE("classification thresholds the window mean") {
  EvidenceWindow w(10, 1.0);
  w.push(0.5);
  CHECK(w.classify().is_self);
  w.push(1.6);  // mean 1.05 > 1.0
  CHECK_FALSE(w.classify().is_self);
  CHECK(w.classify().mean_evidence == doctest::Approx(1.05));
}

TEST_CASE("infinite threshold always reads self") {
  EvidenceWindow w(5);
  w.push(1e12);
  CHECK(w.classify().is_self);
}

TEST_CASE("classification is monotone in the threshold") {
  EvidenceWindow w(5, 1.0);
  w.push(0.9);
  const bool before = w.classify().is_self;
  w.set_threshold(5.0);  // raising the threshold cannot flip self -> other
  CHECK((!before || w.classify().is_self));
  w.set_threshold(1e9);
  CHECK(w.classify().is_self);
}

TEST_CASE("empty window refuses to classify") {
  EvidenceWindow w(5, 1.0);
  CHECK_THROWS_AS(w.classify(), std::logic_error);
}

TEST_CASE("window rejects bad input") {
  CHECK_THROWS_AS(EvidenceWindow(0, 1.0), std::invalid_argument);
  EvidenceWindow w(5, 1.0);
  CHECK_THROWS_AS(w.push(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("threshold calibration sits midway between the class means") {
  const std::vector<double> self{1.0, 2.0, 3.0};
  const std::vector<double> other{10.0, 14.0};
  CHECK(calibrate_threshold(self, other) == doctest::Approx(0.5 * (2.0 + 12.0)));
  CHECK_THROWS_AS(calibrate_threshold({}, other), std::invalid_argument);
}
