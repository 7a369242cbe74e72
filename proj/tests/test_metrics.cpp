#include <algorithm>
#include <random>

#include "doctest.h"

#include "ctrlseq/error.hpp"
#include "ctrlseq/metrics.hpp"

using namespace ctrlseq;

namespace {

Sequence seq(const std::string& text) {
  return Sequence::parse(text, text.size());
}

}  // namespace

TEST_CASE("target-minus-off-target gap") {
  SUBCASE("hand example") {
    std::vector<std::vector<double>> fitness{{0.8, 0.2, 0.4}, {0.6, 0.4, 0.2}};
    CHECK(metric_delta_r(fitness) == doctest::Approx(0.4).epsilon(1e-9));
  }
  SUBCASE("identical objectives give 0") {
    std::vector<std::vector<double>> fitness{{0.7, 0.7, 0.7}, {0.3, 0.3, 0.3}};
    CHECK(metric_delta_r(fitness) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("single sequence extreme") {
    std::vector<std::vector<double>> fitness{{1.0, 0.0}};
    CHECK(metric_delta_r(fitness) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("linear in a common scale factor") {
    std::vector<std::vector<double>> fitness{{0.8, 0.1, 0.3}, {0.5, 0.2, 0.6}};
    double base = metric_delta_r(fitness);
    for (auto& row : fitness) {
      for (double& v : row) v *= 3.0;
    }
    CHECK(metric_delta_r(fitness) == doctest::Approx(3.0 * base).epsilon(1e-9));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(metric_delta_r({}), EmptyInput);
    CHECK_THROWS_AS(metric_delta_r({{0.5}}), NoConstraints);
  }
}

TEST_CASE("batch diversity in bits") {
  SUBCASE("identical sequences have zero entropy") {
    std::vector<Sequence> batch(5, seq("ACGT"));
    CHECK(metric_diversity(batch) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("each nucleotide once per position gives 2 bits") {
    std::vector<Sequence> batch{seq("AC"), seq("CG"), seq("GT"), seq("TA")};
    CHECK(metric_diversity(batch) == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("half-split position averages to one half bit") {
    std::vector<Sequence> batch{seq("AC"), seq("AG")};
    CHECK(metric_diversity(batch) == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("permutation and duplicate invariance") {
    std::vector<Sequence> batch{seq("ACGT"), seq("TTAA"), seq("CGCG")};
    double base = metric_diversity(batch);
    std::vector<Sequence> shuffled{batch[2], batch[0], batch[1]};
    CHECK(metric_diversity(shuffled) == doctest::Approx(base).epsilon(1e-12));
    std::vector<Sequence> doubled = batch;
    doubled.insert(doubled.end(), batch.begin(), batch.end());
    CHECK(metric_diversity(doubled) == doctest::Approx(base).epsilon(1e-12));
    CHECK(base >= 0.0);
    CHECK(base <= 2.0);
  }
  SUBCASE("empty batch") {
    std::vector<Sequence> empty;
    CHECK_THROWS_AS(metric_diversity(empty), EmptyBatch);
  }
}

TEST_CASE("median convention") {
  CHECK(metric_median(std::vector<double>{0.1, 0.9, 0.5}) ==
        doctest::Approx(0.5));
  CHECK(metric_median(std::vector<double>{0.2, 0.4}) == doctest::Approx(0.3));
  CHECK(metric_median(std::vector<double>{0.7, 0.7, 0.7}) ==
        doctest::Approx(0.7));
  CHECK_THROWS_AS(metric_median(std::vector<double>{}), EmptyInput);

  SUBCASE("permutation-invariant and bounded by min/max") {
    std::mt19937_64 rng(47);
    std::vector<double> values;
    for (int i = 0; i < 9; ++i) {
      values.push_back(static_cast<double>(rng() % 1000) / 999.0);
    }
    double med = metric_median(values);
    std::vector<double> shuffled = values;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(metric_median(shuffled) == doctest::Approx(med).epsilon(1e-12));
    CHECK(med >= *std::min_element(values.begin(), values.end()));
    CHECK(med <= *std::max_element(values.begin(), values.end()));
  }
}

TEST_CASE("batch-level motif correlation") {
  SUBCASE("proportional vectors correlate perfectly") {
    CHECK(pearson(std::vector<double>{4.0, 2.0}, std::vector<double>{2.0, 1.0}) ==
          doctest::Approx(1.0));
  }
}

TEST_CASE("metrics report serializes labeled medians") {
  MetricsReport report;
  report.labels = {"hepg2", "k562"};
  report.median_reward = {0.75, 0.25};
  report.delta_r = 0.5;
  report.motif_correlation = 0.9;
  report.diversity_bits = 1.5;
  report.n_sequences = 64;
  std::string text = report.to_json();
  CHECK(text.find("\"hepg2\":0.75") != std::string::npos);
  CHECK(text.find("\"delta_r\":0.5") != std::string::npos);
  CHECK(text.find("\"n_sequences\":64") != std::string::npos);
}
