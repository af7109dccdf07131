#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "stylemark/error.hpp"
#include "stylemark/features.hpp"
#include "stylemark/stats.hpp"

using namespace stylemark;
using namespace stylemark::stats;

// Reference values below were computed with scipy.stats (f_oneway, tukey_hsd,
// f, studentized_range) and are independent of this implementation.

namespace {

GroupSample group(VariantId id, std::initializer_list<double> v) {
  GroupSample g{id, Eigen::VectorXd(static_cast<Eigen::Index>(v.size()))};
  Eigen::Index i = 0;
  for (double x : v) g.values[i++] = x;
  return g;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("ANOVA on shifted triples has F = 3 and p = 1/8") {
    const std::vector<GroupSample> g{group(VariantId::HT, {1, 2, 3}), group(VariantId::S2S, {2, 3, 4}),
                                     group(VariantId::CTX, {3, 4, 5})};
    const auto s = one_way_anova(g);
    CHECK(std::abs(s.F - 3.0) < 1e-12);
    CHECK(std::abs(s.p - 0.125) < 1e-8);
    CHECK(s.df_between == 2);
    CHECK(s.df_within == 6);
    CHECK(s.means == std::vector<double>{2, 3, 4});
    CHECK(s.stds == std::vector<double>{1, 1, 1});

    const auto t = tukey_hsd(g);
    REQUIRE(t.size() == 3);
    CHECK(t[0].mean_diff == doctest::Approx(-1.0));
    CHECK(std::abs(t[0].p_adj - 0.48272728) < 1e-6);
    CHECK(std::abs(t[1].p_adj - 0.10886702) < 1e-6);
    CHECK(std::abs(t[2].p_adj - 0.48272728) < 1e-6);
    CHECK_FALSE(t[1].significant());
  }

  TEST_CASE("ANOVA and Tukey-Kramer with unequal sizes") {
    const std::vector<GroupSample> g{group(VariantId::HT, {2.1, 3.4, 1.9, 5.0, 4.2}),
                                     group(VariantId::S2S, {6.3, 5.9, 7.1, 6.8}),
                                     group(VariantId::CTX, {3.3, 2.8, 4.1, 3.9, 3.5, 4.4})};
    const auto s = one_way_anova(g);
    CHECK(std::abs(s.F - 16.79488021004266) < 1e-9);
    CHECK(std::abs(s.p - 0.0003325704182923314) < 1e-10);
    const auto t = tukey_hsd(g);
    REQUIRE(t.size() == 3);
    CHECK(std::abs(t[0].mean_diff - -3.205) < 1e-12);
    CHECK(std::abs(t[1].mean_diff - -0.34666667) < 1e-8);
    CHECK(std::abs(t[2].mean_diff - 2.85833333) < 1e-8);
    CHECK(std::abs(t[0].p_adj - 4.87847752e-04) < 1e-6);
    CHECK(std::abs(t[1].p_adj - 0.802182191) < 1e-6);
    CHECK(std::abs(t[2].p_adj - 9.24292996e-04) < 1e-6);
    CHECK(t[0].significant());
    CHECK_FALSE(t[1].significant());
  }

  TEST_CASE("degenerate and invariant cases") {
    const std::vector<GroupSample> same{group(VariantId::HT, {1, 2, 3}), group(VariantId::S2S, {1, 2, 3})};
    const auto s = one_way_anova(same);
    CHECK(s.F == 0.0);
    CHECK(s.p == 1.0);

    std::vector<GroupSample> g{group(VariantId::HT, {1.5, 2, 4}), group(VariantId::S2S, {3, 3.5, 6, 7})};
    const double F0 = one_way_anova(g).F;
    for (auto& x : g) x.values.array() += 1000.0;
    CHECK(one_way_anova(g).F == doctest::Approx(F0).epsilon(1e-9));

    const std::vector<GroupSample> constant{group(VariantId::HT, {1, 1}), group(VariantId::S2S, {2, 2})};
    CHECK(std::isinf(one_way_anova(constant).F));
    CHECK(one_way_anova(constant).p == 0.0);

    const std::vector<GroupSample> tiny{group(VariantId::HT, {1}), group(VariantId::S2S, {2, 3})};
    CHECK_THROWS_AS(one_way_anova(tiny), DataError);
    const std::vector<GroupSample> bad{group(VariantId::HT, {1, std::nan("")}), group(VariantId::S2S, {2, 3})};
    CHECK_THROWS_AS(one_way_anova(bad), DataError);
  }

  TEST_CASE("F distribution") {
    CHECK(std::abs(1 - f_cdf(2.5, 3.0, 17.0) - 0.09428280507894803) < 1e-12);
    CHECK(std::abs(f_cdf(0.7, 5.0, 40.0) - 0.3733465284133741) < 1e-12);
    // df1 = 2 has the closed form sf(x) = (1 + 2x/d2)^(-d2/2).
    for (double x : {0.1, 1.0, 3.0, 10.0}) {
      CHECK(std::abs(1 - f_cdf(x, 2.0, 9.0) - std::pow(1 + 2 * x / 9, -4.5)) < 1e-12);
    }
    CHECK(regularized_beta(0.3, 1.0, 1.0) == doctest::Approx(0.3));
    CHECK_THROWS_AS(f_cdf(1.0, 0.0, 3.0), std::domain_error);
  }

  TEST_CASE("studentized range distribution") {
    CHECK(std::abs(1 - studentized_range_cdf(3.77, 3, 12.0) - 0.05018236176055357) < 1e-7);
    CHECK(std::abs(studentized_range_cdf(2.0, 2, 5.0) - 0.7835627707303147) < 1e-7);
    CHECK(std::abs(studentized_range_cdf(4.5, 6, 30.0) - 0.9638224146305777) < 1e-7);
    // k = 2: the range of two normals is |Z1 - Z2| = sqrt(2)|Z|.
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(std::abs(studentized_range_cdf(2.0, 2, inf) - (2 * detail::normal_cdf(2.0 / std::sqrt(2.0)) - 1)) < 1e-10);
    CHECK(studentized_range_cdf(0.0, 3, 10.0) == 0.0);
    CHECK_THROWS_AS(studentized_range_cdf(1.0, 1, 10.0), std::domain_error);
  }

  TEST_CASE("significance cells") {
    CHECK(format_sig(0.0004) == "0.000*");
    CHECK(format_sig(0.049) == "0.049*");
    CHECK(format_sig(0.05) == "0.050");
  }

  TEST_CASE("suite groups documents by variant") {
    std::vector<FeatureVector> fv;
    for (int b = 0; b < 3; ++b) {
      for (VariantId v : kAllVariants) {
        FeatureVector f;
        f.doc_id = {std::to_string(b), v};
        f.lexical.total_words = 100 + static_cast<std::size_t>(b) + (v == VariantId::HT ? 50 : 0);
        f.lexical.vocab_richness = 0.5;
        f.syntactic.sentence_length = 10.0 + b;
        fv.push_back(f);
      }
    }
    const auto results = anova_suite(fv);
    REQUIRE(results.size() == scalar_metrics().size());
    for (const auto& r : results) {
      CHECK(r.groups == std::vector<VariantId>{VariantId::CTX, VariantId::HT, VariantId::S2S});
      CHECK(r.sizes == std::vector<std::size_t>{3, 3, 3});
    }
    std::ostringstream os;
    write_anova_csv(os, results);
    std::size_t lines = 0;
    for (char c : os.str()) lines += c == '\n';
    CHECK(lines == results.size() + 1);
  }
}
