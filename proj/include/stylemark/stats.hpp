#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stylemark/corpus.hpp"
#include "stylemark/special_functions.hpp"

namespace stylemark {
struct FeatureVector;
}

namespace stylemark::stats {

inline constexpr double kSignificance = 0.05;

/// Per-book values of one metric for one translator group.
struct GroupSample {
  VariantId label = VariantId::HT;
  Eigen::VectorXd values;
};

struct AnovaSummary {
  double F = 0.0;  // +inf when within-group variance is zero but means differ
  double p = 1.0;
  std::vector<double> means;
  std::vector<double> stds;  // sample (n-1) standard deviations
  double ms_within = 0.0;
  int df_between = 0;
  int df_within = 0;
};

/// One-way ANOVA. Needs at least two groups of at least two finite values.
AnovaSummary one_way_anova(std::span<const GroupSample> groups);

struct PairwiseResult {
  VariantId group_1 = VariantId::HT;
  VariantId group_2 = VariantId::HT;
  double mean_diff = 0.0;  // mean(group_1) - mean(group_2)
  double q = 0.0;
  double p_adj = 1.0;

  bool significant() const { return p_adj < kSignificance; }
};

/// Tukey HSD with the Tukey-Kramer standard error for unequal group sizes.
/// Pairs follow the order of `groups`: (0,1), (0,2), ..., (1,2), ...
std::vector<PairwiseResult> tukey_hsd(std::span<const GroupSample> groups);

struct AnovaResult {
  std::string feature;
  std::string label;
  bool lexical = true;
  std::vector<VariantId> groups;
  std::vector<std::size_t> sizes;
  AnovaSummary summary;
  std::vector<PairwiseResult> pairwise;

  /// Pairwise rows are reported only behind a significant omnibus test.
  bool report_pairwise() const { return summary.p < kSignificance; }
};

/// One ANOVA per lexical and syntactic scalar, grouping documents by variant.
/// Groups are ordered CTX, HT, S2S so pairs read CTX-HT, CTX-S2S, HT-S2S.
std::vector<AnovaResult> anova_suite(std::span<const FeatureVector> features);

/// "0.002*" style significance cell.
std::string format_sig(double p);

/// One row per metric: group means/stds, F, Sig., then one column block per pair.
void write_anova_csv(std::ostream& os, std::span<const AnovaResult> results);

/// Plain-text rendering in the familiar M/Std/F/Sig./pairwise table layout.
void write_anova_table(std::ostream& os, std::span<const AnovaResult> results, bool lexical);

}  // namespace stylemark::stats
