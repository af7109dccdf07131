#include "stylemark/stats.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

#include "stylemark/csv.hpp"
#include "stylemark/error.hpp"
#include "stylemark/features.hpp"

namespace stylemark::stats {

namespace {

void check_groups(std::span<const GroupSample> groups) {
  if (groups.size() < 2) throw DataError("ANOVA needs at least two groups");
  for (const auto& g : groups) {
    if (g.values.size() < 2) {
      throw DataError("group " + std::string(to_string(g.label)) + " has fewer than two values");
    }
    if (!g.values.allFinite()) throw DataError("group " + std::string(to_string(g.label)) + " has non-finite values");
  }
}

double sample_std(const Eigen::VectorXd& v, double mean) {
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

}  // namespace

AnovaSummary one_way_anova(std::span<const GroupSample> groups) {
  check_groups(groups);
  AnovaSummary out;
  const auto k = static_cast<int>(groups.size());
  Eigen::Index n_total = 0;
  double grand_sum = 0.0;
  for (const auto& g : groups) {
    const double mean = g.values.mean();
    out.means.push_back(mean);
    out.stds.push_back(sample_std(g.values, mean));
    n_total += g.values.size();
    grand_sum += g.values.sum();
  }
  const double grand_mean = grand_sum / static_cast<double>(n_total);
  double ss_between = 0.0;
  double ss_within = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& v = groups[i].values;
    const double d = out.means[i] - grand_mean;
    ss_between += static_cast<double>(v.size()) * d * d;
    ss_within += (v.array() - out.means[i]).square().sum();
  }
  out.df_between = k - 1;
  out.df_within = static_cast<int>(n_total) - k;
  const double ms_between = ss_between / out.df_between;
  out.ms_within = ss_within / out.df_within;

  // Between-group spread below rounding noise of the means counts as none.
  const double scale = std::max(std::abs(grand_mean), 1.0);
  const bool means_equal = ss_between <= 1e-24 * scale * scale * static_cast<double>(n_total);
  if (means_equal) {
    out.F = 0.0;
    out.p = 1.0;
  } else if (out.ms_within == 0.0) {
    out.F = std::numeric_limits<double>::infinity();
    out.p = 0.0;
  } else {
    out.F = ms_between / out.ms_within;
    out.p = 1.0 - f_cdf<double>(out.F, out.df_between, out.df_within);
  }
  return out;
}

std::vector<PairwiseResult> tukey_hsd(std::span<const GroupSample> groups) {
  const auto anova = one_way_anova(groups);
  const auto k = static_cast<int>(groups.size());
  std::vector<PairwiseResult> pairs;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      PairwiseResult r;
      r.group_1 = groups[i].label;
      r.group_2 = groups[j].label;
      r.mean_diff = anova.means[i] - anova.means[j];
      const double se = std::sqrt(anova.ms_within / 2.0 *
                                  (1.0 / static_cast<double>(groups[i].values.size()) +
                                   1.0 / static_cast<double>(groups[j].values.size())));
      if (r.mean_diff == 0.0) {
        r.q = 0.0;
        r.p_adj = 1.0;
      } else if (se == 0.0) {
        r.q = std::numeric_limits<double>::infinity();
        r.p_adj = 0.0;
      } else {
        r.q = std::abs(r.mean_diff) / se;
        r.p_adj = 1.0 - studentized_range_cdf<double>(r.q, k, anova.df_within);
        if (r.p_adj < 0.0) r.p_adj = 0.0;
      }
      pairs.push_back(r);
    }
  }
  return pairs;
}

std::vector<AnovaResult> anova_suite(std::span<const FeatureVector> features) {
  // Alphabetical group order gives the pair order CTX-HT, CTX-S2S, HT-S2S.
  constexpr VariantId kOrder[] = {VariantId::CTX, VariantId::HT, VariantId::S2S};
  std::map<VariantId, std::vector<const FeatureVector*>> by_variant;
  for (const auto& fv : features) by_variant[fv.doc_id.variant].push_back(&fv);

  std::vector<VariantId> present;
  for (auto v : kOrder) {
    if (by_variant.contains(v)) present.push_back(v);
  }
  if (present.size() < 2) throw DataError("ANOVA needs documents from at least two variants");

  std::vector<AnovaResult> results;
  for (const auto& metric : scalar_metrics()) {
    std::vector<GroupSample> groups;
    for (auto v : present) {
      const auto& docs = by_variant[v];
      GroupSample g{v, Eigen::VectorXd(static_cast<Eigen::Index>(docs.size()))};
      for (std::size_t i = 0; i < docs.size(); ++i) g.values(static_cast<Eigen::Index>(i)) = metric.get(*docs[i]);
      groups.push_back(std::move(g));
    }
    AnovaResult r;
    r.feature = std::string(metric.key);
    r.label = std::string(metric.label);
    r.lexical = metric.lexical;
    r.groups = present;
    for (const auto& g : groups) r.sizes.push_back(static_cast<std::size_t>(g.values.size()));
    r.summary = one_way_anova(groups);
    r.pairwise = tukey_hsd(groups);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_sig(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f%s", p, p < kSignificance ? "*" : "");
  return buf;
}

namespace {

std::string fixed3(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

void write_anova_csv(std::ostream& os, std::span<const AnovaResult> results) {
  if (results.empty()) return;
  const auto& groups = results.front().groups;
  csv::Row header = {"feature"};
  for (auto g : groups) {
    header.push_back(std::string(to_string(g)) + "_M");
    header.push_back(std::string(to_string(g)) + "_Std");
  }
  header.insert(header.end(), {"F", "Sig", "p_value"});
  const std::size_t pairs = groups.size() * (groups.size() - 1) / 2;
  for (std::size_t k = 1; k <= pairs; ++k) {
    const auto prefix = "pair" + std::to_string(k) + "_";
    header.insert(header.end(), {prefix + "group_1", prefix + "group_2", prefix + "mean_dif", prefix + "sig"});
  }
  os << csv::join(header) << '\n';
  for (const auto& r : results) {
    csv::Row row = {r.feature};
    for (std::size_t i = 0; i < r.groups.size(); ++i) {
      row.push_back(csv::format_real(r.summary.means[i]));
      row.push_back(csv::format_real(r.summary.stds[i]));
    }
    row.push_back(std::isinf(r.summary.F) ? "inf" : csv::format_real(r.summary.F));
    row.push_back(format_sig(r.summary.p));
    row.push_back(csv::format_real(r.summary.p));
    for (const auto& pr : r.pairwise) {
      if (r.report_pairwise()) {
        row.insert(row.end(), {std::string(to_string(pr.group_1)), std::string(to_string(pr.group_2)),
                               csv::format_real(pr.mean_diff), format_sig(pr.p_adj)});
      } else {
        row.insert(row.end(), {"--", "--", "--", "--"});
      }
    }
    os << csv::join(row) << '\n';
  }
}

void write_anova_table(std::ostream& os, std::span<const AnovaResult> results, bool lexical) {
  char line[512];
  bool header_done = false;
  for (const auto& r : results) {
    if (r.lexical != lexical) continue;
    if (!header_done) {
      std::string groups;
      for (auto g : r.groups) {
        std::snprintf(line, sizeof line, " %12s M %12s Std", std::string(to_string(g)).c_str(), "");
        groups += line;
      }
      os << (lexical ? "Lexical features" : "Syntactic features") << " (Std. = sample standard deviation)\n";
      std::snprintf(line, sizeof line, "%-36s%s %10s %8s   %-7s %-7s %14s %8s\n", "Feature", groups.c_str(), "F",
                    "Sig.", "Group 1", "Group 2", "Mean dif.", "Sig.");
      os << line;
      header_done = true;
    }
    std::string stats;
    for (std::size_t i = 0; i < r.groups.size(); ++i) {
      std::snprintf(line, sizeof line, " %14s %16s", fixed3(r.summary.means[i]).c_str(),
                    fixed3(r.summary.stds[i]).c_str());
      stats += line;
    }
    const std::string blank(stats.size(), ' ');
    if (!r.report_pairwise()) {
      std::snprintf(line, sizeof line, "%-36s%s %10s %8s   --\n", r.label.c_str(), stats.c_str(),
                    fixed3(r.summary.F).c_str(), format_sig(r.summary.p).c_str());
      os << line;
      continue;
    }
    for (std::size_t i = 0; i < r.pairwise.size(); ++i) {
      const auto& pr = r.pairwise[i];
      std::snprintf(line, sizeof line, "%-36s%s %10s %8s   %-7s %-7s %14s %8s\n", i == 0 ? r.label.c_str() : "",
                    i == 0 ? stats.c_str() : blank.c_str(), i == 0 ? fixed3(r.summary.F).c_str() : "",
                    i == 0 ? format_sig(r.summary.p).c_str() : "", std::string(to_string(pr.group_1)).c_str(),
                    std::string(to_string(pr.group_2)).c_str(), fixed3(pr.mean_diff).c_str(),
                    format_sig(pr.p_adj).c_str());
      os << line;
    }
  }
  if (header_done) os << "Note: * p<0.05\n";
}

}  // namespace stylemark::stats
