#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "stylemark/corpus.hpp"
#include "stylemark/error.hpp"
#include "stylemark/features.hpp"

namespace stylemark::attribution {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class Authorship { Human, Machine };

inline Authorship authorship_of(VariantId variant) {
  return variant == VariantId::HT ? Authorship::Human : Authorship::Machine;
}

inline std::string_view to_string(Authorship a) { return a == Authorship::Human ? "Human" : "Machine"; }

/// The n most frequent items of one content category with their corpus-wide
/// mean and sample standard deviation of relative frequency.
template <typename Scalar = double>
struct FeatureBasis {
  ContentCategory category = ContentCategory::Words;
  std::vector<std::string> items;
  Vector<Scalar> mean;
  Vector<Scalar> std;
  std::vector<std::string> warnings;

  std::size_t size() const { return items.size(); }
};

template <typename Scalar = double>
struct DeltaProfile {
  DocId doc_id;
  Vector<Scalar> z;
};

template <typename Scalar = double>
struct LabeledDataset {
  std::vector<DeltaProfile<Scalar>> profiles;
  std::vector<Authorship> labels;
  std::vector<std::string> groups;  // book id per profile, for grouped CV
};

struct LogRegHyper {
  double l2_lambda = 1.0;  // same scale as 1/C in liblinear-style solvers
  double learning_rate = 0.1;
  int max_epochs = 5000;
  double tolerance = 1e-8;
};

template <typename Scalar = double>
struct LogRegModel {
  Vector<Scalar> weights;
  Scalar bias = 0;
  LogRegHyper hyper;
  int epochs = 0;
  Scalar loss = 0;
};

struct AccuracyCurve {
  ContentCategory category = ContentCategory::Words;
  std::vector<std::pair<std::size_t, double>> points;  // (n_mfw, balanced accuracy)
  std::pair<std::size_t, double> best{0, 0.0};
  std::vector<std::string> warnings;
};

/// Relative frequency of each basis item in each document (rows = documents).
template <typename Scalar = double>
Matrix<Scalar> relative_frequencies(std::span<const ContentCounts> counts, const std::vector<std::string>& items) {
  Matrix<Scalar> rel = Matrix<Scalar>::Zero(static_cast<Eigen::Index>(counts.size()),
                                            static_cast<Eigen::Index>(items.size()));
  for (std::size_t d = 0; d < counts.size(); ++d) {
    if (counts[d].total == 0) continue;
    const auto total = static_cast<Scalar>(counts[d].total);
    for (std::size_t j = 0; j < items.size(); ++j) {
      auto it = counts[d].counts.find(items[j]);
      if (it != counts[d].counts.end()) {
        rel(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)) = static_cast<Scalar>(it->second) / total;
      }
    }
  }
  return rel;
}

/// Top-n items by pooled count (ties broken lexicographically). Items whose
/// relative frequency does not vary across documents are dropped.
template <typename Scalar = double>
FeatureBasis<Scalar> build_basis(std::span<const ContentCounts> counts, ContentCategory category, std::size_t n) {
  if (n == 0) throw UsageError("basis size must be at least 1");
  if (counts.empty()) throw DataError("cannot build a basis from zero documents");
  if (counts.size() < 2) throw DataError("a basis needs at least two documents for a sample standard deviation");

  std::map<std::string, std::size_t> pooled;
  for (const auto& cc : counts) {
    for (const auto& [item, c] : cc.counts) pooled[item] += c;
  }
  if (pooled.empty()) throw DataError("no " + std::string(to_string(category)) + " items in any document");

  std::vector<std::pair<std::string, std::size_t>> ranked(pooled.begin(), pooled.end());
  const std::size_t keep = std::min(n, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                    [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });

  FeatureBasis<Scalar> basis;
  basis.category = category;
  if (keep < n) {
    basis.warnings.push_back("vocabulary has only " + std::to_string(keep) + " " + std::string(to_string(category)) +
                             " items; basis shorter than " + std::to_string(n));
  }
  std::vector<std::string> candidates;
  for (std::size_t i = 0; i < keep; ++i) candidates.push_back(ranked[i].first);

  const Matrix<Scalar> rel = relative_frequencies<Scalar>(counts, candidates);
  const Vector<Scalar> mean = rel.colwise().mean().transpose();
  const Vector<Scalar> std =
      ((rel.rowwise() - mean.transpose()).array().square().colwise().sum() / static_cast<Scalar>(rel.rows() - 1))
          .sqrt()
          .transpose();

  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < std.size(); ++j) {
    if (std(j) > Scalar(0)) {
      kept.push_back(j);
    } else {
      basis.warnings.push_back("dropped zero-variance item '" + candidates[static_cast<std::size_t>(j)] + "'");
    }
  }
  if (kept.empty()) throw DataError("basis is empty after dropping zero-variance items");
  basis.mean.resize(static_cast<Eigen::Index>(kept.size()));
  basis.std.resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    basis.items.push_back(candidates[static_cast<std::size_t>(kept[i])]);
    basis.mean(static_cast<Eigen::Index>(i)) = mean(kept[i]);
    basis.std(static_cast<Eigen::Index>(i)) = std(kept[i]);
  }
  return basis;
}

/// z-scores of the document's relative frequencies against the basis.
template <typename Scalar = double>
DeltaProfile<Scalar> profile(const DocId& doc_id, const ContentCounts& counts, const FeatureBasis<Scalar>& basis) {
  const Matrix<Scalar> rel = relative_frequencies<Scalar>(std::span(&counts, 1), basis.items);
  return {doc_id, ((rel.row(0).transpose() - basis.mean).array() / basis.std.array()).matrix()};
}

/// Mean absolute difference of two z-vectors.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar burrows_delta(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw UsageError("profiles have different lengths");
  if (a.size() == 0) return 0;
  return (a - b).cwiseAbs().mean();
}

template <typename Scalar>
Scalar burrows_delta(const DeltaProfile<Scalar>& a, const DeltaProfile<Scalar>& b) {
  return burrows_delta(a.z, b.z);
}

namespace detail {

template <typename Scalar>
Scalar softplus(Scalar s) {
  return std::max(s, Scalar(0)) + std::log1p(std::exp(-std::abs(s)));
}

template <typename Scalar>
Scalar sigmoid(Scalar s) {
  if (s >= 0) return 1 / (1 + std::exp(-s));
  const Scalar e = std::exp(s);
  return e / (1 + e);
}

}  // namespace detail

/// Per-sample weights giving each class half of the total weight; they sum to N.
template <typename Scalar = double>
Vector<Scalar> balanced_weights(const Vector<Scalar>& y) {
  const auto n = static_cast<Scalar>(y.size());
  const Scalar positives = y.sum();
  const Scalar negatives = n - positives;
  if (positives == 0 || negatives == 0) throw DataError("logistic regression needs both classes");
  return y.unaryExpr([&](Scalar v) { return v > Scalar(0.5) ? n / (2 * positives) : n / (2 * negatives); });
}

/// Class-weighted mean logistic loss plus (lambda / 2N) * ||w||^2 (bias unpenalised).
template <typename DerivedX, typename DerivedY, typename DerivedC, typename DerivedW>
typename DerivedX::Scalar logistic_loss(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
                                        const Eigen::MatrixBase<DerivedC>& c, const Eigen::MatrixBase<DerivedW>& w,
                                        typename DerivedX::Scalar b, double lambda) {
  using Scalar = typename DerivedX::Scalar;
  const Vector<Scalar> s = (X * w).array() + b;
  const auto n = static_cast<Scalar>(X.rows());
  Scalar total = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) total += c(i) * (detail::softplus(s(i)) - y(i) * s(i));
  return total / n + static_cast<Scalar>(lambda) / (2 * n) * w.squaredNorm();
}

/// Gradient of logistic_loss; returns (dL/dw, dL/db).
template <typename DerivedX, typename DerivedY, typename DerivedC, typename DerivedW>
std::pair<Vector<typename DerivedX::Scalar>, typename DerivedX::Scalar> logistic_gradient(
    const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y, const Eigen::MatrixBase<DerivedC>& c,
    const Eigen::MatrixBase<DerivedW>& w, typename DerivedX::Scalar b, double lambda) {
  using Scalar = typename DerivedX::Scalar;
  const auto n = static_cast<Scalar>(X.rows());
  const Vector<Scalar> s = (X * w).array() + b;
  const Vector<Scalar> r =
      (c.array() * (s.unaryExpr([](Scalar v) { return detail::sigmoid(v); }) - y).array()).matrix() / n;
  return {X.transpose() * r + static_cast<Scalar>(lambda) / n * w, r.sum()};
}

/// Full-batch gradient descent on logistic_loss from a small seeded random
/// start, until the loss changes by less than the tolerance. When there are
/// more features than samples the identical iterates are computed in sample
/// space, writing w = decay * w0 + X^T alpha.
template <typename Scalar = double>
LogRegModel<Scalar> fit_logreg(const Matrix<Scalar>& X, const Vector<Scalar>& y, const LogRegHyper& hyper,
                               std::uint64_t seed, const Matrix<Scalar>* gram = nullptr) {
  if (X.rows() != y.size()) throw UsageError("feature rows and labels differ in length");
  if (hyper.learning_rate <= 0 || hyper.max_epochs < 1 || hyper.l2_lambda < 0) {
    throw UsageError("invalid logistic-regression hyperparameters");
  }
  const Vector<Scalar> c = balanced_weights<Scalar>(y);
  const auto n = static_cast<Scalar>(X.rows());
  const auto lr = static_cast<Scalar>(hyper.learning_rate);
  const auto lambda = static_cast<Scalar>(hyper.l2_lambda);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> init(0.0, 0.01);
  Vector<Scalar> w0(X.cols());
  for (Eigen::Index j = 0; j < w0.size(); ++j) w0(j) = static_cast<Scalar>(init(rng));

  LogRegModel<Scalar> model;
  model.hyper = hyper;
  Scalar b = 0;
  Scalar previous = std::numeric_limits<Scalar>::infinity();
  const auto residual = [&](const Vector<Scalar>& s) {
    return ((c.array() * (s.unaryExpr([](Scalar v) { return detail::sigmoid(v); }) - y).array()) / n).matrix().eval();
  };
  const auto data_loss = [&](const Vector<Scalar>& s) {
    Scalar total = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) total += c(i) * (detail::softplus(s(i)) - y(i) * s(i));
    return total / n;
  };

  if (X.cols() > X.rows()) {
    const Matrix<Scalar> K = gram ? *gram : (X * X.transpose()).eval();
    const Vector<Scalar> u0 = X * w0;
    const Scalar w0_sq = w0.squaredNorm();
    const Scalar rho = 1 - lr * lambda / n;
    Vector<Scalar> alpha = Vector<Scalar>::Zero(X.rows());
    Vector<Scalar> Ka = Vector<Scalar>::Zero(X.rows());
    Scalar decay = 1;
    Vector<Scalar> s = u0.array() + b;
    for (int epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
      const Vector<Scalar> r = residual(s);
      alpha = rho * alpha - lr * r;
      b -= lr * r.sum();
      decay *= rho;
      Ka.noalias() = K * alpha;
      s = (decay * u0 + Ka).array() + b;
      const Scalar w_sq = decay * decay * w0_sq + 2 * decay * u0.dot(alpha) + alpha.dot(Ka);
      model.loss = data_loss(s) + lambda / (2 * n) * w_sq;
      model.epochs = epoch;
      if (std::abs(previous - model.loss) < hyper.tolerance) break;
      previous = model.loss;
    }
    model.weights = decay * w0 + X.transpose() * alpha;
  } else {
    Vector<Scalar> w = w0;
    Vector<Scalar> s = X * w;
    for (int epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
      const Vector<Scalar> r = residual(s);
      w = w - lr * (X.transpose() * r + lambda / n * w);
      b -= lr * r.sum();
      s = (X * w).array() + b;
      model.loss = data_loss(s) + lambda / (2 * n) * w.squaredNorm();
      model.epochs = epoch;
      if (std::abs(previous - model.loss) < hyper.tolerance) break;
      previous = model.loss;
    }
    model.weights = std::move(w);
  }
  model.bias = b;
  if (!model.weights.allFinite() || !std::isfinite(model.bias)) throw DataError("logistic regression diverged");
  return model;
}

/// Stacks profiles into a design matrix and 0/1 labels (Machine = 1).
template <typename Scalar = double>
std::pair<Matrix<Scalar>, Vector<Scalar>> design(const LabeledDataset<Scalar>& data) {
  if (data.profiles.size() != data.labels.size() || data.profiles.size() != data.groups.size()) {
    throw UsageError("dataset profiles, labels and groups differ in length");
  }
  if (data.profiles.empty()) throw DataError("empty dataset");
  const auto dims = data.profiles.front().z.size();
  Matrix<Scalar> X(static_cast<Eigen::Index>(data.profiles.size()), dims);
  Vector<Scalar> y(X.rows());
  for (std::size_t i = 0; i < data.profiles.size(); ++i) {
    if (data.profiles[i].z.size() != dims) throw UsageError("profiles have different lengths");
    X.row(static_cast<Eigen::Index>(i)) = data.profiles[i].z.transpose();
    y(static_cast<Eigen::Index>(i)) = data.labels[i] == Authorship::Machine ? Scalar(1) : Scalar(0);
  }
  return {std::move(X), std::move(y)};
}

template <typename Scalar = double>
LogRegModel<Scalar> train_logreg(const LabeledDataset<Scalar>& data, const LogRegHyper& hyper, std::uint64_t seed) {
  const auto [X, y] = design(data);
  return fit_logreg<Scalar>(X, y, hyper, seed);
}

struct Classification {
  Authorship label = Authorship::Human;
  double prob = 0.0;  // P(Machine)
};

template <typename Scalar>
Classification classify(const LogRegModel<Scalar>& model, const Vector<Scalar>& z) {
  if (z.size() != model.weights.size()) throw UsageError("profile length does not match model");
  const double prob = static_cast<double>(detail::sigmoid(model.weights.dot(z) + model.bias));
  return {prob >= 0.5 ? Authorship::Machine : Authorship::Human, prob};
}

template <typename Scalar>
Classification classify(const LogRegModel<Scalar>& model, const DeltaProfile<Scalar>& p) {
  return classify(model, p.z);
}

struct CvResult {
  double balanced_accuracy = 0.0;
  std::size_t human_correct = 0, human_total = 0;
  std::size_t machine_correct = 0, machine_total = 0;
  std::size_t folds = 0;
};

/// Leave-one-group-out cross-validation: each book's profiles are held out
/// together. Returns the mean of the per-class accuracies pooled over folds.
template <typename Scalar = double>
CvResult cross_validate(const LabeledDataset<Scalar>& data, const LogRegHyper& hyper, std::uint64_t seed) {
  const auto [X, y] = design(data);
  std::vector<std::string> groups = data.groups;
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  if (groups.size() < 2) throw DataError("cross-validation needs at least two groups");
  const Matrix<Scalar> gram = X.cols() > X.rows() ? (X * X.transpose()).eval() : Matrix<Scalar>();

  CvResult cv;
  for (const auto& held_out : groups) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t i = 0; i < data.groups.size(); ++i) {
      (data.groups[i] == held_out ? test : train).push_back(static_cast<Eigen::Index>(i));
    }
    const Matrix<Scalar> X_train = X(train, Eigen::all);
    const Vector<Scalar> y_train = y(train);
    const Matrix<Scalar> K = gram.size() ? gram(train, train).eval() : Matrix<Scalar>();
    const auto model = fit_logreg<Scalar>(X_train, y_train, hyper, seed, gram.size() ? &K : nullptr);
    for (auto i : test) {
      const Vector<Scalar> z = X.row(i).transpose();
      const bool machine = y(i) > Scalar(0.5);
      const bool correct = (classify(model, z).label == Authorship::Machine) == machine;
      if (machine) {
        ++cv.machine_total;
        cv.machine_correct += correct;
      } else {
        ++cv.human_total;
        cv.human_correct += correct;
      }
    }
    ++cv.folds;
  }
  double sum = 0.0;
  int classes = 0;
  if (cv.human_total) {
    sum += static_cast<double>(cv.human_correct) / static_cast<double>(cv.human_total);
    ++classes;
  }
  if (cv.machine_total) {
    sum += static_cast<double>(cv.machine_correct) / static_cast<double>(cv.machine_total);
    ++classes;
  }
  cv.balanced_accuracy = sum / classes;
  return cv;
}

template <typename Scalar = double>
double cv_accuracy(const LabeledDataset<Scalar>& data, const LogRegHyper& hyper, std::uint64_t seed) {
  return cross_validate(data, hyper, seed).balanced_accuracy;
}

/// Profiles every document against `basis`, labelled Human (HT) or Machine.
template <typename Scalar = double>
LabeledDataset<Scalar> make_dataset(std::span<const std::pair<DocId, ContentCounts>> docs,
                                    const FeatureBasis<Scalar>& basis) {
  LabeledDataset<Scalar> data;
  for (const auto& [id, counts] : docs) {
    data.profiles.push_back(profile(id, counts, basis));
    data.labels.push_back(authorship_of(id.variant));
    data.groups.push_back(id.book_id);
  }
  return data;
}

/// Balanced CV accuracy for each basis size. Points are sorted by size; the
/// best point is the first maximum.
template <typename Scalar = double>
AccuracyCurve mfw_sweep(std::span<const std::pair<DocId, ContentCounts>> docs, ContentCategory category,
                        std::vector<std::size_t> n_values, const LogRegHyper& hyper, std::uint64_t seed,
                        unsigned threads = 1) {
  std::sort(n_values.begin(), n_values.end());
  n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
  if (n_values.empty() || n_values.front() == 0) throw UsageError("sweep needs positive basis sizes");

  std::vector<ContentCounts> counts;
  for (const auto& [_, cc] : docs) counts.push_back(cc);

  AccuracyCurve curve;
  curve.category = category;
  curve.points.resize(n_values.size());
  std::vector<std::vector<std::string>> warnings(n_values.size());
  std::vector<std::exception_ptr> errors(n_values.size());
  auto run = [&](std::size_t i) {
    try {
      const auto basis = build_basis<Scalar>(counts, category, n_values[i]);
      warnings[i] = basis.warnings;
      curve.points[i] = {n_values[i], cv_accuracy(make_dataset(docs, basis), hyper, seed)};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_values.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < n_values.size(); ++i) run(i);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < n_values.size(); i += threads) run(i);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    for (auto& w : warnings[i]) curve.warnings.push_back("n=" + std::to_string(n_values[i]) + ": " + w);
  }
  curve.best = curve.points.front();
  for (const auto& p : curve.points) {
    if (p.second > curve.best.second) curve.best = p;
  }
  return curve;
}

template <typename Scalar>
struct LabeledProfile {
  DeltaProfile<Scalar> profile;
  Authorship label = Authorship::Human;
};

struct DeltaMatch {
  Authorship label = Authorship::Human;
  DocId nearest;
  double delta = 0.0;
};

/// Nearest labelled profile by Burrows' Delta; ties go to the smaller doc id.
template <typename Scalar>
DeltaMatch delta_attribute(const DeltaProfile<Scalar>& unknown, std::span<const LabeledProfile<Scalar>> labeled) {
  if (labeled.empty()) throw UsageError("no labelled profiles to attribute against");
  const LabeledProfile<Scalar>* best = nullptr;
  Scalar best_delta = 0;
  std::string best_key;
  for (const auto& lp : labeled) {
    const Scalar d = burrows_delta(unknown, lp.profile);
    const std::string key = lp.profile.doc_id.str();
    if (!best || d < best_delta || (d == best_delta && key < best_key)) {
      best = &lp;
      best_delta = d;
      best_key = key;
    }
  }
  return {best->label, best->profile.doc_id, static_cast<double>(best_delta)};
}

/// `n_mfw,accuracy` rows followed by a `best` summary row.
void write_curve_csv(std::ostream& os, const AccuracyCurve& curve);
AccuracyCurve parse_curve_csv(std::string_view text);

/// Static SVG line chart of one or more curves (x = basis size, y = accuracy).
void write_curve_svg(std::ostream& os, std::span<const AccuracyCurve> curves);

}  // namespace stylemark::attribution
