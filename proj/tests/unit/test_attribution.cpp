#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "stylemark/attribution.hpp"
#include "stylemark/synth.hpp"

using namespace stylemark;
using namespace stylemark::attribution;

namespace {

ContentCounts counts(std::initializer_list<std::pair<const char*, std::size_t>> items) {
  ContentCounts c{ContentCategory::Words, {}, 0, {}};
  for (const auto& [w, k] : items) {
    c.counts[w] = k;
    c.total += k;
  }
  return c;
}

// Plain-loop gradient descent written against the loss definition alone:
// L = (1/N) sum c_i [log(1 + e^s_i) - y_i s_i] + lambda/(2N) |w|^2.
struct NaiveFit {
  std::vector<double> w;
  double b = 0;
  int epochs = 0;
};

NaiveFit naive_fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y, double lambda, double lr,
                   int max_epochs, double tol, std::uint64_t seed) {
  const std::size_t n = X.size(), p = X[0].size();
  double pos = 0;
  for (double v : y) pos += v;
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = y[i] > 0.5 ? n / (2 * pos) : n / (2 * (n - pos));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> init(0.0, 0.01);
  NaiveFit f;
  f.w.resize(p);
  for (auto& v : f.w) v = init(rng);
  double previous = INFINITY;
  for (int e = 1; e <= max_epochs; ++e) {
    std::vector<double> gw(p, 0.0);
    double gb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = f.b;
      for (std::size_t j = 0; j < p; ++j) s += X[i][j] * f.w[j];
      const double r = c[i] * (1 / (1 + std::exp(-s)) - y[i]) / n;
      for (std::size_t j = 0; j < p; ++j) gw[j] += r * X[i][j];
      gb += r;
    }
    for (std::size_t j = 0; j < p; ++j) f.w[j] -= lr * (gw[j] + lambda / n * f.w[j]);
    f.b -= lr * gb;
    double loss = 0, w2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = f.b;
      for (std::size_t j = 0; j < p; ++j) s += X[i][j] * f.w[j];
      loss += c[i] * (std::log1p(std::exp(s)) - y[i] * s);
    }
    for (double v : f.w) w2 += v * v;
    loss = loss / n + lambda / (2 * n) * w2;
    f.epochs = e;
    if (std::abs(previous - loss) < tol) break;
    previous = loss;
  }
  return f;
}

}  // namespace

TEST_SUITE("attribution") {
  TEST_CASE("z-scores of two documents are -+1/sqrt2") {
    const std::vector<ContentCounts> docs{counts({{"a", 2}, {"b", 8}}), counts({{"a", 4}, {"b", 6}})};
    const auto basis = build_basis<double>(docs, ContentCategory::Words, 2);
    REQUIRE(basis.items == std::vector<std::string>{"b", "a"});
    const auto z0 = profile(DocId{"1", VariantId::HT}, docs[0], basis);
    CHECK(z0.z(1) == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-12));
    CHECK(z0.z(0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  }

  TEST_CASE("Burrows Delta is the mean absolute z difference") {
    Eigen::VectorXd a(2), b(2);
    a << 1, 1;
    b << -1, 0;
    CHECK(burrows_delta(a, b) == doctest::Approx(1.5));
    CHECK(burrows_delta(a, a) == 0.0);
    Eigen::VectorXd c(3);
    CHECK_THROWS_AS(burrows_delta(a, c), UsageError);
  }

  TEST_CASE("basis selection agrees with a brute-force ranking") {
    std::mt19937_64 rng(11);
    std::vector<ContentCounts> docs(6);
    for (auto& d : docs) {
      d.category = ContentCategory::Words;
      for (int w = 0; w < 40; ++w) {
        const std::size_t k = rng() % (1 + 400 / (w + 1));
        if (k) {
          d.counts["w" + std::to_string(w)] = k;
          d.total += k;
        }
      }
    }
    std::map<std::string, std::size_t> pooled;
    for (const auto& d : docs) {
      for (const auto& [w, k] : d.counts) pooled[w] += k;
    }
    std::vector<std::pair<std::string, std::size_t>> all(pooled.begin(), pooled.end());
    std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    const auto basis = build_basis<double>(docs, ContentCategory::Words, 15);
    REQUIRE(basis.items.size() == 15);
    for (std::size_t i = 0; i < 15; ++i) CHECK(basis.items[i] == all[i].first);

    // Column means and sample stds of the relative frequencies.
    for (std::size_t j = 0; j < 15; ++j) {
      std::vector<double> f;
      for (const auto& d : docs) {
        auto it = d.counts.find(basis.items[j]);
        f.push_back(it == d.counts.end() ? 0.0 : double(it->second) / double(d.total));
      }
      double m = 0;
      for (double v : f) m += v;
      m /= f.size();
      double ss = 0;
      for (double v : f) ss += (v - m) * (v - m);
      CHECK(basis.mean(Eigen::Index(j)) == doctest::Approx(m).epsilon(1e-12));
      CHECK(basis.std(Eigen::Index(j)) == doctest::Approx(std::sqrt(ss / (f.size() - 1))).epsilon(1e-12));
    }
  }

  TEST_CASE("basis edge cases") {
    const std::vector<ContentCounts> flat{counts({{"a", 1}, {"b", 1}}), counts({{"a", 2}, {"b", 2}})};
    CHECK_THROWS_AS(build_basis<double>(flat, ContentCategory::Words, 2), DataError);
    const std::vector<ContentCounts> mixed{counts({{"a", 1}, {"b", 1}, {"c", 2}}), counts({{"a", 2}, {"b", 2}, {"c", 1}})};
    const auto b = build_basis<double>(mixed, ContentCategory::Words, 10);
    CHECK(b.items.size() == 3);
    CHECK_FALSE(b.warnings.empty());  // fewer items than requested
    CHECK_THROWS_AS(build_basis<double>(mixed, ContentCategory::Words, 0), UsageError);
    CHECK_THROWS_AS(build_basis<double>(std::span(mixed.data(), 1), ContentCategory::Words, 2), DataError);
  }

  TEST_CASE("gradient matches central differences") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    Eigen::MatrixXd X(12, 4);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = g(rng);
    Eigen::VectorXd y(12);
    for (Eigen::Index i = 0; i < 12; ++i) y(i) = i % 3 == 0 ? 1 : 0;
    const Eigen::VectorXd c = balanced_weights<double>(y);
    CHECK(c.sum() == doctest::Approx(12.0));
    Eigen::VectorXd w(4);
    for (auto& v : w) v = g(rng);
    const double b = 0.3, lambda = 0.7, h = 1e-6;
    const auto [gw, gb] = logistic_gradient(X, y, c, w, b, lambda);
    for (Eigen::Index j = 0; j < 4; ++j) {
      Eigen::VectorXd up = w, down = w;
      up(j) += h;
      down(j) -= h;
      const double fd = (logistic_loss(X, y, c, up, b, lambda) - logistic_loss(X, y, c, down, b, lambda)) / (2 * h);
      CHECK(gw(j) == doctest::Approx(fd).epsilon(1e-6));
    }
    const double fdb = (logistic_loss(X, y, c, w, b + h, lambda) - logistic_loss(X, y, c, w, b - h, lambda)) / (2 * h);
    CHECK(gb == doctest::Approx(fdb).epsilon(1e-6));
  }

  TEST_CASE("fit matches naive gradient descent in both primal and dual form") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    for (auto [n, p] : {std::pair{10, 3}, std::pair{6, 25}}) {
      CAPTURE(p);
      Eigen::MatrixXd X(n, p);
      std::vector<std::vector<double>> rows(n, std::vector<double>(p));
      Eigen::VectorXd y(n);
      std::vector<double> ys(n);
      for (int i = 0; i < n; ++i) {
        y(i) = ys[i] = i % 2;
        for (int j = 0; j < p; ++j) X(i, j) = rows[i][j] = g(rng) + (i % 2 ? 0.4 : -0.4);
      }
      LogRegHyper hyper;
      hyper.max_epochs = 800;
      const auto model = fit_logreg<double>(X, y, hyper, 42);
      const auto oracle = naive_fit(rows, ys, hyper.l2_lambda, hyper.learning_rate, hyper.max_epochs,
                                    hyper.tolerance, 42);
      CHECK(model.epochs == oracle.epochs);
      CHECK(model.bias == doctest::Approx(oracle.b).epsilon(1e-9));
      for (int j = 0; j < p; ++j) CHECK(model.weights(j) == doctest::Approx(oracle.w[j]).epsilon(1e-9));
    }
  }

  TEST_CASE("separable data is learned") {
    Eigen::MatrixXd X(4, 1);
    X << -2, -1, 1, 2;
    Eigen::VectorXd y(4);
    y << 0, 0, 1, 1;
    const auto m = fit_logreg<double>(X, y, LogRegHyper{}, 1);
    CHECK(m.weights(0) > 0);
    Eigen::VectorXd z(1);
    z << 3;
    CHECK(classify(m, z).label == Authorship::Machine);
    z << -3;
    CHECK(classify(m, z).label == Authorship::Human);
    Eigen::VectorXd one_class = Eigen::VectorXd::Ones(4);
    CHECK_THROWS_AS(fit_logreg<double>(X, one_class, LogRegHyper{}, 1), DataError);
  }

  TEST_CASE("nearest-profile attribution breaks ties by document id") {
    DeltaProfile<double> u{{"u", VariantId::HT}, Eigen::VectorXd::Zero(2)};
    Eigen::VectorXd z1(2), z2(2);
    z1 << 1, 0;
    z2 << 0, -1;
    const std::vector<LabeledProfile<double>> labeled{{{{"b", VariantId::S2S}, z1}, Authorship::Machine},
                                                      {{{"a", VariantId::HT}, z2}, Authorship::Human}};
    const auto m = delta_attribute<double>(u, labeled);
    CHECK(m.nearest.book_id == "a");
    CHECK(m.label == Authorship::Human);
    CHECK(m.delta == doctest::Approx(0.5));
  }

  TEST_CASE("sweep is deterministic and separates a marked corpus") {
    synth::SynthConfig cfg;
    cfg.books = 8;
    cfg.words_per_doc = 1500;
    cfg.marker_boost = 3.0;
    cfg.seed = 3;
    const auto corpus = synth::generate_corpus(cfg);
    FeatureConfig fc;
    fc.categories = {ContentCategory::Nouns};
    const auto docs = assemble_docs(corpus).docs;
    const auto ex = extract_all(docs, fc);
    std::vector<std::pair<DocId, ContentCounts>> content;
    for (const auto& v : ex.vectors) content.emplace_back(v.doc_id, v.content.at(ContentCategory::Nouns));
    const auto a = mfw_sweep<double>(content, ContentCategory::Nouns, {200, 100, 100}, LogRegHyper{}, 0, 1);
    const auto b = mfw_sweep<double>(content, ContentCategory::Nouns, {100, 200}, LogRegHyper{}, 0, 2);
    REQUIRE(a.points.size() == 2);
    CHECK(a.points == b.points);
    CHECK(a.best == b.best);
    CHECK(a.best.second >= 0.9);

    std::ostringstream os;
    write_curve_csv(os, a);
    const auto back = parse_curve_csv(os.str());
    CHECK(back.points == a.points);
    CHECK(back.best == a.best);
    CHECK(back.category == ContentCategory::Nouns);
  }
}
