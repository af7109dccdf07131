#include "stylemark/attribution.hpp"

#include <cstdio>
#include <ostream>

#include "stylemark/csv.hpp"

namespace stylemark::attribution {

template FeatureBasis<double> build_basis<double>(std::span<const ContentCounts>, ContentCategory, std::size_t);
template LogRegModel<double> fit_logreg<double>(const Matrix<double>&, const Vector<double>&, const LogRegHyper&,
                                                std::uint64_t, const Matrix<double>*);
template CvResult cross_validate<double>(const LabeledDataset<double>&, const LogRegHyper&, std::uint64_t);
template AccuracyCurve mfw_sweep<double>(std::span<const std::pair<DocId, ContentCounts>>, ContentCategory,
                                         std::vector<std::size_t>, const LogRegHyper&, std::uint64_t, unsigned);

void write_curve_csv(std::ostream& os, const AccuracyCurve& curve) {
  const std::string category(to_string(curve.category));
  os << "row,category,n_mfw,accuracy\n";
  for (const auto& [n, acc] : curve.points) {
    os << csv::join({"point", category, std::to_string(n), csv::format_real(acc)}) << '\n';
  }
  os << csv::join({"best", category, std::to_string(curve.best.first), csv::format_real(curve.best.second)}) << '\n';
}

AccuracyCurve parse_curve_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows.front() != csv::Row{"row", "category", "n_mfw", "accuracy"}) {
    throw DataError("accuracy curve: missing header row,category,n_mfw,accuracy");
  }
  AccuracyCurve curve;
  bool have_best = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 4) throw DataError("accuracy curve row " + std::to_string(i + 1) + ": expected 4 fields");
    curve.category = parse_category(r[1]);
    std::pair<std::size_t, double> point;
    try {
      point = {std::stoul(r[2]), std::stod(r[3])};
    } catch (const std::exception&) {
      throw DataError("accuracy curve row " + std::to_string(i + 1) + ": bad number");
    }
    if (r[0] == "point") {
      curve.points.push_back(point);
    } else if (r[0] == "best") {
      curve.best = point;
      have_best = true;
    } else {
      throw DataError("accuracy curve row " + std::to_string(i + 1) + ": unknown row kind '" + r[0] + "'");
    }
  }
  if (curve.points.empty() || !have_best) throw DataError("accuracy curve has no points or no best row");
  return curve;
}

void write_curve_svg(std::ostream& os, std::span<const AccuracyCurve> curves) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 150, kTop = 20, kBottom = 50;
  constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
                                     "#7f7f7f"};
  std::size_t x_min = 0, x_max = 0;
  for (const auto& c : curves) {
    for (const auto& [n, _] : c.points) {
      x_min = x_min == 0 ? n : std::min(x_min, n);
      x_max = std::max(x_max, n);
    }
  }
  if (x_max == x_min) ++x_max;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;
  const auto px = [&](double n) { return kLeft + (n - static_cast<double>(x_min)) / static_cast<double>(x_max - x_min) * plot_w; };
  const auto py = [&](double acc) { return kTop + (1.0 - acc) * plot_h; };
  char buf[256];

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int t = 0; t <= 10; ++t) {
    const double y = py(t / 10.0);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.1f</text>\n",
                  kLeft, y, kLeft + plot_w, y, kLeft - 6, y + 4, t / 10.0);
    os << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n",
                kLeft, py(0.5), kLeft + plot_w, py(0.5));
  os << buf;
  if (!curves.empty()) {
    for (const auto& [n, _] : curves.front().points) {
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%zu</text>\n",
                    px(static_cast<double>(n)), kTop + plot_h + 16, n);
      os << buf;
    }
  }
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                kTop, plot_w, plot_h);
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">number of most frequent items</text>\n",
                kLeft + plot_w / 2, kH - 10);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"14\" y=\"%.1f\" text-anchor=\"middle\" transform=\"rotate(-90 14 %.1f)\">balanced accuracy</text>\n",
                kTop + plot_h / 2, kTop + plot_h / 2);
  os << buf;

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [n, acc] : curves[i].points) {
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(static_cast<double>(n)), py(acc));
      os << buf;
    }
    os << "\"/>\n";
    for (const auto& [n, acc] : curves[i].points) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n",
                    px(static_cast<double>(n)), py(acc), color);
      os << buf;
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(i);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\">%s</text>\n",
                  kW - kRight + 12, ly, kW - kRight + 32, ly, color, kW - kRight + 38, ly + 4,
                  std::string(to_string(curves[i].category)).c_str());
    os << buf;
  }
  os << "</svg>\n";
}

}  // namespace stylemark::attribution
