#include "annimpute/analysis/report_html.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "annimpute/core/dataset.hpp"

namespace annimpute::analysis {

namespace {

constexpr std::array<const char*, 10> kPalette{"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                               "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
                                               "#9c755f", "#bab0ac"};

std::string fixed(double value, int digits) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string percent_bp(int bp) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%d.%02d%%", bp / 100, bp % 100);
  return buf;
}

struct Series {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

std::string svg_scatter(const std::vector<Series>& series, std::string_view x_label,
                        std::string_view y_label) {
  constexpr double kSize = 320.0;
  constexpr double kPad = 36.0;
  double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (first) {
        x_lo = x_hi = x;
        y_lo = y_hi = y;
        first = false;
      }
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (x_hi - x_lo < 1e-12) {
    x_lo -= 1.0;
    x_hi += 1.0;
  }
  if (y_hi - y_lo < 1e-12) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }
  const double inner = kSize - 2 * kPad;
  auto px = [&](double x) { return kPad + (x - x_lo) / (x_hi - x_lo) * inner; };
  auto py = [&](double y) { return kSize - kPad - (y - y_lo) / (y_hi - y_lo) * inner; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"320\" height=\"320\" viewBox=\"0 0 320 320\">\n";
  out << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << inner << "\" height=\"" << inner
      << "\" fill=\"none\" stroke=\"#999\"/>\n";
  out << "<text x=\"160\" y=\"314\" text-anchor=\"middle\" font-size=\"11\">" << escape(x_label)
      << " [" << fixed(x_lo, 2) << ", " << fixed(x_hi, 2) << "]</text>\n";
  out << "<text x=\"12\" y=\"160\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 12 160)\">"
      << escape(y_label) << " [" << fixed(y_lo, 2) << ", " << fixed(y_hi, 2) << "]</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double x = kPad + 6 + 90.0 * static_cast<double>(k);
    out << "<circle cx=\"" << fixed(x, 2) << "\" cy=\"10.00\" r=\"4\" fill=\"" << series[k].color
        << "\"/><text x=\"" << fixed(x + 8, 2) << "\" y=\"14.00\" font-size=\"11\">"
        << escape(series[k].name) << "</text>\n";
  }
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      out << "<circle cx=\"" << fixed(px(x), 2) << "\" cy=\"" << fixed(py(y), 2)
          << "\" r=\"3\" fill=\"" << s.color << "\" fill-opacity=\"0.7\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

void write_bar_row(std::ostringstream& out, std::string_view source,
                   const std::vector<double>& dist, const LabelSchema& schema,
                   const std::string& kl_cell) {
  const auto widths = bar_widths_bp(dist);
  out << "<tr><th>" << escape(source) << "</th><td><div class=\"bar\">";
  for (std::size_t k = 0; k < widths.size(); ++k) {
    if (widths[k] == 0) continue;
    const int label = schema.label_at(k);
    out << "<span class=\"seg\" style=\"width:" << percent_bp(widths[k])
        << ";background:" << label_color(k, widths.size()) << "\" title=\"" << escape(schema.display(label))
        << "\"></span>";
  }
  out << "</div></td><td class=\"props\">";
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (k > 0) out << " &middot; ";
    out << escape(schema.display(schema.label_at(k))) << ": " << format_real(dist[k]);
  }
  out << "</td><td class=\"kl\">" << kl_cell << "</td></tr>\n";
}

}  // namespace

std::vector<int> bar_widths_bp(const std::vector<double>& proportions) {
  constexpr int kTotal = 10000;
  const std::size_t k = proportions.size();
  std::vector<int> out(k, 0);
  if (k == 0) return out;
  double sum = 0.0;
  for (double p : proportions) sum += std::max(0.0, p);
  if (sum <= 0.0) {
    out[0] = kTotal;
    return out;
  }
  std::vector<double> remainder(k);
  int used = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double exact = std::max(0.0, proportions[c]) / sum * kTotal;
    out[c] = static_cast<int>(std::floor(exact));
    remainder[c] = exact - out[c];
    used += out[c];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  // Floors never overshoot, so only increments are needed.
  for (std::size_t r = 0; used < kTotal; r = (r + 1) % k) {
    ++out[order[r]];
    ++used;
  }
  return out;
}

std::string label_color(std::size_t index, std::size_t num_labels) {
  if (num_labels <= kPalette.size()) return kPalette[index];
  const long hue = std::lround(360.0 * static_cast<double>(index) / static_cast<double>(num_labels));
  return "hsl(" + std::to_string(hue) + ",60%,55%)";
}

std::string render_report_html(const ReportData& data) {
  const LabelSchema& schema = data.schema;
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>"
      << escape(data.title) << "</title>\n<style>\n"
      << "body{font-family:sans-serif;margin:2em;color:#222}\n"
      << "table{border-collapse:collapse;margin:0.5em 0}\n"
      << "th,td{padding:2px 8px;text-align:left;vertical-align:middle}\n"
      << ".bar{display:flex;width:480px;height:18px;border:1px solid #666}\n"
      << ".seg{display:block;height:100%}\n"
      << ".props{font-size:12px;color:#444}\n"
      << ".example{border-top:1px solid #ccc;padding-top:0.5em}\n"
      << ".swatch{display:inline-block;width:12px;height:12px;margin:0 4px 0 12px}\n"
      << ".empty{font-style:italic}\n"
      << "</style>\n</head>\n<body>\n<h1>" << escape(data.title) << "</h1>\n";

  out << "<section id=\"legend\"><h2>Labels</h2><p>";
  for (int k = 0; k < schema.num_labels(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const int label = schema.label_at(idx);
    out << "<span class=\"swatch\" style=\"background:"
        << label_color(idx, static_cast<std::size_t>(schema.num_labels())) << "\"></span>"
        << escape(schema.display(label));
    if (idx < schema.label_names.size()) out << " (" << escape(schema.label_names[idx]) << ")";
  }
  out << "</p></section>\n";

  if (!data.aggregate.empty() || !data.deltas.empty()) {
    out << "<section id=\"summary\"><h2>Summary</h2>\n";
    if (!data.aggregate.empty()) {
      out << "<table class=\"aggregate\"><tr><th>Method</th><th>Mean divergence</th><th>Std</th></tr>\n";
      for (const auto& a : data.aggregate) {
        out << "<tr><td>" << escape(a.method) << "</td><td>" << fixed(a.mean, 4) << "</td><td>"
            << fixed(a.std, 4) << "</td></tr>\n";
      }
      out << "</table>\n";
    }
    if (!data.deltas.empty()) {
      out << "<table class=\"deltas\"><tr><th>Method</th><th>Avg variance change</th>"
             "<th>Avg disagreement change</th></tr>\n";
      for (const auto& [method, d] : data.deltas) {
        out << "<tr><td>" << escape(method) << "</td><td>" << fixed(d.avg_variance_change, 4)
            << "</td><td>" << fixed(d.avg_disagreement_change, 4) << "</td></tr>\n";
      }
      out << "</table>\n";
    }
    out << "</section>\n";
  }

  out << "<section id=\"examples\"><h2>Examples</h2>\n";
  if (data.records.empty()) {
    out << "<p class=\"empty\">No records to display.</p>\n";
  }
  for (const auto& rec : data.records) {
    out << "<div class=\"example\" id=\"item-" << rec.item << "\"><h3>Example " << rec.item << "</h3>\n";
    if (rec.item < data.texts.size()) {
      out << "<p class=\"text\">" << escape(data.texts[rec.item]) << "</p>\n";
    }
    out << "<table class=\"bars\">\n";
    write_bar_row(out, "Original", rec.original, schema, "");
    for (std::size_t m = 0; m < rec.imputed_by_method.size(); ++m) {
      const auto& [method, dist] = rec.imputed_by_method[m];
      std::string kl;
      if (m < rec.kl_by_method.size()) {
        kl = "KL " + fixed(rec.kl_by_method[m].second, 4);
        if (method == rec.best_method) kl = "<b>" + kl + "</b>";
      }
      write_bar_row(out, method, dist, schema, kl);
    }
    out << "</table></div>\n";
  }
  out << "</section>\n";

  if (!data.pca_panels.empty()) {
    out << "<section id=\"pca\"><h2>PCA projection</h2>\n";
    for (const auto& [name, pca] : data.pca_panels) {
      Series s{name, kPalette[0], {}};
      for (std::size_t i = 0; i < pca.coordinates.rows(); ++i) {
        s.points.emplace_back(pca.coordinates(i, 0), pca.coordinates(i, 1));
      }
      out << "<figure><figcaption>" << escape(name);
      if (pca.degenerate) out << " (no variance)";
      out << "</figcaption>\n" << svg_scatter({s}, "PC1", "PC2") << "</figure>\n";
    }
    out << "</section>\n";
  }

  if (!data.deltas.empty()) {
    out << "<section id=\"variance\"><h2>Variance and disagreement</h2>\n";
    for (const auto& [method, d] : data.deltas) {
      Series before{"original", kPalette[9], {}};
      Series after{method, kPalette[0], {}};
      for (const auto& item : d.per_item) {
        before.points.emplace_back(item.variance_before, item.disagreement_before);
        after.points.emplace_back(item.variance_after, item.disagreement_after);
      }
      out << "<figure><figcaption>" << escape(method) << "</figcaption>\n"
          << svg_scatter({before, after}, "variance", "disagreement rate") << "</figure>\n";
    }
    out << "</section>\n";
  }

  out << "</body>\n</html>\n";
  return out.str();
}

}  // namespace annimpute::analysis
