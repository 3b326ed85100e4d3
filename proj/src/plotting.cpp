#include "cpsor/plotting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "cpsor/text_format.hpp"

namespace cpsor::plot {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 450.0;
constexpr double kMargin = 50.0;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(const std::string& title) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";
  return out.str();
}

void sort_bars(std::vector<Bar>& bars) {
  std::sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) {
    return std::tie(a.group, a.series) < std::tie(b.group, b.series);
  });
}

}  // namespace

std::string bars_svg(std::vector<Bar> bars, const std::string& title) {
  sort_bars(bars);
  std::set<std::string> group_set, series_set;
  double vmax = 0.0;
  for (const auto& b : bars) {
    if (!std::isfinite(b.value) || b.value < 0.0) throw std::invalid_argument("bar values must be finite and >= 0");
    group_set.insert(b.group);
    series_set.insert(b.series);
    vmax = std::max(vmax, b.value);
  }
  if (vmax == 0.0) vmax = 1.0;
  const std::vector<std::string> groups(group_set.begin(), group_set.end());
  const std::vector<std::string> series(series_set.begin(), series_set.end());
  std::map<std::string, std::size_t> gi, si;
  for (std::size_t i = 0; i < groups.size(); ++i) gi[groups[i]] = i;
  for (std::size_t i = 0; i < series.size(); ++i) si[series[i]] = i;

  std::ostringstream out;
  out << header(title);
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin - 20;
  const double base = kHeight - kMargin;
  out << "<line x1=\"" << kMargin << "\" y1=\"" << base << "\" x2=\"" << kWidth - kMargin << "\" y2=\"" << base
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << px(base - plot_h) << "\" text-anchor=\"end\" font-size=\"10\">"
      << format_number(vmax, 4) << "</text>\n";
  if (!groups.empty()) {
    const double group_w = plot_w / static_cast<double>(groups.size());
    const double bar_w = group_w * 0.8 / static_cast<double>(series.size());
    for (const auto& b : bars) {
      const double x = kMargin + group_w * static_cast<double>(gi[b.group]) + group_w * 0.1 +
                       bar_w * static_cast<double>(si[b.series]);
      const double h = plot_h * b.value / vmax;
      out << "<rect x=\"" << px(x) << "\" y=\"" << px(base - h) << "\" width=\"" << px(bar_w) << "\" height=\""
          << px(h) << "\" fill=\"" << kPalette[si[b.series] % std::size(kPalette)] << "\"><title>" << escape(b.group)
          << ' ' << escape(b.series) << ' ' << format_number(b.value, 6) << "</title></rect>\n";
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      out << "<text x=\"" << px(kMargin + group_w * (g + 0.5)) << "\" y=\"" << px(base + 14)
          << "\" text-anchor=\"middle\" font-size=\"10\">" << escape(groups[g]) << "</text>\n";
    }
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = kMargin + 14.0 * static_cast<double>(s);
    out << "<rect x=\"" << px(kWidth - kMargin - 90) << "\" y=\"" << px(y - 9) << "\" width=\"10\" height=\"10\" fill=\""
        << kPalette[s % std::size(kPalette)] << "\"/>";
    out << "<text x=\"" << px(kWidth - kMargin - 75) << "\" y=\"" << px(y) << "\" font-size=\"11\">"
        << escape(series[s]) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string bars_csv(std::vector<Bar> bars) {
  sort_bars(bars);
  std::ostringstream out;
  out << "group,series,value\n";
  for (const auto& b : bars) out << b.group << ',' << b.series << ',' << format_number(b.value, 9) << '\n';
  return out.str();
}

std::vector<Polyline> trajectory_series(Polyline history, Polyline truth, std::vector<Polyline> predictions) {
  std::sort(predictions.begin(), predictions.end(),
            [](const Polyline& a, const Polyline& b) { return a.name < b.name; });
  std::vector<Polyline> out;
  out.push_back(std::move(history));
  out.push_back(std::move(truth));
  for (auto& p : predictions) out.push_back(std::move(p));
  return out;
}

std::string trajectory_svg(const std::vector<Polyline>& series, const std::string& title) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument("trajectory points must be finite");
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) xmin = xmax = ymin = ymax = 0.0;
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin - 20;
  const double span = std::max({xmax - xmin, (ymax - ymin) * plot_w / plot_h, 1.0});
  const double scale = plot_w / span;
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  auto sx = [&](double x) { return kWidth / 2 + (x - cx) * scale; };
  auto sy = [&](double y) { return kMargin + 20 + plot_h / 2 - (y - cy) * scale; };  // +y up

  std::ostringstream out;
  out << header(title);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = i == 0 ? "#7f7f7f" : i == 1 ? "#000000" : kPalette[(i - 2) % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (i == 1 ? " stroke-dasharray=\"6 3\"" : "") << " data-name=\"" << escape(s.name) << "\" points=\"";
    for (std::size_t k = 0; k < s.points.size(); ++k) {
      out << (k ? " " : "") << px(sx(s.points[k].first)) << ',' << px(sy(s.points[k].second));
    }
    out << "\"/>\n";
    out << "<text x=\"" << px(kMargin) << "\" y=\"" << px(kMargin + 14.0 * i) << "\" font-size=\"11\" fill=\"" << color
        << "\">" << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string trajectory_csv(const std::vector<Polyline>& series) {
  std::ostringstream out;
  out << "series,index,x,y\n";
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.points.size(); ++k) {
      out << s.name << ',' << k << ',' << format_number(s.points[k].first, 9) << ','
          << format_number(s.points[k].second, 9) << '\n';
    }
  }
  return out.str();
}

}  // namespace cpsor::plot
