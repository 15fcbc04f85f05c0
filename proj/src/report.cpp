#include "dnstrip/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>

#include "dnstrip/errors.hpp"

namespace dnstrip {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_json(const SweepReport& r) {
  using json = nlohmann::ordered_json;
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["scenario"] = r.scenario;
  j["theorem"] = r.theorem;
  j["columns"] = r.columns;
  json recs = json::array();
  for (const auto& row : r.records) {
    json obj = json::object();
    for (std::size_t c = 0; c < r.columns.size() && c < row.size(); ++c) {
      if (std::isfinite(row[c])) {
        obj[r.columns[c]] = row[c];
      } else {
        obj[r.columns[c]] = nullptr;
      }
    }
    recs.push_back(std::move(obj));
  }
  j["records"] = std::move(recs);
  if (r.has_fit) {
    j["fit"] = {{"exponent", r.fit.exponent}, {"intercept", r.fit.intercept}, {"residual", r.fit.residual}};
  } else {
    j["fit"] = nullptr;
  }
  j["verdict"] = r.verdict;
  j["criterion"] = r.criterion;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

void write_json(std::ostream& out, const SweepReport& report) { out << to_json(report); }

void write_csv(std::ostream& out, const SweepReport& r) {
  for (std::size_t c = 0; c < r.columns.size(); ++c) out << (c ? "," : "") << r.columns[c];
  out << "\n";
  for (const auto& row : r.records) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << "\n";
  }
}

namespace {

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') {
      o += "&lt;";
    } else if (c == '>') {
      o += "&gt;";
    } else if (c == '&') {
      o += "&amp;";
    } else {
      o += c;
    }
  }
  return o;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

void write_svg(std::ostream& out, const SweepReport& r, const PlotSpec& plot) {
  const auto col = [&](const std::string& name) -> std::ptrdiff_t {
    const auto it = std::find(r.columns.begin(), r.columns.end(), name);
    return it == r.columns.end() ? -1 : it - r.columns.begin();
  };
  const std::ptrdiff_t cx = col(plot.x_column);
  const std::ptrdiff_t cy = col(plot.y_column);
  if (cx < 0 || cy < 0) throw InvalidInput("write_svg: unknown plot column");

  std::vector<std::pair<double, double>> pts;
  for (const auto& row : r.records) {
    double x = row[cx];
    double y = row[cy];
    if (plot.log_log) {
      if (!(x > 0.0) || !(std::abs(y) > 0.0)) continue;
      x = std::log10(x);
      y = std::log10(std::abs(y));
    }
    if (std::isfinite(x) && std::isfinite(y)) pts.emplace_back(x, y);
  }

  const double W = 480, H = 360, ml = 70, mr = 20, mt = 40, mb = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!pts.empty()) {
    x0 = x1 = pts.front().first;
    y0 = y1 = pts.front().second;
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 - x0 < 1e-12) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y0))) {
    y0 -= 0.5 * std::max(1.0, std::abs(y0)) * 1e-3 + 0.5;
    y1 += 0.5 * std::max(1.0, std::abs(y1)) * 1e-3 + 0.5;
  }
  const double padx = 0.05 * (x1 - x0);
  const double pady = 0.08 * (y1 - y0);
  x0 -= padx;
  x1 += padx;
  y0 -= pady;
  y1 += pady;
  const auto X = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  const auto Y = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << " " << H << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"22\" font-family=\"sans-serif\" font-size=\"13\">" << esc(r.scenario) << " ("
      << esc(r.theorem) << ") " << (r.verdict ? "pass" : "fail") << "</text>\n";
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (W - ml - mr) << "\" height=\"" << (H - mt - mb)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    out << "<text x=\"" << num(X(xv)) << "\" y=\"" << num(H - mb + 16)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
        << tick(plot.log_log ? std::pow(10.0, xv) : xv) << "</text>\n";
    out << "<text x=\"" << num(ml - 4) << "\" y=\"" << num(Y(yv) + 3)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
        << tick(plot.log_log ? std::pow(10.0, yv) : yv) << "</text>\n";
  }
  out << "<text x=\"" << num((W + ml - mr) / 2) << "\" y=\"" << num(H - 12)
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << esc(plot.x_column)
      << (plot.log_log ? " (log)" : "") << "</text>\n";
  out << "<text x=\"14\" y=\"" << num((H - mb + mt) / 2) << "\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 14 " << num((H - mb + mt) / 2) << ")\" text-anchor=\"middle\">"
      << esc(plot.log_log ? "|" + plot.y_column + "| (log)" : plot.y_column) << "</text>\n";

  if (pts.size() >= 2) {
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out << (i ? " " : "") << num(X(pts[i].first)) << "," << num(Y(pts[i].second));
    }
    out << "\"/>\n";
  }
  for (const auto& [x, y] : pts) {
    out << "<circle cx=\"" << num(X(x)) << "\" cy=\"" << num(Y(y)) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  }
  if (plot.draw_fit && plot.log_log && r.has_fit && !pts.empty()) {
    const double a = x0 + padx;
    const double b = x1 - padx;
    const double ya = r.fit.intercept / std::log(10.0) + r.fit.exponent * a;
    const double yb = r.fit.intercept / std::log(10.0) + r.fit.exponent * b;
    out << "<line x1=\"" << num(X(a)) << "\" y1=\"" << num(Y(ya)) << "\" x2=\"" << num(X(b)) << "\" y2=\"" << num(Y(yb))
        << "\" stroke=\"#d62728\" stroke-dasharray=\"5,3\"/>\n";
    out << "<text x=\"" << num(W - mr - 4) << "\" y=\"" << num(mt + 14)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\" fill=\"#d62728\">slope "
        << tick(r.fit.exponent) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace dnstrip
