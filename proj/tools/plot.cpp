#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lifespan/csv.hpp"

namespace lifespan::tools {
namespace {

struct Panel {
  double x0, y0, w, h;
  double xmin, xmax, ymin, ymax;
  bool logy;

  double px(double x) const { return x0 + w * (std::log(x) - std::log(xmin)) / (std::log(xmax) - std::log(xmin)); }
  double py(double y) const {
    const double a = logy ? (std::log(y) - std::log(ymin)) / (std::log(ymax) - std::log(ymin))
                          : (y - ymin) / (ymax - ymin);
    return y0 + h * (1.0 - a);
  }
};

void axes(std::ostringstream& os, const Panel& p, const std::string& title, const std::string& ylabel) {
  os << "<rect x='" << p.x0 << "' y='" << p.y0 << "' width='" << p.w << "' height='" << p.h
     << "' fill='none' stroke='#444'/>\n";
  os << "<text x='" << p.x0 + p.w / 2 << "' y='" << p.y0 - 10 << "' text-anchor='middle'>" << title << "</text>\n";
  os << "<text x='" << p.x0 + p.w / 2 << "' y='" << p.y0 + p.h + 36 << "' text-anchor='middle'>eps</text>\n";
  os << "<text x='" << p.x0 - 48 << "' y='" << p.y0 + p.h / 2 << "' text-anchor='middle' transform='rotate(-90 "
     << p.x0 - 48 << ' ' << p.y0 + p.h / 2 << ")'>" << ylabel << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = std::exp(std::log(p.xmin) + k * (std::log(p.xmax) - std::log(p.xmin)) / 4.0);
    os << "<text x='" << p.px(x) << "' y='" << p.y0 + p.h + 16 << "' text-anchor='middle' font-size='11'>"
       << format_double(std::round(x * 1000.0) / 1000.0) << "</text>\n";
    const double y = p.logy ? std::exp(std::log(p.ymin) + k * (std::log(p.ymax) - std::log(p.ymin)) / 4.0)
                            : p.ymin + k * (p.ymax - p.ymin) / 4.0;
    os << "<text x='" << p.x0 - 6 << "' y='" << p.py(y) + 4 << "' text-anchor='end' font-size='11'>"
       << format_double(std::round(y * 1000.0) / 1000.0) << "</text>\n";
  }
}

}  // namespace

std::string render_sweep_svg(const std::vector<LifespanRecord>& records, double expected_slope) {
  std::vector<const LifespanRecord*> rows;
  for (const auto& r : records) {
    if (std::isfinite(r.T_num) && r.T_num > 0.0) rows.push_back(&r);
  }
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='900' height='380' font-family='sans-serif' font-size='13'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  if (rows.empty()) {
    os << "<text x='450' y='190' text-anchor='middle'>no finite life spans to plot</text>\n</svg>\n";
    return os.str();
  }
  double emin = rows[0]->eps, emax = emin, tmin = rows[0]->T_num, tmax = tmin, smin = rows[0]->scaled, smax = smin;
  for (const auto* r : rows) {
    emin = std::min(emin, r->eps);
    emax = std::max(emax, r->eps);
    tmin = std::min(tmin, r->T_num);
    tmax = std::max(tmax, r->T_num);
    smin = std::min(smin, r->scaled);
    smax = std::max(smax, r->scaled);
  }
  const double bound = rows[0]->bound_const;
  if (std::isfinite(bound)) {
    smin = std::min(smin, bound);
    smax = std::max(smax, bound);
  }
  if (emin == emax) {
    emin *= 0.9;
    emax *= 1.1;
  }
  const Panel left{70, 40, 340, 280, emin / 1.1, emax * 1.1, tmin / 1.5, tmax * 1.5, true};
  const Panel right{530, 40, 340, 280, emin / 1.1, emax * 1.1, 0.9 * smin, 1.1 * smax, false};
  axes(os, left, "life span", "T_num");
  axes(os, right, "scaled life span", "eps^a T_num");

  // Reference line with the theorem's slope through the smallest-eps point.
  const LifespanRecord* anchor = *std::min_element(rows.begin(), rows.end(), [](auto a, auto b) { return a->eps < b->eps; });
  const auto ref = [&](double e) { return anchor->T_num * std::pow(e / anchor->eps, expected_slope); };
  os << "<line x1='" << left.px(left.xmin) << "' y1='" << left.py(std::clamp(ref(left.xmin), left.ymin, left.ymax))
     << "' x2='" << left.px(left.xmax) << "' y2='" << left.py(std::clamp(ref(left.xmax), left.ymin, left.ymax))
     << "' stroke='#999' stroke-dasharray='5,4'/>\n";
  if (std::isfinite(bound)) {
    os << "<line x1='" << right.x0 << "' y1='" << right.py(bound) << "' x2='" << right.x0 + right.w << "' y2='"
       << right.py(bound) << "' stroke='#c33' stroke-dasharray='5,4'/>\n";
  }
  for (const auto* r : rows) {
    os << "<circle cx='" << left.px(r->eps) << "' cy='" << left.py(r->T_num) << "' r='4' fill='#236'/>\n";
    os << "<circle cx='" << right.px(r->eps) << "' cy='" << right.py(r->scaled) << "' r='4' fill='#236'/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace lifespan::tools
