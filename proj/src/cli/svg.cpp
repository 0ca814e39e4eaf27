#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hjm/cli.hpp"
#include "hjm/moment.hpp"

namespace hjm {

const std::vector<std::string>& svg_element_whitelist() {
  static const std::vector<std::string> w{"svg", "g", "title", "rect", "line", "polyline", "polygon", "text"};
  return w;
}

namespace {

constexpr double kPanel = 400.0;
constexpr double kMargin = 30.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

class Writer {
 public:
  void open(const std::string& tag, const std::string& attrs) {
    check(tag);
    os_ << "<" << tag << (attrs.empty() ? "" : " ") << attrs << ">\n";
  }
  void close(const std::string& tag) { os_ << "</" << tag << ">\n"; }
  void leaf(const std::string& tag, const std::string& attrs) {
    check(tag);
    os_ << "<" << tag << " " << attrs << "/>\n";
  }
  void text(const std::string& tag, const std::string& attrs, const std::string& body) {
    check(tag);
    os_ << "<" << tag << (attrs.empty() ? "" : " ") << attrs << ">" << escape(body) << "</" << tag << ">\n";
  }
  std::string str() const { return os_.str(); }

 private:
  static void check(const std::string& tag) {
    const auto& w = svg_element_whitelist();
    if (std::find(w.begin(), w.end(), tag) == w.end())
      fail(ErrorKind::validation, "svg element not whitelisted: " + tag);
  }
  std::ostringstream os_;
};

void arrangement_panel(Writer& w, const LineFamily& fam) {
  // box covering every intercept
  double zmax = 0.0;
  for (const auto& c : fam.coeffs) zmax = std::max({zmax, 1.0 / c[0], 1.0 / c[1]});
  zmax *= 1.05;
  const double sc = (kPanel - 2 * kMargin) / zmax;
  auto X = [&](double z1) { return kMargin + z1 * sc; };
  auto Y = [&](double z2) { return kPanel - kMargin - z2 * sc; };

  w.open("g", "id=\"arrangement\"");
  w.text("title", "", "line arrangement, branch " + to_string(fam.branch));
  w.leaf("rect", "x=\"0\" y=\"0\" width=\"" + num(kPanel) + "\" height=\"" + num(kPanel) +
                     "\" fill=\"white\" stroke=\"none\"");
  w.leaf("line", "x1=\"" + num(X(0)) + "\" y1=\"" + num(Y(0)) + "\" x2=\"" + num(X(zmax)) + "\" y2=\"" +
                     num(Y(0)) + "\" stroke=\"black\"");
  w.leaf("line", "x1=\"" + num(X(0)) + "\" y1=\"" + num(Y(0)) + "\" x2=\"" + num(X(0)) + "\" y2=\"" +
                     num(Y(zmax)) + "\" stroke=\"black\"");
  if (fam.branch == Branch::positive_rho) {
    // image boundary z1 + z2 = 1/2 in rescaled coordinates
    w.leaf("line", "x1=\"" + num(X(0.5)) + "\" y1=\"" + num(Y(0)) + "\" x2=\"" + num(X(0)) + "\" y2=\"" +
                       num(Y(0.5)) + "\" stroke=\"gray\" stroke-dasharray=\"4,3\"");
  }
  for (std::size_t t = 0; t < fam.size(); ++t) {
    const auto& c = fam.coeffs[t];
    w.leaf("line", "x1=\"" + num(X(1.0 / c[0])) + "\" y1=\"" + num(Y(0)) + "\" x2=\"" + num(X(0)) +
                       "\" y2=\"" + num(Y(1.0 / c[1])) + "\" stroke=\"steelblue\" stroke-width=\"1.5\"");
    w.text("text",
           "x=\"" + num(X(1.0 / c[0]) + 2) + "\" y=\"" + num(Y(0) + 12) + "\" font-size=\"9\"",
           "t" + std::to_string(t + 1));
  }
  for (const auto& sp : enumerate_spectra(fam)) {
    try {
      const ChebyshevCell cell = chebyshev_center(fam, sp);
      w.text("text",
             "x=\"" + num(X(cell.center[0])) + "\" y=\"" + num(Y(cell.center[1])) +
                 "\" font-size=\"8\" text-anchor=\"middle\" fill=\"darkred\"",
             sp.str());
    } catch (const Error&) {
      // cell too thin to place a label
    }
  }
  w.close("g");
}

void tiling_panel(Writer& w, const RhombicTiling& til, const std::optional<Snake>& hl) {
  long long xmin = 0, xmax = 0, ymax = 1;
  for (const auto& s : til.snakes)
    for (const auto& v : s.vertices) {
      xmin = std::min(xmin, v[0]);
      xmax = std::max(xmax, v[0]);
      ymax = std::max(ymax, v[1]);
    }
  const double span = std::max<double>(xmax - xmin, ymax);
  const double sc = (kPanel - 2 * kMargin) / std::max(1.0, span);
  auto X = [&](long long x) { return kPanel + kMargin + (x - xmin) * sc; };
  auto Y = [&](long long y) { return kPanel - kMargin - y * sc; };
  auto pts = [&](auto begin, auto end) {
    std::string p;
    for (auto it = begin; it != end; ++it) {
      if (!p.empty()) p += ' ';
      p += num(X((*it)[0])) + "," + num(Y((*it)[1]));
    }
    return p;
  };

  w.open("g", "id=\"tiling\"");
  w.text("title", "", "rhombic tiling, word " + til.word.str());
  for (const auto& r : til.rhombi)
    w.leaf("polygon", "points=\"" + pts(r.vertices.begin(), r.vertices.end()) +
                          "\" fill=\"lightyellow\" stroke=\"black\" stroke-width=\"1\" class=\"rhombus\"");
  for (const auto& s : til.snakes)
    w.leaf("polyline", "points=\"" + pts(s.vertices.begin(), s.vertices.end()) +
                           "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\" class=\"snake\"");
  if (hl)
    w.leaf("polyline", "points=\"" + pts(hl->vertices.begin(), hl->vertices.end()) +
                           "\" fill=\"none\" stroke=\"crimson\" stroke-width=\"3\" class=\"highlight\"");
  w.close("g");
}

}  // namespace

std::string render_svg(const SvgInput& in) {
  Writer w;
  const double width = in.tiling ? 2 * kPanel : kPanel;
  w.open("svg", "xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width) +
                    "\" height=\"" + num(kPanel) + "\" viewBox=\"0 0 " + num(width) + " " + num(kPanel) + "\"");
  if (in.family) arrangement_panel(w, *in.family);
  if (in.tiling) tiling_panel(w, *in.tiling, in.highlight);
  w.close("svg");
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" + w.str();
}

}  // namespace hjm
