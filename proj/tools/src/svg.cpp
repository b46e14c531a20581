#include "svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "electrogp/error.hpp"

namespace electrogp::cli {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 640.0;
constexpr double kPad = 40.0;  // room for tick labels

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string render_svg(const Eigen::MatrixXd& points, const Eigen::MatrixXd& curve, double rho) {
  if (points.cols() != 2 || curve.cols() != 2)
    throw ValidationError("plot: only planar (d=2) data can be plotted; use the CSV exports instead");
  if (curve.rows() < 2) throw ValidationError("plot: curve needs at least two vertices");
  if (!(rho >= 0.0)) throw ValidationError("plot: band radius must be non-negative");

  Eigen::Vector2d lo = curve.colwise().minCoeff().transpose().array() - rho;
  Eigen::Vector2d hi = curve.colwise().maxCoeff().transpose().array() + rho;
  if (points.rows() > 0) {
    lo = lo.cwiseMin(points.colwise().minCoeff().transpose());
    hi = hi.cwiseMax(points.colwise().maxCoeff().transpose());
  }
  Eigen::Vector2d range = hi - lo;
  for (int k = 0; k < 2; ++k) {
    if (!(range[k] > 0.0)) {
      lo[k] -= 0.5;
      range[k] = 1.0;
    }
  }
  lo -= 0.05 * range;
  range *= 1.1;
  hi = lo + range;

  const double scale = std::min((kWidth - 2 * kPad) / range[0], (kHeight - 2 * kPad) / range[1]);
  const double off_x = kPad + 0.5 * ((kWidth - 2 * kPad) - scale * range[0]);
  const double off_y = kPad + 0.5 * ((kHeight - 2 * kPad) - scale * range[1]);
  auto px = [&](double x) { return off_x + scale * (x - lo[0]); };
  auto py = [&](double y) { return kHeight - off_y - scale * (y - lo[1]); };

  std::ostringstream curve_pts, tube;
  for (Eigen::Index i = 0; i < curve.rows(); ++i) {
    const std::string x = num(px(curve(i, 0))), y = num(py(curve(i, 1)));
    curve_pts << (i ? " " : "") << x << ',' << y;
    tube << (i ? " L" : "M") << x << ',' << y;
  }

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << "  <rect x=\"" << num(px(lo[0])) << "\" y=\"" << num(py(hi[1])) << "\" width=\"" << num(scale * range[0])
      << "\" height=\"" << num(scale * range[1]) << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";

  // Axis extents at the frame corners.
  svg << "  <g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444444\">\n"
      << "    <text x=\"" << num(px(lo[0])) << "\" y=\"" << num(py(lo[1]) + 14) << "\">" << label(lo[0]) << "</text>\n"
      << "    <text x=\"" << num(px(hi[0])) << "\" y=\"" << num(py(lo[1]) + 14) << "\" text-anchor=\"end\">"
      << label(hi[0]) << "</text>\n"
      << "    <text x=\"" << num(px(lo[0]) - 4) << "\" y=\"" << num(py(lo[1])) << "\" text-anchor=\"end\">"
      << label(lo[1]) << "</text>\n"
      << "    <text x=\"" << num(px(lo[0]) - 4) << "\" y=\"" << num(py(hi[1]) + 10) << "\" text-anchor=\"end\">"
      << label(hi[1]) << "</text>\n"
      << "  </g>\n";

  svg << "  <path class=\"band\" d=\"" << tube.str() << "\" fill=\"none\" stroke=\"#9ecae1\" stroke-opacity=\"0.6\""
      << " stroke-width=\"" << num(2.0 * rho * scale) << "\" stroke-linecap=\"round\" stroke-linejoin=\"round\"/>\n";
  svg << "  <polyline class=\"curve\" points=\"" << curve_pts.str()
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

  svg << "  <g class=\"points\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1\">\n";
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double x = px(points(i, 0)), y = py(points(i, 1));
    svg << "    <polygon points=\"" << num(x) << ',' << num(y - 4) << ' ' << num(x - 3.5) << ',' << num(y + 2)
        << ' ' << num(x + 3.5) << ',' << num(y + 2) << "\"/>\n";
  }
  svg << "  </g>\n</svg>\n";
  return svg.str();
}

}  // namespace electrogp::cli
