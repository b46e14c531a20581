#pragma once

#include <string>

#include <Eigen/Core>

namespace electrogp::cli {

// Planar plot: data as triangles, the mean curve as one polyline, and the band
// as a round-capped tube of radius rho around it. Equal axis scaling keeps the
// tube circular; bounds get 5% margins.
std::string render_svg(const Eigen::MatrixXd& points, const Eigen::MatrixXd& curve, double rho);

}  // namespace electrogp::cli
