#include "spdicp/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spdicp {

namespace {

constexpr std::array<const char*, 3> kColors{"#1f77b4", "#d62728", "#2ca02c"};
constexpr double kCell = 80.0;
constexpr int kColumns = 10;

std::pair<int, int> plane_axes(View view) { return view == View::Top ? std::pair{0, 1} : std::pair{0, 2}; }

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

View parse_view(const std::string& name) {
  if (name == "top") return View::Top;
  if (name == "front") return View::Front;
  throw std::invalid_argument("unknown view '" + name + "' (expected top or front)");
}

Ellipse2 project_ellipse(const SpdMatrix& m, View view) {
  if (m.dim() != 3) throw std::invalid_argument("render: only 3x3 manipulabilities can be drawn");
  const auto [a, b] = plane_axes(view);
  Eigen::Matrix2d block;
  block << m(a, a), m(a, b), m(b, a), m(b, b);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block);
  const Eigen::Vector2d major_dir = es.eigenvectors().col(1);
  return {std::sqrt(es.eigenvalues()(1)), std::sqrt(std::max(0.0, es.eigenvalues()(0))),
          std::atan2(major_dir(1), major_dir(0))};
}

std::string render_svg(const std::vector<RenderLayer>& layers, View view, const std::string& metadata) {
  if (layers.empty() || layers.size() > kColors.size())
    throw std::invalid_argument("render: between one and three datasets can be overlaid");

  std::size_t count = 0;
  double largest = 0.0;
  for (const auto& layer : layers) {
    count = std::max(count, layer.cloud.size());
    for (const auto& p : layer.cloud) largest = std::max(largest, project_ellipse(p, view).major);
  }
  const double scale = largest > 0.0 ? 0.45 * kCell / largest : 1.0;
  const int columns = static_cast<int>(std::min<std::size_t>(count, kColumns));
  const int rows = static_cast<int>((count + kColumns - 1) / kColumns);
  const double legend = 20.0 * static_cast<double>(layers.size()) + 10.0;
  const double width = columns * kCell;
  const double height = rows * kCell + legend;

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<!-- view: " << (view == View::Top ? "top (x,y)" : "front (x,z)") << ", scale " << scale
     << " px per unit semi-axis -->\n";
  if (!metadata.empty()) os << "<metadata>" << xml_escape(metadata) << "</metadata>\n";
  for (std::size_t l = 0; l < layers.size(); ++l) {
    os << "<g id=\"layer" << l << "\" fill=\"none\" stroke=\"" << kColors[l] << "\" stroke-width=\"1.5\">\n";
    for (std::size_t i = 0; i < layers[l].cloud.size(); ++i) {
      const Ellipse2 e = project_ellipse(layers[l].cloud[i], view);
      const double cx = (static_cast<double>(i % kColumns) + 0.5) * kCell;
      const double cy = legend + (static_cast<double>(i / kColumns) + 0.5) * kCell;
      // SVG y points down, so the in-plane angle flips sign.
      os << "  <ellipse cx=\"" << cx << "\" cy=\"" << cy << "\" rx=\"" << e.major * scale << "\" ry=\""
         << e.minor * scale << "\" transform=\"rotate(" << -e.angle_rad * 180.0 / std::numbers::pi << ' ' << cx
         << ' ' << cy << ")\"/>\n";
    }
    os << "</g>\n";
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const double y = 15.0 + 20.0 * static_cast<double>(l);
    os << "<line x1=\"5\" y1=\"" << y - 4 << "\" x2=\"25\" y2=\"" << y - 4 << "\" stroke=\"" << kColors[l]
       << "\" stroke-width=\"3\"/>\n";
    os << "<text x=\"30\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(layers[l].name)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace spdicp
