#pragma once

// Orthographic SVG rendering of 3x3 manipulability ellipsoids.

#include "spdicp/spd.hpp"

#include <string>
#include <vector>

namespace spdicp {

enum class View {
  Top,    // looking down -z: x/y plane
  Front,  // looking along +y: x/z plane
};

View parse_view(const std::string& name);

struct Ellipse2 {
  double major = 0.0;      // semi-axis lengths, sqrt of 2x2 block eigenvalues
  double minor = 0.0;
  double angle_rad = 0.0;  // major axis direction in the view plane
};

/// Shadow of the ellipsoid on the view plane from the 2x2 principal block.
Ellipse2 project_ellipse(const SpdMatrix& m, View view);

struct RenderLayer {
  std::string name;
  SpdCloud cloud;
};

/// Up to three overlaid clouds, one cell per point index, with a legend.
/// `metadata` is stored verbatim (escaped) in a <metadata> element.
std::string render_svg(const std::vector<RenderLayer>& layers, View view, const std::string& metadata = "");

}  // namespace spdicp
