#pragma once

namespace remus {

// Segmented vessel cross-section measurement in image space. Extents
// are pixel counts along the lateral (w) and depth (h) axes; e is the
// cross-section eccentricity.
struct VesselMeasure {
  double centroid_x = 0.0;  // px, lateral
  double centroid_y = 0.0;  // px, depth
  double w = 0.0;           // px
  double h = 0.0;           // px
  double e = 0.0;
  bool found = false;
};

}  // namespace remus
