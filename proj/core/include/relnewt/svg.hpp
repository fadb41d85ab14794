#pragma once

// Standalone SVG emission for run inspection. Inputs are plain point lists and
// matrices so no solver type leaks in here; callers sample their curves and
// fields first. Two dimensional only.

#include <string>
#include <vector>

#include "relnewt/boundary.hpp"

namespace relnewt {

/** Domain outline plus one polyline per curve, palette cycled, endpoints
    dotted. Curves may leave the domain; the view box grows to fit. */
std::string plot_trajectories(const ConvexDomain& domain,
                              const std::vector<std::vector<Vec>>& curves,
                              int width = 640);

/** Winding sweep: boundary parameter against the unwrapped direction angle,
    with the dashed degree one reference through the first sample. The angles
    may wrap; unwrapping happens here. */
std::string plot_winding(const std::vector<double>& theta,
                         const std::vector<double>& angle, int width = 640);

/** Row major matrix over the periodic angle square, diverging palette centered
    at zero and scaled to max |value|; non finite cells stay blank. */
std::string plot_heatmap(int n_rows, int n_cols, const std::vector<double>& values,
                         int width = 640);

void save_svg(const std::string& path, const std::string& svg);

} // namespace relnewt
