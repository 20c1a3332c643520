#pragma once

#include "ensreg/types.hpp"

namespace ensreg {

struct Contour {
    std::vector<Vec2> points; // sub-pixel coordinates, pixel centers at integers
    bool closed = false;
};

struct ContourSet {
    double level = 0.0;
    std::vector<Contour> contours;
};

/// Marching-squares polylines of the level set of `map`. Crossing points are
/// linearly interpolated along cell edges; saddle cells are resolved by the
/// cell-center average. Returns an empty set when the level is outside the
/// data range.
ContourSet iso_contours(const ScalarField& map, double level);

/// Symmetric Hausdorff distance between two contour sets, measured from
/// polyline points to polyline segments. Throws invalid_argument_error if
/// either set is empty.
double hausdorff_distance(const ContourSet& a, const ContourSet& b);

} // namespace ensreg
