#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pcon {

/// normal . x <= bound
struct Halfspace
{
    std::vector<double> normal;
    double bound = 0.0;
};

using Point = std::vector<double>;

/// Vertices of the bounded polytope {x : all halfspaces hold}, found by
/// intersecting every `dim`-subset of bounding hyperplanes and keeping the
/// feasible, distinct intersection points.
[[nodiscard]] std::vector<Point> enumerate_vertices(std::span<const Halfspace> halfspaces, int dim,
                                                    double tol = 1e-10);

/// Dimension of the affine hull of `points`.
[[nodiscard]] int affine_dimension(std::span<const Point> points, double tol = 1e-10);

enum class PolytopeStatus
{
    Empty,
    Degenerate,  // non-empty with empty interior
    Ok,
};

struct PolytopeVolume
{
    double volume = 0.0;
    PolytopeStatus status = PolytopeStatus::Empty;
    std::size_t vertex_count = 0;
};

/// Exact volume of a bounded polytope given in halfspace form. Each face is
/// split into cones from its vertex centroid over its facets, recursively
/// down to edges, which in 2D and 3D is the usual simplicial fan.
[[nodiscard]] PolytopeVolume polytope_volume(std::span<const Halfspace> halfspaces, int dim, double tol = 1e-10);

}  // namespace pcon
