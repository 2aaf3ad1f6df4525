#pragma once

#include <span>
#include <vector>

#include "seggrasp/mesh.hpp"

namespace seggrasp {

// Closed, outward-oriented, vertex-welded primitive surfaces.

/// Axis-aligned box; each side is a grid whose cell edge is at most `cell`.
TriMesh make_box(const Vec3& min_corner, const Vec3& max_corner, double cell);

/// Regular n-gon prism along +z from z0 to z1, centered on the z axis.
TriMesh make_prism(double radius, double z0, double z1, int sides, int rings);

/// Icosahedron subdivided `level` times and projected onto the sphere.
TriMesh make_icosphere(const Vec3& center, double radius, int level);

/// Tube of radius `tube_radius` swept along an arc of radius `arc_radius` in the
/// xy-plane, from angle a0 to a1 (radians), with capped ends.
TriMesh make_tube_arc(double arc_radius, double tube_radius, double a0, double a1, int arc_segments,
                      int tube_sides);

/// Concatenates meshes without welding; face order follows the input order.
TriMesh concatenate(std::span<const TriMesh> meshes);

}  // namespace seggrasp
