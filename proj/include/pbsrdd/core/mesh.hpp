#pragma once

#include <cstdlib>

namespace pbsrdd {

/// Periodic distance on [0, L): min(|x - y|, L - |x - y|) after wrapping both
/// points into the domain. Result lies in [0, L/2].
double periodic_distance(double x, double y, double length);

/// Wraps x into [0, L).
double wrap_position(double x, double length);

/// Uniform periodic mesh with nodes x_i = i h, i = 0..N-1, h = L / N.
/// Voxel i is the cell of width h centred on node i.
class Mesh {
 public:
  Mesh(double length, int voxels);

  /// Small test meshes may use two voxels, where both neighbours of a node
  /// coincide. Production meshes go through build_mesh.
  static Mesh micro(double length, int voxels);

  double length() const { return length_; }
  int voxels() const { return voxels_; }
  double spacing() const { return spacing_; }
  double node(int i) const { return wrap(i) * spacing_; }

  int wrap(int i) const {
    int r = i % voxels_;
    return r < 0 ? r + voxels_ : r;
  }

  /// Number of mesh steps between voxels i and j along the shorter arc.
  int distance_index(int i, int j) const {
    int d = std::abs(wrap(i) - wrap(j));
    return d <= voxels_ - d ? d : voxels_ - d;
  }

  double node_distance(int i, int j) const { return distance_index(i, j) * spacing_; }

  /// Index of the node nearest to x (periodic).
  int nearest_voxel(double x) const;

 private:
  Mesh(double length, int voxels, int minimum);

  double length_;
  int voxels_;
  double spacing_;
};

/// Builds the uniform periodic mesh; throws ModelError when N < 3 or L <= 0.
Mesh build_mesh(double length, int voxels);

}  // namespace pbsrdd
