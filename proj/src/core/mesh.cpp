#include "pbsrdd/core/mesh.hpp"

#include <cmath>
#include <string>

#include "pbsrdd/core/error.hpp"

namespace pbsrdd {

double wrap_position(double x, double length) {
  double r = std::fmod(x, length);
  if (r < 0.0) r += length;
  // fmod of a value just below zero can round up to exactly L
  return r >= length ? 0.0 : r;
}

double periodic_distance(double x, double y, double length) {
  double d = std::fabs(wrap_position(x, length) - wrap_position(y, length));
  return std::min(d, length - d);
}

Mesh::Mesh(double length, int voxels) : Mesh(length, voxels, 3) {}

Mesh::Mesh(double length, int voxels, int minimum)
    : length_(length), voxels_(voxels), spacing_(length / static_cast<double>(voxels)) {
  if (!(length > 0.0) || !std::isfinite(length)) throw ModelError("mesh length must be positive");
  if (voxels < minimum)
    throw ModelError("mesh needs at least " + std::to_string(minimum) + " voxels, got " + std::to_string(voxels));
}

Mesh Mesh::micro(double length, int voxels) { return Mesh(length, voxels, 2); }

int Mesh::nearest_voxel(double x) const {
  double u = wrap_position(x, length_) / spacing_;
  return wrap(static_cast<int>(std::lround(u)));
}

Mesh build_mesh(double length, int voxels) { return Mesh(length, voxels); }

}  // namespace pbsrdd
