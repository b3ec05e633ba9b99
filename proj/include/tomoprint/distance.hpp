#pragma once

#include <functional>
#include <vector>

#include "tomoprint/volume.hpp"

namespace tomoprint {

/// Exact squared Euclidean distance (in voxels^2) from every voxel center to
/// the nearest voxel where `feature` is true. Voxels with no feature anywhere
/// get +inf. Separable lower-envelope algorithm, linear in the voxel count.
std::vector<float> squared_distance_transform(const Dims& dims, const std::vector<char>& feature);

/// Signed distance to the boundary of `inside`, in voxels: positive inside,
/// negative outside, +/-0.5 on the first voxel layer on either side.
std::vector<float> signed_distance(const Dims& dims, const std::vector<char>& inside);

}  // namespace tomoprint
