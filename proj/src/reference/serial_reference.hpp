#pragma once

// Straightforward single-threaded implementations kept as test oracles and
// benchmark baselines. They favour obviousness over speed.

#include <span>
#include <vector>

#include "tomoprint/volume.hpp"
#include "tomoprint/xray.hpp"

namespace tomoprint::reference {

/// Ray-driven projection: every ray is clipped against every pixel square.
std::vector<float> radon_slice(const SliceView& slice, const ScanGeometry& geometry);

/// Pixel-driven back projection, double accumulation, no parallelism.
std::vector<float> backproject_slice(std::span<const float> filtered, const ScanGeometry& geometry, int nx, int ny,
                                     double spacing_mm);

/// Direct spatial convolution with the discrete Ram-Lak kernel (no FFT).
std::vector<float> ramlak_convolve(std::span<const float> row, double pitch_mm);

/// Cross-shaped grayscale erosion (minimum) or dilation (maximum), one voxel
/// at a time; neighbours outside the grid are ignored.
VoxelGrid cross_extremum(const VoxelGrid& grid, bool maximum);

}  // namespace tomoprint::reference
