#pragma once

// Data-parallel inner loops. Each kernel has a serial counterpart in
// reference/serial_reference.hpp that the tests compare against.

#include <span>

#include "tomoprint/xray.hpp"

namespace tomoprint::kernels {

/// Exact ray/pixel intersection lengths, pixel-driven: the chord length of a
/// square pixel as a function of detector offset is a trapezoid, so each
/// pixel scatters into the one or two bins under its footprint. Parallel over
/// angles; each output row is owned by one thread.
void radon_slice(const SliceView& slice, const ScanGeometry& geometry, std::span<float> out);

/// Adds the unscaled line integrals of `slice` (pixel units) into `acc`, which
/// holds n_angles x detector_bins values. Zero pixels cost nothing, so a
/// sparse slice difference is cheap to project.
void radon_accumulate(const SliceView& slice, const ScanGeometry& geometry, std::span<double> acc);

/// Linear-interpolation back projection of an already filtered slice
/// sinogram, scaled by pi / n_angles. Parallel over image rows.
void backproject_slice(std::span<const float> filtered, const ScanGeometry& geometry, int nx, int ny,
                       double spacing_mm, std::span<float> out);

/// Minimum (or maximum) over the voxel and its six face neighbours that lie
/// inside the grid; `out` must share the frame of `in`. Parallel over z-slices.
void cross_extremum(const VoxelGrid& in, VoxelGrid& out, bool maximum);

}  // namespace tomoprint::kernels
