#pragma once

#include <span>
#include <vector>

#include "tomoprint/volume.hpp"
#include "tomoprint/xray.hpp"

namespace tomoprint {

enum class FilterKind { ramp, ramp_hann };

struct FilterSpec {
    FilterKind kind = FilterKind::ramp;
    double cutoff = 1.0;  // fraction of Nyquist, (0, 1]

    friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

void validate(const FilterSpec& spec);

/// Zero-padded length used for a row of `n` samples (power of two, >= 2n).
int padded_length(int n);

/// Real frequency response over bins 0..padded/2 for detector pitch `pitch_mm`.
/// Built from the sampled band-limited ramp kernel so its impulse response is
/// the discrete Ram-Lak kernel; the DC bin is exactly zero.
std::vector<double> filter_response(int padded, const FilterSpec& spec, double pitch_mm = 1.0);

/// Ramp-filter one detector row (units: input line integrals -> 1/mm).
std::vector<float> filter_projection(std::span<const float> row, const FilterSpec& spec, double pitch_mm = 1.0);

/// Filtered back projection of one n_angles x detector_bins slice sinogram
/// onto an nx x ny grid of pitch `spacing_mm` centered on the rotation axis.
std::vector<float> fbp_slice(std::span<const float> sino2d, const ScanGeometry& geometry, const FilterSpec& spec,
                             int nx, int ny, double spacing_mm);

/// fbp_slice per z-slice onto the sinogram's source frame. Negative
/// reconstruction values are clamped to zero so the result is a valid grid.
VoxelGrid reconstruct_volume(const Sinogram& sino, const FilterSpec& spec);

}  // namespace tomoprint
