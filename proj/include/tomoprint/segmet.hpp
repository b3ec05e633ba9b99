#pragma once

#include <optional>
#include <vector>

#include "tomoprint/volume.hpp"
#include "tomoprint/voxphantom.hpp"

namespace tomoprint {

struct OtsuResult {
    double threshold = 0;       // 1/mm; voxels >= threshold are foreground
    int bin = 0;                // last bin of the lower class
    double lo = 0, hi = 0;      // histogram range
    std::vector<double> between_class_variance;  // per split bin, 256 entries
};

constexpr int kOtsuBins = 256;

/// Between-class-variance maximizing threshold over a 256-bin histogram
/// spanning [min, max] of the grid. Ties go to the middle of the first run of
/// maximal bins.
OtsuResult otsu(const VoxelGrid& grid);
double otsu_threshold(const VoxelGrid& grid);

/// Grayscale erosion / dilation with the 7-voxel cross (centre plus face
/// neighbours); voxels outside the grid are ignored (OpenMP, slice-parallel).
VoxelGrid erode_cross(const VoxelGrid& grid);
VoxelGrid dilate_cross(const VoxelGrid& grid);

/// Closing followed by opening with the cross: removes specks and pinholes
/// thinner than three voxels. Idempotent, and commutes with thresholding.
VoxelGrid smooth(const VoxelGrid& grid);

/// Smooth, threshold, then split sub-threshold voxels into background
/// (6-connected to the grid border) and enclosed void.
LabelVolume segment(const VoxelGrid& grid, double threshold);

struct VoidDetection {
    Vec3 centroid_mm;
    double volume_mm3 = 0;
    double equivalent_size_mm = 0;  // edge of the cube with the same volume
    std::size_t voxel_count = 0;
    std::optional<std::size_t> matched_truth;  // index into PhantomSpec::voids
};

/// Diameter of the sphere with the same volume.
double sphere_equivalent_diameter(double volume_mm3);

/// 6-connected components of void voxels in raster order of first voxel.
std::vector<VoidDetection> extract_voids(const LabelVolume& labels);

struct TruthOutcome {
    std::size_t truth_index = 0;
    double size_mm = 0;
    bool detected = false;
    double centroid_error_mm = 0;
    double volume_ratio = 0;  // detected / designed, 0 when missed
};

struct SizeBin {
    double lo_mm = 0, hi_mm = 0;  // [lo, hi)
    std::size_t total = 0, detected = 0;
    double mean_volume_ratio = 0;  // over detected voids
    double rate() const { return total ? double(detected) / double(total) : 0.0; }
};

struct DetectabilityReport {
    std::vector<TruthOutcome> outcomes;  // in truth order
    std::vector<SizeBin> bins;
    double overall_rate = 0;
    /// Smallest bin lower edge from which every populated bin upward reaches
    /// the given rate; nullopt when even the largest bin falls short.
    std::optional<double> min_size_full;
    std::optional<double> min_size_half;
};

std::vector<double> default_size_edges();

/// Greedy matching: truth voids largest first, each takes the nearest
/// unmatched detection within `match_radius_mm`. Updates matched_truth.
DetectabilityReport score_detectability(std::vector<VoidDetection>& found, const PhantomSpec& truth,
                                        double match_radius_mm,
                                        const std::vector<double>& size_edges = default_size_edges());

}  // namespace tomoprint
