#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tomoprint/morphology.hpp"
#include "tomoprint/volume.hpp"

namespace tomoprint {

enum class Plane { XY, XZ };
enum class Metric { cusp_density, roughness, porosity };

std::string to_string(Plane p);
std::string to_string(Metric m);
Plane parse_plane(const std::string& s);
Metric parse_metric(const std::string& s);

struct SmoothingSpec {
    int structuring_radius_vox = 3;
    double void_exclusion_radius_mm = 0.1;
};

void validate(const SmoothingSpec& spec);

struct MetricsReport {
    std::string printer_id;
    std::string setting_id;
    int setting_index = 0;  // tie-break order for ranking
    std::string sample_id;
    double cusp_density_xy = 0, cusp_density_xz = 0;  // percent
    double roughness_xy = 0, roughness_xz = 0;        // deviation voxels
    double porosity_pct = 0;
    std::vector<double> void_histogram_edges_mm;
    std::vector<std::size_t> void_histogram;

    double value(Metric m, Plane p) const;
};

/// Number of slices in the plane family and the 2D mask of one slice.
int slice_count(const Dims& d, Plane p);
Mask2D slice_mask(const LabelVolume& labels, Plane p, int index, bool (*pred)(Label));

/// Sum over slices of |M xor close(open(M))| as a percentage of material
/// voxels. M is the solid (material or void) cross-section so enclosed voids
/// are not smoothed away as cusps.
double cusp_volume(const LabelVolume& labels, Plane plane, const SmoothingSpec& spec);
double cusp_density(const LabelVolume& labels, Plane plane, const SmoothingSpec& spec);

/// Voxels where the material masks disagree, skipping voxels within the
/// exclusion radius of a void voxel of `reference`.
double roughness(const LabelVolume& labels, const LabelVolume& reference, Plane plane, const SmoothingSpec& spec);

struct Shift {
    int dx = 0, dy = 0, dz = 0;
    friend bool operator==(const Shift&, const Shift&) = default;
};

struct Alignment {
    LabelVolume registered;
    Shift shift;  // moving(x) ~ reference(x - shift)
    std::size_t overlap = 0;
};

/// Integer shift maximizing material overlap in a (2k+1)^3 window around the
/// rounded centroid offset. Ties: smallest |shift|^2, then lexicographic.
Alignment align(const LabelVolume& moving, const LabelVolume& reference, int search_radius_vox);

/// Material voxels of `reference` that land on material of `moving` shifted back by s.
std::size_t overlap_count(const LabelVolume& moving, const LabelVolume& reference, Shift s);

/// Volume with out(x) = in(x + s); voxels shifted in from outside are background.
LabelVolume shift_labels(const LabelVolume& in, Shift s);

double porosity(const LabelVolume& labels);

struct Ranking {
    std::string sample_id;
    std::string printer_id;
    std::string setting_id;
    double value = 0;
};

/// Best setting per (sample, printer) in order of first appearance. Ties go
/// to the lowest setting_index.
std::vector<Ranking> rank_settings(const std::vector<MetricsReport>& reports, Metric metric, Plane plane);

/// The overall minimum of a ranking list (first wins ties).
const Ranking& global_best(const std::vector<Ranking>& rankings);

}  // namespace tomoprint
