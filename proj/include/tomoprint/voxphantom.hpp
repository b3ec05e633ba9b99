#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tomoprint/volume.hpp"

namespace tomoprint {

enum class VoidShape { cube, sphere };

/// A designed cavity. `size_mm` is the cube edge or the sphere diameter;
/// `center_mm` is in body coordinates (body spans [0,L]x[0,W]x[0,H], z up).
struct VoidSpec {
    VoidShape shape = VoidShape::cube;
    double size_mm = 0;
    Vec3 center_mm;

    double volume_mm3() const;
    Vec3 bbox_lo() const { return center_mm - Vec3{size_mm / 2, size_mm / 2, size_mm / 2}; }
    Vec3 bbox_hi() const { return center_mm + Vec3{size_mm / 2, size_mm / 2, size_mm / 2}; }

    friend bool operator==(const VoidSpec&, const VoidSpec&) = default;
};

struct PhantomSpec {
    Vec3 outer_dims_mm;
    std::vector<VoidSpec> voids;
    double material_mu = 0.1;
    std::string label;

    double body_volume_mm3() const { return outer_dims_mm.x * outer_dims_mm.y * outer_dims_mm.z; }
    double smallest_void_mm() const;

    friend bool operator==(const PhantomSpec&, const PhantomSpec&) = default;
};

/// Throws Domain or ScheduleInfeasible when an invariant is broken.
void validate(const PhantomSpec& spec);

/// Analytic sum of void volumes over body volume.
double designed_porosity(const PhantomSpec& spec);

/// Knobs of the void-schedule generator shared by both samples.
struct ScheduleOptions {
    double min_gap_mm = 0.2;         // wall between neighbouring voids and to the outer faces
    double small_peak_mm = 0.6;      // sample 1: size the small cubes reach at mid-height
    double tolerance = 0.005;        // absolute porosity fraction
    double material_mu = 0.1;
    int max_per_row = 5;             // voids per lattice row; the level is a square array of columns
    double size_quantum_mm = 0.05;   // sizes and void faces snap to this grid (0 = off)
};

/// 8 x 8 x 26 mm body, alternating large/small cube levels.
PhantomSpec sample1_spec(double target_porosity, const ScheduleOptions& opts = {});

/// 6 x 6 x 17.5 mm body, alternating sphere/cube levels.
PhantomSpec sample2_spec(double target_porosity, const ScheduleOptions& opts = {});

/// Rasterize by voxel-center inclusion. The body occupies exactly
/// round(dims / spacing) voxels per axis; `margin_vox` background voxels are
/// added on every side (origin moves to -margin * spacing).
std::pair<VoxelGrid, LabelVolume> voxelize(const PhantomSpec& spec, double spacing_mm, int margin_vox = 0);

/// Voxel-center membership test used by voxelize (half-open boxes).
bool void_contains(const VoidSpec& v, const Vec3& p, double spacing_mm);

}  // namespace tomoprint
