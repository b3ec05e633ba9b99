#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tomoprint/volume.hpp"

namespace tomoprint {

/// Lambert-Beer: transmitted intensity after `t_mm` of material with
/// attenuation `mu_per_mm`.
double attenuate(double i0, double mu_per_mm, double t_mm);

enum class BeamKind { parallel };

/// Parallel-beam acquisition over [0, 2*pi). Angle a is 2*pi*a/n_angles; bin k
/// has its center at (k + 0.5 - detector_bins/2) * detector_pitch_mm from the
/// rotation axis, which passes through the slice center.
struct ScanGeometry {
    int n_angles = 720;
    int detector_bins = 0;
    double detector_pitch_mm = 0;
    BeamKind beam = BeamKind::parallel;

    double angle(int a) const;
    double bin_center_mm(int k) const { return (k + 0.5 - detector_bins / 2.0) * detector_pitch_mm; }
    double span_mm() const { return detector_bins * detector_pitch_mm; }

    friend bool operator==(const ScanGeometry&, const ScanGeometry&) = default;
};

/// Pitch equal to the voxel pitch and just enough bins to cover the slice
/// diagonal; bin parity follows nx so that bin centers line up with voxel
/// centers at angle 0.
ScanGeometry default_geometry(const GridFrame& frame, int n_angles = 720);

/// Throws Geometry if the detector cannot see the whole slice.
void check_coverage(const ScanGeometry& geometry, int nx, int ny, double spacing_mm);

/// Row-major 2D slice view (x fastest).
struct SliceView {
    std::span<const float> values;
    int nx = 0, ny = 0;
    double spacing_mm = 1.0;
};

class Sinogram {
public:
    Sinogram() = default;
    Sinogram(ScanGeometry geometry, int n_slices, double i0 = 0);

    const ScanGeometry& geometry() const { return geometry_; }
    int n_slices() const { return n_slices_; }
    double i0() const { return i0_; }
    void set_i0(double i0) { i0_ = i0; }

    /// Voxel frame of the scanned grid so reconstruction can restore it.
    const GridFrame& source_frame() const { return source_; }
    void set_source_frame(const GridFrame& f) { source_ = f; }

    std::size_t slice_size() const { return std::size_t(geometry_.n_angles) * std::size_t(geometry_.detector_bins); }
    std::span<float> slice(int z) { return {data_.data() + z * slice_size(), slice_size()}; }
    std::span<const float> slice(int z) const { return {data_.data() + z * slice_size(), slice_size()}; }
    std::span<float> row(int z, int a) {
        return {data_.data() + z * slice_size() + std::size_t(a) * geometry_.detector_bins,
                std::size_t(geometry_.detector_bins)};
    }
    std::span<const float> row(int z, int a) const {
        return {data_.data() + z * slice_size() + std::size_t(a) * geometry_.detector_bins,
                std::size_t(geometry_.detector_bins)};
    }
    std::span<float> data() { return data_; }
    std::span<const float> data() const { return data_; }

    /// Entries whose simulated transmitted count hit zero and were clamped.
    std::uint64_t clamped_count() const { return clamped_; }
    void set_clamped_count(std::uint64_t n) { clamped_ = n; }

private:
    ScanGeometry geometry_;
    int n_slices_ = 0;
    double i0_ = 0;
    GridFrame source_;
    std::uint64_t clamped_ = 0;
    std::vector<float> data_;
};

/// Line integrals of one slice; output is n_angles x detector_bins.
std::vector<float> radon_slice(const SliceView& slice, const ScanGeometry& geometry);

/// radon_slice on every z-slice. Identical slices are projected once.
Sinogram project_volume(const VoxelGrid& grid, const ScanGeometry& geometry);

/// Poisson counting noise: p -> -ln(Poisson(i0 e^-p) / i0), zero counts
/// clamped to one count.
Sinogram add_photon_noise(const Sinogram& sino, double i0_photons, std::uint64_t seed);

}  // namespace tomoprint
