#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tomoprint {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
    double norm() const;
};

struct Dims {
    int nx = 0, ny = 0, nz = 0;

    std::size_t count() const { return std::size_t(nx) * std::size_t(ny) * std::size_t(nz); }
    std::size_t slice_count() const { return std::size_t(nx) * std::size_t(ny); }
    bool contains(int x, int y, int z) const {
        return x >= 0 && y >= 0 && z >= 0 && x < nx && y < ny && z < nz;
    }
    friend bool operator==(const Dims&, const Dims&) = default;
};

/// Position of voxel centers and the grid corner in millimetres. The corner of
/// voxel (0,0,0) sits at `origin_mm`; voxel (i,j,k) has its center at
/// origin + (i+0.5, j+0.5, k+0.5) * spacing.
struct GridFrame {
    Dims dims;
    double spacing_mm = 1.0;
    Vec3 origin_mm;

    std::size_t index(int x, int y, int z) const {
        return std::size_t(x) + std::size_t(dims.nx) * (std::size_t(y) + std::size_t(dims.ny) * std::size_t(z));
    }
    Vec3 center_mm(int x, int y, int z) const {
        return {origin_mm.x + (x + 0.5) * spacing_mm, origin_mm.y + (y + 0.5) * spacing_mm,
                origin_mm.z + (z + 0.5) * spacing_mm};
    }
    Vec3 extent_mm() const {
        return {dims.nx * spacing_mm, dims.ny * spacing_mm, dims.nz * spacing_mm};
    }
    friend bool operator==(const GridFrame&, const GridFrame&) = default;
};

/// Dense scalar field of linear attenuation coefficients (1/mm), x fastest.
class VoxelGrid {
public:
    VoxelGrid() = default;
    explicit VoxelGrid(GridFrame frame, float fill = 0.0f);
    VoxelGrid(GridFrame frame, std::vector<float> values);

    const GridFrame& frame() const { return frame_; }
    const Dims& dims() const { return frame_.dims; }
    double spacing_mm() const { return frame_.spacing_mm; }

    float& at(int x, int y, int z) { return values_[frame_.index(x, y, z)]; }
    float at(int x, int y, int z) const { return values_[frame_.index(x, y, z)]; }

    std::span<float> values() { return values_; }
    std::span<const float> values() const { return values_; }

    std::span<float> slice(int z) { return {values_.data() + std::size_t(z) * dims().slice_count(), dims().slice_count()}; }
    std::span<const float> slice(int z) const {
        return {values_.data() + std::size_t(z) * dims().slice_count(), dims().slice_count()};
    }

    friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

private:
    GridFrame frame_;
    std::vector<float> values_;
};

enum class Label : std::uint8_t { background = 0, material = 1, void_ = 2 };

struct LabelCounts {
    std::size_t background = 0, material = 0, voids = 0;
    std::size_t total() const { return background + material + voids; }
};

class LabelVolume {
public:
    LabelVolume() = default;
    explicit LabelVolume(GridFrame frame, Label fill = Label::background);

    const GridFrame& frame() const { return frame_; }
    const Dims& dims() const { return frame_.dims; }
    double spacing_mm() const { return frame_.spacing_mm; }

    Label& at(int x, int y, int z) { return labels_[frame_.index(x, y, z)]; }
    Label at(int x, int y, int z) const { return labels_[frame_.index(x, y, z)]; }

    std::span<Label> labels() { return labels_; }
    std::span<const Label> labels() const { return labels_; }

    LabelCounts counts() const;

    friend bool operator==(const LabelVolume&, const LabelVolume&) = default;

private:
    GridFrame frame_;
    std::vector<Label> labels_;
};

/// Material -> mu, everything else -> 0.
VoxelGrid grid_from_labels(const LabelVolume& labels, float material_mu);

inline bool is_solid(Label l) { return l != Label::background; }

}  // namespace tomoprint
