#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tomoprint/volume.hpp"
#include "tomoprint/voxphantom.hpp"

namespace tomoprint {

enum class InfillPattern { grid };

struct PrinterSettings {
    double layer_height_um = 50;
    double nozzle_speed_mm_s = 30;
    double infill_density_pct = 100;
    InfillPattern infill_pattern = InfillPattern::grid;
    std::uint64_t seed = 0;

    friend bool operator==(const PrinterSettings&, const PrinterSettings&) = default;
};

void validate(const PrinterSettings& settings);

/// The six settings used for every sample, in table order.
std::vector<PrinterSettings> settings_table();

struct DefectModel {
    double underextrusion_rate = 0;    // pore events per mm of raster path
    double pore_radius_mm = 0;         // mean pore radius
    double surface_amplitude_mm = 0;   // RMS normal displacement of the outer surface
    double surface_correlation_mm = 0; // lateral correlation length

    friend bool operator==(const DefectModel&, const DefectModel&) = default;
};

/// Affine settings -> defect map. Amplitude grows with layer height and the
/// pore rate with nozzle speed; both are clamped at zero.
struct PrinterProfile {
    std::string name;
    double amplitude_base_mm = 0;
    double amplitude_per_um = 0;       // mm of RMS roughness per um of layer height
    double rate_base_per_mm = 0;
    double rate_per_mm_s = 0;          // pore events per mm of path per mm/s of nozzle speed
    double pore_radius_mm = 0;
    double correlation_mm = 0;
    double raster_pitch_mm = 0.4;      // spacing of adjacent raster lines (nozzle width)

    friend bool operator==(const PrinterProfile&, const PrinterProfile&) = default;
};

void validate(const PrinterProfile& profile);

/// Named profiles. Built-ins: "ideal" (all zeros), "default", and the
/// simulated printers used by the full run ("printer_a", "printer_b",
/// "printer_c", "reference").
class ProfileRegistry {
public:
    static ProfileRegistry builtin();

    void add(PrinterProfile profile);
    const PrinterProfile& get(const std::string& name) const;
    bool contains(const std::string& name) const { return profiles_.count(name) != 0; }
    std::vector<std::string> names() const;

private:
    std::map<std::string, PrinterProfile> profiles_;
};

DefectModel defect_model_for(const PrinterSettings& settings, const PrinterProfile& profile);
DefectModel defect_model_for(const PrinterSettings& settings, const std::string& profile_name,
                             const ProfileRegistry& registry = ProfileRegistry::builtin());

/// Number of z-slices per deposited layer: ceil(layer height / voxel pitch).
int layer_band(double layer_height_um, double spacing_mm);

/// Each band of layer_band() slices, counted from the lowest solid slice,
/// takes the per-column majority (strictly more than half) solid cross-section.
/// Void voxels are never relabelled.
LabelVolume apply_layer_quantization(const VoxelGrid& grid, const LabelVolume& labels, double layer_height_um);
LabelVolume apply_layer_quantization(const LabelVolume& labels, double layer_height_um);

/// One straight raster segment in world millimetres.
struct RasterSegment {
    Vec3 from, to;
    double length() const { return (to - from).norm(); }
};

/// Serpentine grid raster over the solid bounding box: one pass per printed
/// layer, alternating x- and y-directed lines between layers.
std::vector<RasterSegment> raster_path(const LabelVolume& labels, double layer_height_mm, double raster_pitch_mm);

struct PoreEvent {
    Vec3 center_mm;
    double radius_mm;
};

/// Poisson events along the path with `rate` per mm; radii uniform in
/// [0.5, 1.5] x mean_radius.
std::vector<PoreEvent> sample_pores(const std::vector<RasterSegment>& path, double rate, double mean_radius_mm,
                                    std::uint64_t seed);

/// Carves spherical pores centred on material voxels along the raster path.
/// Voxels within three voxels of the outside are never carved, so pores stay
/// enclosed.
LabelVolume apply_underextrusion(const LabelVolume& labels, const DefectModel& model, std::uint64_t seed,
                                 double layer_height_mm = 0.05, double raster_pitch_mm = 0.4);

/// Unit-RMS Gaussian-correlated random field on the grid (float, x fastest).
std::vector<float> correlated_field(const Dims& dims, double correlation_vox, std::uint64_t seed);

/// Displaces the outer solid boundary along its normal by amplitude * field.
/// Only material/background voxels flip; designed voids and the material
/// within three voxels of them are preserved.
LabelVolume apply_surface_noise(const LabelVolume& labels, const DefectModel& model, std::uint64_t seed);

/// Background margin voxelize() needs so surface noise has room to grow.
int print_margin_vox(const DefectModel& model, double spacing_mm);

/// voxelize -> layer quantization -> surface noise -> under-extrusion. The
/// margin defaults to print_margin_vox().
std::pair<VoxelGrid, LabelVolume> simulate_print(const PhantomSpec& spec, const PrinterSettings& settings,
                                                 const PrinterProfile& profile, double spacing_mm,
                                                 int margin_vox = -1);

}  // namespace tomoprint
