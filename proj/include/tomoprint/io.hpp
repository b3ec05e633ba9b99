#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tomoprint/metrology.hpp"
#include "tomoprint/printsim.hpp"
#include "tomoprint/segmet.hpp"
#include "tomoprint/volume.hpp"
#include "tomoprint/voxphantom.hpp"
#include "tomoprint/xray.hpp"

namespace tomoprint::io {

namespace fs = std::filesystem;

/// Sidecar path for a raw file: "<path>.json".
fs::path sidecar_path(const fs::path& raw);

// Raw little-endian float32 plus a JSON sidecar (dims, spacing, origin, units).
void write_grid(const fs::path& raw, const VoxelGrid& grid);
VoxelGrid read_grid(const fs::path& raw);

// Raw float32, angle-major per slice; sidecar holds geometry, I0 and the source frame.
void write_sinogram(const fs::path& raw, const Sinogram& sino);
Sinogram read_sinogram(const fs::path& raw);

// One byte per voxel (0 background, 1 material, 2 void).
void write_labels(const fs::path& raw, const LabelVolume& labels);
LabelVolume read_labels(const fs::path& raw);

/// Line-oriented phantom text:
///   label <name>
///   outer_dims_mm <L> <W> <H>
///   material_mu <mu>
///   void <cube|sphere> <size_mm> <cx> <cy> <cz>
/// '#' starts a comment.
std::string format_phantom(const PhantomSpec& spec);
PhantomSpec parse_phantom(const std::string& text);
void write_phantom(const fs::path& path, const PhantomSpec& spec);
PhantomSpec read_phantom(const fs::path& path);

/// JSON object {"profiles": [{"name": ..., coefficients...}, ...]}.
void write_profiles(const fs::path& path, const std::vector<PrinterProfile>& profiles);
std::vector<PrinterProfile> read_profiles(const fs::path& path);

void write_voids_csv(const fs::path& path, const std::vector<VoidDetection>& voids);

/// One row per (sample, printer, setting, plane, metric).
void write_metrics_csv(const fs::path& path, const std::vector<MetricsReport>& reports);
std::vector<MetricsReport> read_metrics_csv(const fs::path& path);

/// printer, then <sample>_setting,<sample>_value for each sample in order of appearance.
std::string format_rankings_csv(const std::vector<Ranking>& rankings);
void write_rankings_csv(const fs::path& path, const std::vector<Ranking>& rankings);

/// Slice stack sidecar: stored value = offset + count * scale (1/mm).
struct StackInfo {
    int bit_depth = 16;  // 8, 16 (PGM) or 32 (raw float)
    double spacing_mm = 1;
    Vec3 origin_mm;
    double scale = 1;
    double offset = 0;
};

/// Writes slice_NNNN.{pgm,raw} plus stack.json. For 8/16 bit the scale maps
/// [0, max] onto the full count range.
StackInfo export_stack(const VoxelGrid& grid, const fs::path& dir, int bit_depth);

/// Reads every slice file in `dir` in ascending filename order.
VoxelGrid ingest_stack(const fs::path& dir, const fs::path& sidecar);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);
std::string sha256_bytes(const std::string& bytes);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace tomoprint::io
