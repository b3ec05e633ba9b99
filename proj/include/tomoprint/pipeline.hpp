#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tomoprint/error.hpp"
#include "tomoprint/fbp.hpp"
#include "tomoprint/metrology.hpp"
#include "tomoprint/printsim.hpp"
#include "tomoprint/segmet.hpp"
#include "tomoprint/voxphantom.hpp"

namespace tomoprint {

inline constexpr const char* kVersion = "0.1.0";

enum class RunMode { synthetic, ingest };

struct PipelineConfig {
    RunMode mode = RunMode::synthetic;
    std::vector<int> samples{1, 2};
    std::vector<std::filesystem::path> phantoms;  // replaces `samples` when set; ids are the file stems
    std::vector<int> settings{1, 2, 3, 4, 5, 6};  // 1-based rows of settings_table()
    std::vector<std::string> profiles{"printer_a", "printer_b", "printer_c"};
    std::string reference_profile = "reference";  // one fixed-mode run per sample; empty to skip
    std::string reference_setting_id = "XHD";
    std::optional<std::filesystem::path> profile_file;
    double spacing_mm = 0.05;
    int n_angles = 720;
    bool noise = false;
    double i0_photons = 1e5;
    FilterSpec filter;
    SmoothingSpec smoothing;
    int align_radius_vox = 2;
    double match_radius_mm = 0.15;
    double sample1_porosity = 0.145;
    double sample2_porosity = 0.148;
    std::uint64_t seed = 1;
    std::filesystem::path out = "tomoprint_out";
    bool persist_intermediates = false;
    int jobs = 0;  // 0 = OpenMP default

    // ingest mode
    std::filesystem::path stack_dir;
    std::filesystem::path stack_sidecar;
    std::optional<std::filesystem::path> reference_phantom;
    std::string printer_id = "scan";
    std::string setting_id = "scan";
};

/// Structured-text (JSON) config; unknown keys are rejected.
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);
void validate(const PipelineConfig& config);

/// Setting ids used in reports: "First" .. "Sixth".
std::string setting_name(int row);

PhantomSpec sample_spec(int sample, const PipelineConfig& config);

/// A stage failure carries the stage name; the original kind is kept.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause)
        : Error(cause.kind(), "stage '" + stage + "': " + cause.what()), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct AnalysisResult {
    std::string name;  // subdirectory under out/analyses
    MetricsReport report;
    std::uint64_t seed = 0;
    double designed_porosity_pct = 0;
    double threshold = 0;
    Shift shift;
    std::optional<DetectabilityReport> detectability;
    std::vector<VoidDetection> voids;
};

/// Everything needed for one synthetic analysis, reusable by tests.
struct SyntheticCase {
    PhantomSpec spec;
    PrinterSettings settings;
    PrinterProfile profile;
    std::string printer_id, setting_id, sample_id;
    int setting_index = 0;
};

AnalysisResult analyze_synthetic(const SyntheticCase& c, const PipelineConfig& config,
                                 const std::filesystem::path& dir = {});

struct OutputFile {
    std::filesystem::path path;  // relative to the output directory
    std::string sha256;
};

struct ReportBundle {
    std::vector<AnalysisResult> analyses;
    std::vector<OutputFile> files;
    std::filesystem::path manifest;
};

/// Writes metrics.csv, rankings_<metric>_<plane>.csv and SVG charts.
/// Returns the written paths relative to outdir.
std::vector<std::filesystem::path> emit_report(const std::vector<MetricsReport>& reports,
                                               const std::filesystem::path& outdir);

ReportBundle run_pipeline(const PipelineConfig& config);

/// Hashes every listed file and writes manifest.json.
std::filesystem::path write_manifest(const PipelineConfig& config, const std::vector<AnalysisResult>& analyses,
                                     const std::vector<std::filesystem::path>& relative_outputs,
                                     std::vector<OutputFile>* hashed = nullptr);

}  // namespace tomoprint
