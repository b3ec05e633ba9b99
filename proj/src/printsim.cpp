#include "tomoprint/printsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tomoprint/distance.hpp"
#include "tomoprint/error.hpp"
#include "util/hash.hpp"

namespace tomoprint {

void validate(const PrinterSettings& s) {
    require(s.layer_height_um > 0, ErrorKind::Domain, "layer height must be positive");
    require(s.nozzle_speed_mm_s > 0, ErrorKind::Domain, "nozzle speed must be positive");
    require(s.infill_density_pct > 0 && s.infill_density_pct <= 100, ErrorKind::Domain,
            "infill density must lie in (0, 100]");
}

std::vector<PrinterSettings> settings_table() {
    return {
        {50, 30, 100, InfillPattern::grid, 0}, {55, 30, 100, InfillPattern::grid, 0},
        {60, 30, 100, InfillPattern::grid, 0}, {65, 30, 100, InfillPattern::grid, 0},
        {70, 30, 100, InfillPattern::grid, 0}, {50, 35, 100, InfillPattern::grid, 0},
    };
}

void validate(const PrinterProfile& p) {
    require(p.amplitude_base_mm >= 0 && p.amplitude_per_um >= 0 && p.rate_base_per_mm >= 0 && p.rate_per_mm_s >= 0 &&
                p.pore_radius_mm >= 0 && p.correlation_mm >= 0,
            ErrorKind::Config, "profile '" + p.name + "' has negative coefficients");
    require(p.raster_pitch_mm > 0, ErrorKind::Config, "profile '" + p.name + "' needs a positive raster pitch");
}

ProfileRegistry ProfileRegistry::builtin() {
    ProfileRegistry r;
    r.add({"ideal", 0, 0, 0, 0, 0, 0, 0.4});
    r.add({"default", 0.0, 0.0008, 0.0, 0.0050, 0.10, 0.25, 0.4});
    // Simulated printers for the full run, from smoothest to roughest.
    r.add({"reference", 0.0, 0.0002, 0.0, 0.0003, 0.10, 0.25, 0.4});
    r.add({"printer_a", 0.0, 0.0008, 0.0, 0.0015, 0.10, 0.25, 0.4});
    r.add({"printer_b", 0.0, 0.0010, 0.0, 0.0030, 0.10, 0.25, 0.4});
    r.add({"printer_c", 0.005, 0.0012, 0.0, 0.0060, 0.12, 0.25, 0.4});
    return r;
}

void ProfileRegistry::add(PrinterProfile profile) {
    validate(profile);
    auto name = profile.name;
    profiles_[name] = std::move(profile);
}

const PrinterProfile& ProfileRegistry::get(const std::string& name) const {
    auto it = profiles_.find(name);
    if (it == profiles_.end()) fail(ErrorKind::UnknownProfile, "no printer profile named '" + name + "'");
    return it->second;
}

std::vector<std::string> ProfileRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : profiles_) out.push_back(name);
    return out;
}

DefectModel defect_model_for(const PrinterSettings& settings, const PrinterProfile& profile) {
    validate(settings);
    validate(profile);
    DefectModel m;
    m.surface_amplitude_mm = std::max(0.0, profile.amplitude_base_mm + profile.amplitude_per_um * settings.layer_height_um);
    m.underextrusion_rate = std::max(0.0, profile.rate_base_per_mm + profile.rate_per_mm_s * settings.nozzle_speed_mm_s);
    m.pore_radius_mm = m.underextrusion_rate > 0 ? profile.pore_radius_mm : 0.0;
    m.surface_correlation_mm = m.surface_amplitude_mm > 0 ? profile.correlation_mm : 0.0;
    return m;
}

DefectModel defect_model_for(const PrinterSettings& settings, const std::string& profile_name,
                             const ProfileRegistry& registry) {
    return defect_model_for(settings, registry.get(profile_name));
}

int layer_band(double layer_height_um, double spacing_mm) {
    const double ratio = layer_height_um / (spacing_mm * 1000.0);
    require(ratio >= 1.0 - 1e-9, ErrorKind::Resolution,
            "layer height " + std::to_string(layer_height_um) + " um is finer than the voxel pitch");
    return int(std::ceil(ratio - 1e-9));
}

namespace {

struct SolidBounds {
    int x0, y0, z0, x1, y1, z1;  // inclusive voxel indices
    bool empty = true;
};

SolidBounds solid_bounds(const LabelVolume& labels) {
    const Dims d = labels.dims();
    SolidBounds b{d.nx, d.ny, d.nz, -1, -1, -1, true};
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x)
                if (is_solid(labels.at(x, y, z))) {
                    b.x0 = std::min(b.x0, x), b.x1 = std::max(b.x1, x);
                    b.y0 = std::min(b.y0, y), b.y1 = std::max(b.y1, y);
                    b.z0 = std::min(b.z0, z), b.z1 = std::max(b.z1, z);
                    b.empty = false;
                }
    return b;
}

}  // namespace

LabelVolume apply_layer_quantization(const LabelVolume& labels, double layer_height_um) {
    const int band = layer_band(layer_height_um, labels.spacing_mm());
    LabelVolume out = labels;
    if (band == 1) return out;
    const SolidBounds b = solid_bounds(labels);
    if (b.empty) return out;
    const Dims d = labels.dims();

    const int n_bands = (d.nz - b.z0 + band - 1) / band;
#pragma omp parallel for schedule(static)
    for (int bi = 0; bi < n_bands; ++bi) {
        const int z_lo = b.z0 + bi * band;
        const int z_hi = std::min(d.nz, z_lo + band);
        const int len = z_hi - z_lo;
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                int solid = 0;
                for (int z = z_lo; z < z_hi; ++z) solid += is_solid(labels.at(x, y, z));
                const bool keep_solid = 2 * solid > len;
                for (int z = z_lo; z < z_hi; ++z) {
                    Label& l = out.at(x, y, z);
                    if (l == Label::void_) continue;
                    l = keep_solid ? Label::material : Label::background;
                }
            }
    }
    return out;
}

LabelVolume apply_layer_quantization(const VoxelGrid& grid, const LabelVolume& labels, double layer_height_um) {
    require(grid.dims() == labels.dims(), ErrorKind::Registration, "grid and labels differ in dimensions");
    return apply_layer_quantization(labels, layer_height_um);
}

std::vector<RasterSegment> raster_path(const LabelVolume& labels, double layer_height_mm, double raster_pitch_mm) {
    require(layer_height_mm > 0 && raster_pitch_mm > 0, ErrorKind::Domain, "raster needs positive layer and pitch");
    std::vector<RasterSegment> path;
    const SolidBounds b = solid_bounds(labels);
    if (b.empty) return path;
    const GridFrame& f = labels.frame();
    const double h = f.spacing_mm;
    const Vec3 lo{f.origin_mm.x + b.x0 * h, f.origin_mm.y + b.y0 * h, f.origin_mm.z + b.z0 * h};
    const Vec3 hi{f.origin_mm.x + (b.x1 + 1) * h, f.origin_mm.y + (b.y1 + 1) * h, f.origin_mm.z + (b.z1 + 1) * h};

    const int n_layers = int(std::ceil((hi.z - lo.z) / layer_height_mm - 1e-9));
    for (int layer = 0; layer < n_layers; ++layer) {
        const double z = lo.z + (layer + 0.5) * layer_height_mm;
        const bool along_x = layer % 2 == 0;
        const double across_lo = along_x ? lo.y : lo.x, across_hi = along_x ? hi.y : hi.x;
        const double run_lo = along_x ? lo.x : lo.y, run_hi = along_x ? hi.x : hi.y;
        const int n_lines = std::max(1, int(std::ceil((across_hi - across_lo) / raster_pitch_mm - 1e-9)));
        const double pitch = (across_hi - across_lo) / n_lines;
        Vec3 prev_end{};
        for (int l = 0; l < n_lines; ++l) {
            const double across = across_lo + (l + 0.5) * pitch;
            const bool forward = l % 2 == 0;
            const double a = forward ? run_lo : run_hi, e = forward ? run_hi : run_lo;
            const Vec3 from = along_x ? Vec3{a, across, z} : Vec3{across, a, z};
            const Vec3 to = along_x ? Vec3{e, across, z} : Vec3{across, e, z};
            if (l > 0) path.push_back({prev_end, from});  // serpentine turn
            path.push_back({from, to});
            prev_end = to;
        }
    }
    return path;
}

std::vector<PoreEvent> sample_pores(const std::vector<RasterSegment>& path, double rate, double mean_radius_mm,
                                    std::uint64_t seed) {
    require(rate >= 0, ErrorKind::Domain, "pore rate must be non-negative");
    std::vector<PoreEvent> events;
    if (rate == 0) return events;
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gap(rate);
    std::uniform_real_distribution<double> radius(0.5 * mean_radius_mm, 1.5 * mean_radius_mm);
    double next = gap(rng);
    double travelled = 0;
    for (const auto& seg : path) {
        const double len = seg.length();
        while (next <= travelled + len) {
            const double t = len > 0 ? (next - travelled) / len : 0.0;
            events.push_back({seg.from + t * (seg.to - seg.from), radius(rng)});
            next += gap(rng);
        }
        travelled += len;
    }
    return events;
}

namespace {

// Walls thinner than three voxels do not survive the segmentation opening.
constexpr int seal_vox = 3;

// Voxels within Chebyshev distance r of a voxel labelled `target`.
std::vector<char> near_label(const LabelVolume& l, Label target, int r) {
    const Dims d = l.dims();
    std::vector<char> m(d.count());
    const auto in = l.labels();
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = in[i] == target;
    std::vector<char> line;
    for (int axis = 0; axis < 3; ++axis) {
        const int n = axis == 0 ? d.nx : axis == 1 ? d.ny : d.nz;
        const std::ptrdiff_t stride = axis == 0 ? 1 : axis == 1 ? d.nx : std::ptrdiff_t(d.nx) * d.ny;
        line.resize(n);
        for (int z = 0; z < (axis == 2 ? 1 : d.nz); ++z)
            for (int y = 0; y < (axis == 1 ? 1 : d.ny); ++y)
                for (int x = 0; x < (axis == 0 ? 1 : d.nx); ++x) {
                    char* p = m.data() + l.frame().index(x, y, z);
                    for (int i = 0; i < n; ++i) line[i] = p[i * stride];
                    for (int i = 0; i < n; ++i) {
                        char v = 0;
                        for (int k = std::max(0, i - r); k <= std::min(n - 1, i + r) && !v; ++k) v = line[k];
                        p[i * stride] = v;
                    }
                }
    }
    return m;
}

}  // namespace

LabelVolume apply_underextrusion(const LabelVolume& labels, const DefectModel& model, std::uint64_t seed,
                                 double layer_height_mm, double raster_pitch_mm) {
    require(model.underextrusion_rate >= 0 && model.pore_radius_mm >= 0, ErrorKind::Domain,
            "defect model must be non-negative");
    LabelVolume out = labels;
    if (model.underextrusion_rate == 0 || model.pore_radius_mm == 0) return out;

    const auto path = raster_path(labels, layer_height_mm, raster_pitch_mm);
    const auto pores = sample_pores(path, model.underextrusion_rate, model.pore_radius_mm, seed);
    const GridFrame& f = labels.frame();
    const double h = f.spacing_mm;
    // Pores never come closer than seal_vox to the outside.
    const auto sealed = near_label(labels, Label::background, seal_vox);
    auto voxel_of = [&](double w, double o) { return int(std::floor((w - o) / h)); };

    for (const auto& pore : pores) {
        const int cx = voxel_of(pore.center_mm.x, f.origin_mm.x), cy = voxel_of(pore.center_mm.y, f.origin_mm.y),
                  cz = voxel_of(pore.center_mm.z, f.origin_mm.z);
        if (!f.dims.contains(cx, cy, cz) || labels.at(cx, cy, cz) != Label::material) continue;
        const int reach = int(std::ceil(pore.radius_mm / h)) + 1;
        const double r2 = pore.radius_mm * pore.radius_mm;
        for (int z = std::max(0, cz - reach); z <= std::min(f.dims.nz - 1, cz + reach); ++z)
            for (int y = std::max(0, cy - reach); y <= std::min(f.dims.ny - 1, cy + reach); ++y)
                for (int x = std::max(0, cx - reach); x <= std::min(f.dims.nx - 1, cx + reach); ++x) {
                    Label& l = out.at(x, y, z);
                    if (l != Label::material || sealed[f.index(x, y, z)]) continue;
                    const Vec3 d = f.center_mm(x, y, z) - pore.center_mm;
                    if (d.x * d.x + d.y * d.y + d.z * d.z < r2) l = Label::void_;
                }
    }
    return out;
}

namespace {

void gaussian_pass(std::vector<float>& data, const Dims& d, int axis, const std::vector<float>& taps) {
    const int radius = int(taps.size()) / 2;
    const int n = axis == 0 ? d.nx : axis == 1 ? d.ny : d.nz;
    const std::ptrdiff_t stride = axis == 0 ? 1 : axis == 1 ? d.nx : std::ptrdiff_t(d.nx) * d.ny;
    const int outer_a = axis == 0 ? d.ny : d.nx;
    const int outer_b = axis == 2 ? d.ny : d.nz;
#pragma omp parallel
    {
        std::vector<float> line(n);
#pragma omp for collapse(2) schedule(static)
        for (int b = 0; b < outer_b; ++b)
            for (int a = 0; a < outer_a; ++a) {
                std::ptrdiff_t base;
                if (axis == 0) base = std::ptrdiff_t(b) * d.nx * d.ny + std::ptrdiff_t(a) * d.nx;
                else if (axis == 1) base = std::ptrdiff_t(b) * d.nx * d.ny + a;
                else base = std::ptrdiff_t(b) * d.nx + a;
                float* p = data.data() + base;
                for (int i = 0; i < n; ++i) line[i] = p[i * stride];
                for (int i = 0; i < n; ++i) {
                    double acc = 0;
                    for (int k = -radius; k <= radius; ++k) acc += taps[k + radius] * line[std::clamp(i + k, 0, n - 1)];
                    p[i * stride] = float(acc);
                }
            }
    }
}

}  // namespace

std::vector<float> correlated_field(const Dims& dims, double correlation_vox, std::uint64_t seed) {
    std::vector<float> field(dims.count());
    const std::size_t slice = dims.slice_count();
#pragma omp parallel for schedule(static)
    for (int z = 0; z < dims.nz; ++z) {
        std::mt19937_64 rng(util::mix_seed(seed, std::uint64_t(z)));
        std::normal_distribution<float> normal(0.0f, 1.0f);
        for (std::size_t i = 0; i < slice; ++i) field[z * slice + i] = normal(rng);
    }
    if (correlation_vox >= 0.5) {
        const int radius = int(std::ceil(3.0 * correlation_vox));
        std::vector<float> taps(2 * radius + 1);
        double sum = 0;
        for (int k = -radius; k <= radius; ++k)
            sum += taps[k + radius] = float(std::exp(-0.5 * k * k / (correlation_vox * correlation_vox)));
        for (auto& t : taps) t = float(t / sum);
        for (int axis = 0; axis < 3; ++axis) gaussian_pass(field, dims, axis, taps);
    }
    double ss = 0;
    for (float v : field) ss += double(v) * v;
    const double rms = std::sqrt(ss / double(field.size()));
    if (rms > 0)
        for (float& v : field) v = float(v / rms);
    return field;
}

LabelVolume apply_surface_noise(const LabelVolume& labels, const DefectModel& model, std::uint64_t seed) {
    require(model.surface_amplitude_mm >= 0 && model.surface_correlation_mm >= 0, ErrorKind::Domain,
            "surface noise parameters must be non-negative");
    LabelVolume out = labels;
    if (model.surface_amplitude_mm == 0) return out;
    const SolidBounds b = solid_bounds(labels);
    if (b.empty) return out;
    const double h = labels.spacing_mm();
    const double min_dim = h * std::min({b.x1 - b.x0 + 1, b.y1 - b.y0 + 1, b.z1 - b.z0 + 1});
    require(model.surface_amplitude_mm <= min_dim / 2, ErrorKind::DegenerateGeometry,
            "surface amplitude exceeds half the body's smallest dimension");

    const Dims d = labels.dims();
    std::vector<char> solid(d.count());
    const auto in = labels.labels();
    for (std::size_t i = 0; i < solid.size(); ++i) solid[i] = is_solid(in[i]);
    const auto sd = signed_distance(d, solid);
    // Material within seal_vox of a void is kept so every cavity stays closed.
    const auto shell = near_label(labels, Label::void_, seal_vox);
    const auto field = correlated_field(d, model.surface_correlation_mm / h, seed);

    const double amp = model.surface_amplitude_mm / h;
    const double clip = 3.0 * amp;
    auto dst = out.labels();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(dst.size()); ++i) {
        if (std::abs(sd[i]) > clip + 1.0 || dst[i] == Label::void_ || shell[i]) continue;
        const double shift = std::clamp(amp * double(field[i]), -clip, clip);
        const bool now_solid = sd[i] + shift > 0;
        if (now_solid && dst[i] == Label::background) dst[i] = Label::material;
        else if (!now_solid && dst[i] == Label::material) dst[i] = Label::background;
    }
    return out;
}

int print_margin_vox(const DefectModel& model, double spacing_mm) {
    return int(std::ceil(3.0 * model.surface_amplitude_mm / spacing_mm)) + 3;
}

std::pair<VoxelGrid, LabelVolume> simulate_print(const PhantomSpec& spec, const PrinterSettings& settings,
                                                 const PrinterProfile& profile, double spacing_mm, int margin_vox) {
    const DefectModel model = defect_model_for(settings, profile);
    if (margin_vox < 0) margin_vox = print_margin_vox(model, spacing_mm);
    auto [grid, labels] = voxelize(spec, spacing_mm, margin_vox);
    LabelVolume printed = apply_layer_quantization(grid, labels, settings.layer_height_um);
    printed = apply_surface_noise(printed, model, util::mix_seed(settings.seed, 1));
    printed = apply_underextrusion(printed, model, util::mix_seed(settings.seed, 2),
                                   settings.layer_height_um / 1000.0, profile.raster_pitch_mm);
    return {grid_from_labels(printed, float(spec.material_mu)), std::move(printed)};
}

}  // namespace tomoprint
