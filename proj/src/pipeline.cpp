#include "tomoprint/pipeline.hpp"

#include <fftw3.h>
#include <omp.h>
#include <openssl/crypto.h>

#include <algorithm>
#include <array>
#include <set>
#include <tuple>

#include <json.hpp>

#include "tomoprint/charts.hpp"
#include "tomoprint/io.hpp"
#include "tomoprint/xray.hpp"
#include "util/hash.hpp"

namespace tomoprint {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class F>
auto stage(const std::string& name, F&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e);
    }
}

std::string filter_name(FilterKind k) { return k == FilterKind::ramp ? "ramp" : "ramp_hann"; }

FilterKind parse_filter(const std::string& s) {
    if (s == "ramp") return FilterKind::ramp;
    if (s == "ramp_hann" || s == "hann") return FilterKind::ramp_hann;
    fail(ErrorKind::Config, "unknown filter '" + s + "'");
}

json to_json(const PipelineConfig& c) {
    json j{{"mode", c.mode == RunMode::synthetic ? "synthetic" : "ingest"},
           {"samples", c.samples},
           {"settings", c.settings},
           {"profiles", c.profiles},
           {"reference_profile", c.reference_profile},
           {"reference_setting_id", c.reference_setting_id},
           {"spacing_mm", c.spacing_mm},
           {"n_angles", c.n_angles},
           {"noise", c.noise},
           {"i0_photons", c.i0_photons},
           {"filter", {{"kind", filter_name(c.filter.kind)}, {"cutoff", c.filter.cutoff}}},
           {"smoothing",
            {{"structuring_radius_vox", c.smoothing.structuring_radius_vox},
             {"void_exclusion_radius_mm", c.smoothing.void_exclusion_radius_mm}}},
           {"align_radius_vox", c.align_radius_vox},
           {"match_radius_mm", c.match_radius_mm},
           {"sample1_porosity", c.sample1_porosity},
           {"sample2_porosity", c.sample2_porosity},
           {"seed", c.seed},
           {"out", c.out.string()},
           {"persist_intermediates", c.persist_intermediates},
           {"jobs", c.jobs},
           {"printer_id", c.printer_id},
           {"setting_id", c.setting_id}};
    if (c.profile_file) j["profile_file"] = c.profile_file->string();
    if (!c.phantoms.empty()) {
        j["phantoms"] = json::array();
        for (const auto& p : c.phantoms) j["phantoms"].push_back(p.string());
    }
    if (c.mode == RunMode::ingest) {
        j["stack_dir"] = c.stack_dir.string();
        j["stack_sidecar"] = c.stack_sidecar.string();
        if (c.reference_phantom) j["reference_phantom"] = c.reference_phantom->string();
    }
    return j;
}

ProfileRegistry registry_for(const PipelineConfig& c) {
    ProfileRegistry r = ProfileRegistry::builtin();
    if (c.profile_file)
        for (auto& p : io::read_profiles(*c.profile_file)) r.add(p);
    return r;
}

std::vector<std::size_t> histogram(const std::vector<VoidDetection>& voids, const std::vector<double>& edges) {
    std::vector<std::size_t> h(edges.size(), 0);
    for (const auto& v : voids) {
        const double s = v.equivalent_size_mm + 1e-9;
        for (std::size_t b = edges.size(); b-- > 0;)
            if (s >= edges[b]) {
                ++h[b];
                break;
            }
    }
    return h;
}

void fill_metrics(MetricsReport& r, const LabelVolume& seg, const LabelVolume* reference, const SmoothingSpec& sm) {
    r.cusp_density_xy = cusp_density(seg, Plane::XY, sm);
    r.cusp_density_xz = cusp_density(seg, Plane::XZ, sm);
    if (reference) {
        r.roughness_xy = roughness(seg, *reference, Plane::XY, sm);
        r.roughness_xz = roughness(seg, *reference, Plane::XZ, sm);
    }
    r.porosity_pct = porosity(seg);
}

}  // namespace

std::string setting_name(int row) {
    static const std::array<const char*, 6> names{"First", "Second", "Third", "Fourth", "Fifth", "Sixth"};
    require(row >= 1 && row <= 6, ErrorKind::Config, "setting row must be 1..6");
    return names[row - 1];
}

PipelineConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
    }
    require(j.is_object(), ErrorKind::Config, "config must be a JSON object");
    static const std::set<std::string> known{
        "mode", "samples", "phantoms", "settings", "profiles", "reference_profile", "reference_setting_id", "profile_file",
        "spacing_mm", "n_angles", "noise", "i0_photons", "filter", "smoothing", "align_radius_vox",
        "match_radius_mm", "sample1_porosity", "sample2_porosity", "seed", "out", "persist_intermediates", "jobs",
        "stack_dir", "stack_sidecar", "reference_phantom", "printer_id", "setting_id"};
    for (const auto& [k, v] : j.items())
        require(known.count(k) != 0, ErrorKind::Config, "unknown config key '" + k + "'");

    PipelineConfig c;
    try {
        if (j.contains("mode")) {
            const auto m = j["mode"].get<std::string>();
            require(m == "synthetic" || m == "ingest", ErrorKind::Config, "mode must be synthetic or ingest");
            c.mode = m == "synthetic" ? RunMode::synthetic : RunMode::ingest;
        }
        c.samples = j.value("samples", c.samples);
        if (j.contains("phantoms"))
            for (const auto& p : j["phantoms"]) c.phantoms.emplace_back(p.get<std::string>());
        c.settings = j.value("settings", c.settings);
        c.profiles = j.value("profiles", c.profiles);
        c.reference_profile = j.value("reference_profile", c.reference_profile);
        c.reference_setting_id = j.value("reference_setting_id", c.reference_setting_id);
        if (j.contains("profile_file")) c.profile_file = j["profile_file"].get<std::string>();
        c.spacing_mm = j.value("spacing_mm", c.spacing_mm);
        c.n_angles = j.value("n_angles", c.n_angles);
        c.noise = j.value("noise", c.noise);
        c.i0_photons = j.value("i0_photons", c.i0_photons);
        if (j.contains("filter")) {
            const auto& f = j["filter"];
            c.filter.kind = parse_filter(f.value("kind", std::string("ramp")));
            c.filter.cutoff = f.value("cutoff", 1.0);
        }
        if (j.contains("smoothing")) {
            const auto& s = j["smoothing"];
            c.smoothing.structuring_radius_vox = s.value("structuring_radius_vox", c.smoothing.structuring_radius_vox);
            c.smoothing.void_exclusion_radius_mm =
                s.value("void_exclusion_radius_mm", c.smoothing.void_exclusion_radius_mm);
        }
        c.align_radius_vox = j.value("align_radius_vox", c.align_radius_vox);
        c.match_radius_mm = j.value("match_radius_mm", c.match_radius_mm);
        c.sample1_porosity = j.value("sample1_porosity", c.sample1_porosity);
        c.sample2_porosity = j.value("sample2_porosity", c.sample2_porosity);
        c.seed = j.value("seed", c.seed);
        c.out = j.value("out", c.out.string());
        c.persist_intermediates = j.value("persist_intermediates", c.persist_intermediates);
        c.jobs = j.value("jobs", c.jobs);
        c.stack_dir = j.value("stack_dir", std::string());
        c.stack_sidecar = j.value("stack_sidecar", std::string());
        if (j.contains("reference_phantom")) c.reference_phantom = j["reference_phantom"].get<std::string>();
        c.printer_id = j.value("printer_id", c.printer_id);
        c.setting_id = j.value("setting_id", c.setting_id);
    } catch (const json::exception& e) {
        fail(ErrorKind::Config, std::string("config: ") + e.what());
    }
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    require(fs::exists(path), ErrorKind::Config, "config file '" + path.string() + "' not found");
    return parse_config(io::read_text(path));
}

std::string config_to_json(const PipelineConfig& c) { return to_json(c).dump(2) + "\n"; }

void validate(const PipelineConfig& c) {
    require(c.spacing_mm > 0, ErrorKind::Config, "spacing_mm must be positive");
    require(c.n_angles > 0, ErrorKind::Config, "n_angles must be positive");
    require(c.align_radius_vox >= 0, ErrorKind::Config, "align_radius_vox must be >= 0");
    require(c.match_radius_mm > 0, ErrorKind::Config, "match_radius_mm must be positive");
    require(!c.noise || c.i0_photons > 0, ErrorKind::Config, "i0_photons must be positive");
    require(c.jobs >= 0, ErrorKind::Config, "jobs must be >= 0");
    try {
        validate(c.filter);
        validate(c.smoothing);
    } catch (const Error& e) {
        fail(ErrorKind::Config, e.what());
    }
    if (c.mode == RunMode::ingest) {
        require(!c.stack_dir.empty() && !c.stack_sidecar.empty(), ErrorKind::Config,
                "ingest mode needs stack_dir and stack_sidecar");
        return;
    }
    if (c.phantoms.empty()) {
        require(!c.samples.empty(), ErrorKind::Config, "no samples selected");
        for (int s : c.samples) require(s == 1 || s == 2, ErrorKind::Config, "samples must be 1 or 2");
    }
    std::set<std::string> stems;
    for (const auto& p : c.phantoms)
        require(stems.insert(p.stem().string()).second, ErrorKind::Config,
                "phantom file names must have distinct stems: '" + p.string() + "'");
    for (int r : c.settings) setting_name(r);
    const ProfileRegistry reg = registry_for(c);
    for (const auto& p : c.profiles)
        require(reg.contains(p), ErrorKind::Config, "unknown printer profile '" + p + "'");
    require(c.reference_profile.empty() || reg.contains(c.reference_profile), ErrorKind::Config,
            "unknown reference profile '" + c.reference_profile + "'");
    require(!c.profiles.empty() || !c.reference_profile.empty(), ErrorKind::Config, "no printers selected");
}

PhantomSpec sample_spec(int sample, const PipelineConfig& config) {
    return sample == 1 ? sample1_spec(config.sample1_porosity) : sample2_spec(config.sample2_porosity);
}

AnalysisResult analyze_synthetic(const SyntheticCase& c, const PipelineConfig& config, const fs::path& dir) {
    AnalysisResult out;
    out.seed = c.settings.seed;
    out.designed_porosity_pct = 100.0 * designed_porosity(c.spec);
    const bool persist = config.persist_intermediates && !dir.empty();
    if (!dir.empty()) fs::create_directories(dir);

    const DefectModel model = stage("simulate", [&] { return defect_model_for(c.settings, c.profile); });
    const int margin = print_margin_vox(model, config.spacing_mm);
    auto [grid, printed] =
        stage("simulate", [&] { return simulate_print(c.spec, c.settings, c.profile, config.spacing_mm, margin); });
    const LabelVolume reference = stage("phantom", [&] { return voxelize(c.spec, config.spacing_mm, margin).second; });

    Sinogram sino = stage("scan", [&] {
        const ScanGeometry g = default_geometry(grid.frame(), config.n_angles);
        Sinogram s = project_volume(grid, g);
        if (config.noise) s = add_photon_noise(s, config.i0_photons, util::mix_seed(c.settings.seed, 3));
        return s;
    });
    const VoxelGrid recon = stage("recon", [&] { return reconstruct_volume(sino, config.filter); });
    const OtsuResult otsu_r = stage("segment", [&] { return otsu(recon); });
    out.threshold = otsu_r.threshold;
    const LabelVolume seg = stage("segment", [&] { return segment(recon, otsu_r.threshold); });
    const Alignment al = stage("align", [&] { return align(seg, reference, config.align_radius_vox); });
    out.shift = al.shift;

    MetricsReport& r = out.report;
    r.printer_id = c.printer_id;
    r.setting_id = c.setting_id;
    r.setting_index = c.setting_index;
    r.sample_id = c.sample_id;
    stage("metrics", [&] {
        fill_metrics(r, al.registered, &reference, config.smoothing);
        out.voids = extract_voids(al.registered);
        out.detectability = score_detectability(out.voids, c.spec, config.match_radius_mm);
        r.void_histogram_edges_mm = default_size_edges();
        r.void_histogram = histogram(out.voids, r.void_histogram_edges_mm);
        return 0;
    });

    if (!dir.empty()) {
        stage("write", [&] {
            io::write_voids_csv(dir / "voids.csv", out.voids);
            if (persist) {
                io::write_phantom(dir / "phantom.txt", c.spec);
                io::write_labels(dir / "printed_labels.raw", printed);
                io::write_grid(dir / "printed_mu.raw", grid);
                io::write_sinogram(dir / "sinogram.raw", sino);
                io::write_grid(dir / "recon.raw", recon);
                io::write_labels(dir / "segmented.raw", seg);
            }
            return 0;
        });
    }
    return out;
}

namespace {

AnalysisResult analyze_ingest(const PipelineConfig& config, const fs::path& dir) {
    AnalysisResult out;
    out.name = "ingest";
    const VoxelGrid grid = stage("ingest", [&] { return io::ingest_stack(config.stack_dir, config.stack_sidecar); });
    const OtsuResult otsu_r = stage("segment", [&] { return otsu(grid); });
    out.threshold = otsu_r.threshold;
    LabelVolume seg = stage("segment", [&] { return segment(grid, otsu_r.threshold); });

    std::optional<PhantomSpec> spec;
    std::optional<LabelVolume> reference;
    if (config.reference_phantom) {
        spec = stage("phantom", [&] { return io::read_phantom(*config.reference_phantom); });
        reference = stage("phantom", [&] {
            const double h = grid.spacing_mm();
            const Dims d = grid.dims();
            const int bx = int(std::lround(spec->outer_dims_mm.x / h));
            const int m = (d.nx - bx) / 2;
            require(m >= 0, ErrorKind::Registration, "reference phantom is larger than the scan");
            auto ref = voxelize(*spec, h, m).second;
            require(ref.dims() == d, ErrorKind::Registration, "reference phantom does not fit the scan grid");
            return ref;
        });
        const Alignment al = stage("align", [&] { return align(seg, *reference, config.align_radius_vox); });
        out.shift = al.shift;
        seg = al.registered;
    }

    MetricsReport& r = out.report;
    r.printer_id = config.printer_id;
    r.setting_id = config.setting_id;
    r.sample_id = "scan";
    stage("metrics", [&] {
        fill_metrics(r, seg, reference ? &*reference : nullptr, config.smoothing);
        out.voids = extract_voids(seg);
        if (spec) out.detectability = score_detectability(out.voids, *spec, config.match_radius_mm);
        r.void_histogram_edges_mm = default_size_edges();
        r.void_histogram = histogram(out.voids, r.void_histogram_edges_mm);
        return 0;
    });
    fs::create_directories(dir);
    stage("write", [&] {
        io::write_voids_csv(dir / "voids.csv", out.voids);
        if (config.persist_intermediates) io::write_labels(dir / "segmented.raw", seg);
        return 0;
    });
    return out;
}

void collect_files(const fs::path& root, const fs::path& dir, std::vector<fs::path>& out) {
    if (!fs::exists(dir)) return;
    std::vector<fs::path> found;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) found.push_back(fs::relative(e.path(), root));
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
}

}  // namespace

std::vector<fs::path> emit_report(const std::vector<MetricsReport>& reports, const fs::path& outdir) {
    require(!reports.empty(), ErrorKind::EmptySample, "no reports to emit");
    std::error_code ec;
    fs::create_directories(outdir, ec);
    require(!ec && fs::is_directory(outdir), ErrorKind::Io, "cannot create output directory '" + outdir.string() + "'");

    std::vector<fs::path> files;
    io::write_metrics_csv(outdir / "metrics.csv", reports);
    files.push_back("metrics.csv");

    const std::array<std::pair<Metric, Plane>, 5> tables{{{Metric::cusp_density, Plane::XY},
                                                          {Metric::cusp_density, Plane::XZ},
                                                          {Metric::roughness, Plane::XY},
                                                          {Metric::roughness, Plane::XZ},
                                                          {Metric::porosity, Plane::XY}}};
    for (const auto& [m, p] : tables) {
        const std::string stem = m == Metric::porosity ? "porosity" : to_string(m) + "_" + to_string(p);
        io::write_rankings_csv(outdir / ("rankings_" + stem + ".csv"), rank_settings(reports, m, p));
        files.push_back("rankings_" + stem + ".csv");
    }

    fs::create_directories(outdir / "charts");
    std::vector<std::string> samples;
    for (const auto& r : reports)
        if (std::find(samples.begin(), samples.end(), r.sample_id) == samples.end()) samples.push_back(r.sample_id);
    for (const auto& s : samples) {
        const std::array<std::tuple<Metric, Plane, std::string, std::string>, 5> charts_spec{{
            {Metric::porosity, Plane::XY, "porosity", "porosity (%)"},
            {Metric::cusp_density, Plane::XY, "cusp_density_XY", "cusp density (%)"},
            {Metric::cusp_density, Plane::XZ, "cusp_density_XZ", "cusp density (%)"},
            {Metric::roughness, Plane::XY, "roughness_XY", "deviation voxels"},
            {Metric::roughness, Plane::XZ, "roughness_XZ", "deviation voxels"},
        }};
        for (const auto& [m, p, stem, unit] : charts_spec) {
            std::vector<charts::Bar> bars;
            for (const auto& r : reports)
                if (r.sample_id == s) bars.push_back({r.printer_id + " " + r.setting_id, r.value(m, p), r.printer_id});
            const fs::path rel = fs::path("charts") / (s + "_" + stem + ".svg");
            charts::write_bar_chart(outdir / rel, s + " " + stem, unit, bars);
            files.push_back(rel);
        }
    }
    return files;
}

fs::path write_manifest(const PipelineConfig& config, const std::vector<AnalysisResult>& analyses,
                        const std::vector<fs::path>& relative_outputs, std::vector<OutputFile>* hashed) {
    json outputs = json::array();
    for (const auto& rel : relative_outputs) {
        const std::string h = io::sha256_file(config.out / rel);
        outputs.push_back({{"path", rel.generic_string()}, {"sha256", h}});
        if (hashed) hashed->push_back({rel, h});
    }
    json list = json::array();
    for (const auto& a : analyses)
        list.push_back({{"name", a.name},
                        {"sample", a.report.sample_id},
                        {"printer", a.report.printer_id},
                        {"setting", a.report.setting_id},
                        {"seed", a.seed},
                        {"designed_porosity_pct", a.designed_porosity_pct},
                        {"threshold_per_mm", a.threshold},
                        {"shift_vox", {a.shift.dx, a.shift.dy, a.shift.dz}}});
    json m{{"tool", "tomoprint"},
           {"version", kVersion},
           {"versions", {{"tomoprint", kVersion}, {"fftw", std::string(fftw_version)}, {"openssl", std::string(OpenSSL_version(OPENSSL_VERSION))}}},
           {"config", to_json(config)},
           {"seed", config.seed},
           {"analysis_count", analyses.size()},
           {"analyses", list},
           {"outputs", outputs}};
    const fs::path path = config.out / "manifest.json";
    io::write_text(path, m.dump(2) + "\n");
    return path;
}

ReportBundle run_pipeline(const PipelineConfig& config) {
    validate(config);
    if (config.jobs > 0) omp_set_num_threads(config.jobs);
    std::error_code ec;
    fs::create_directories(config.out, ec);
    require(!ec && fs::is_directory(config.out), ErrorKind::Io,
            "cannot create output directory '" + config.out.string() + "'");
    io::write_text(config.out / "config.json", config_to_json(config));

    ReportBundle bundle;
    if (config.mode == RunMode::ingest) {
        bundle.analyses.push_back(analyze_ingest(config, config.out / "analyses" / "ingest"));
    } else {
        const ProfileRegistry reg = registry_for(config);
        const auto table = settings_table();
        // (id, seed stream, phantom)
        std::vector<std::tuple<std::string, std::uint64_t, PhantomSpec>> samples;
        for (int sample : config.phantoms.empty() ? config.samples : std::vector<int>{})
            samples.emplace_back("sample" + std::to_string(sample), sample,
                                 stage("phantom", [&] { return sample_spec(sample, config); }));
        for (std::size_t i = 0; i < config.phantoms.size(); ++i)
            samples.emplace_back(config.phantoms[i].stem().string(), 100 + i,
                                 stage("phantom", [&] { return io::read_phantom(config.phantoms[i]); }));
        for (const auto& [sample_id, sample, spec] : samples) {
            std::vector<SyntheticCase> cases;
            for (std::size_t p = 0; p < config.profiles.size(); ++p)
                for (int row : config.settings) {
                    SyntheticCase c{spec, table[row - 1], reg.get(config.profiles[p]), config.profiles[p],
                                    setting_name(row), sample_id, row};
                    c.settings.seed = util::mix_seed(config.seed, sample * 10000 + p * 100 + row);
                    cases.push_back(c);
                }
            if (!config.reference_profile.empty()) {
                SyntheticCase c{spec, table[0], reg.get(config.reference_profile), config.reference_profile,
                                config.reference_setting_id, sample_id, 0};
                c.settings.seed = util::mix_seed(config.seed, sample * 10000 + 9999);
                cases.push_back(c);
            }
            for (const auto& c : cases) {
                const std::string name = c.sample_id + "_" + c.printer_id + "_" + c.setting_id;
                AnalysisResult a = analyze_synthetic(c, config, config.out / "analyses" / name);
                a.name = name;
                bundle.analyses.push_back(std::move(a));
            }
        }
    }

    std::vector<MetricsReport> reports;
    for (const auto& a : bundle.analyses) reports.push_back(a.report);
    std::vector<fs::path> outputs{"config.json"};
    const auto emitted = stage("report", [&] { return emit_report(reports, config.out); });
    outputs.insert(outputs.end(), emitted.begin(), emitted.end());
    collect_files(config.out, config.out / "analyses", outputs);
    bundle.manifest = write_manifest(config, bundle.analyses, outputs, &bundle.files);
    return bundle;
}

}  // namespace tomoprint
