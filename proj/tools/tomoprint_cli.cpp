// tomoprint command-line front end.
//
// Exit codes: 0 success, 2 configuration/usage, 3 stage failure, 4 I/O or
// ingestion failure, 1 anything unexpected.

#include <omp.h>

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "tomoprint/io.hpp"
#include "tomoprint/pipeline.hpp"

namespace fs = std::filesystem;
using namespace tomoprint;

namespace {

enum Exit { ok = 0, unexpected = 1, config_error = 2, stage_error = 3, io_error = 4 };

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Config:
        case ErrorKind::UnknownProfile: return config_error;
        case ErrorKind::Io:
        case ErrorKind::Ingestion: return io_error;
        default: return stage_error;
    }
}

ProfileRegistry registry(const std::string& profiles_file) {
    ProfileRegistry r = ProfileRegistry::builtin();
    if (!profiles_file.empty())
        for (auto& p : io::read_profiles(profiles_file)) r.add(p);
    return r;
}

PhantomSpec load_spec(int sample, const std::string& phantom_file, double porosity) {
    if (!phantom_file.empty()) return io::read_phantom(phantom_file);
    require(sample == 1 || sample == 2, ErrorKind::Config, "--sample must be 1 or 2 (or pass --phantom)");
    PipelineConfig c;
    if (porosity > 0) c.sample1_porosity = c.sample2_porosity = porosity;
    return sample_spec(sample, c);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tomoprint: print-defect simulation, CT reconstruction and metrology"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 1;
    std::string out;
    int jobs = 0;
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--out", out, "Output file or directory");
    app.add_option("--jobs", jobs, "OpenMP threads (0 = default)")->check(CLI::NonNegativeNumber);

    int sample = 0;
    double target_porosity = 0;
    double spacing = 0.05;
    std::string phantom_file, profiles_file;

    auto* phantom = app.add_subcommand("phantom", "Write a sample phantom (and optionally its voxelization)");
    phantom->add_option("--sample", sample, "1 or 2")->required();
    phantom->add_option("--porosity", target_porosity, "Target porosity fraction (default per sample)");
    double phantom_spacing = 0;
    phantom->add_option("--spacing", phantom_spacing, "Also voxelize at this pitch (mm)");

    auto* simulate = app.add_subcommand("simulate", "Simulate a print: phantom -> printed labels and mu grid");
    int setting = 1;
    std::string profile = "default";
    simulate->add_option("--sample", sample, "1 or 2");
    simulate->add_option("--phantom", phantom_file, "Phantom text file instead of a built-in sample");
    simulate->add_option("--setting", setting, "Settings row 1..6")->check(CLI::Range(1, 6));
    simulate->add_option("--profile", profile, "Printer profile name");
    simulate->add_option("--profiles-file", profiles_file, "Extra profile definitions (JSON)");
    simulate->add_option("--spacing", spacing, "Voxel pitch (mm)");

    auto* scan = app.add_subcommand("scan", "Forward-project a mu grid into a sinogram");
    std::string in;
    int angles = 720;
    bool noise = false;
    double i0 = 1e5;
    scan->add_option("--in", in, "Input grid (.raw with .json sidecar)")->required();
    scan->add_option("--angles", angles, "Views over 360 degrees");
    scan->add_flag("--noise", noise, "Add Poisson photon noise");
    scan->add_option("--i0", i0, "Incident photons per ray");

    auto* recon = app.add_subcommand("recon", "Filtered back projection");
    std::string filter = "ramp";
    double cutoff = 1.0;
    recon->add_option("--in", in, "Input sinogram")->required();
    recon->add_option("--filter", filter, "ramp or ramp_hann")->check(CLI::IsMember({"ramp", "ramp_hann"}));
    recon->add_option("--cutoff", cutoff, "Cutoff as a fraction of Nyquist");

    auto* analyze = app.add_subcommand("analyze", "Segment a reconstruction and compute metrics");
    std::string reference_labels, printer_id = "scan", setting_id = "scan", sample_id = "sample";
    int radius = 3, align_radius = 2;
    double exclusion = 0.1, match_radius = 0.15;
    analyze->add_option("--in", in, "Reconstructed grid")->required();
    analyze->add_option("--reference", reference_labels, "Reference label volume for roughness and alignment");
    analyze->add_option("--phantom", phantom_file, "Phantom text for void detectability");
    analyze->add_option("--printer", printer_id);
    analyze->add_option("--setting-id", setting_id);
    analyze->add_option("--sample-id", sample_id);
    analyze->add_option("--radius", radius, "Structuring radius (voxels)");
    analyze->add_option("--exclusion", exclusion, "Void exclusion radius (mm)");
    analyze->add_option("--align-radius", align_radius, "Registration search radius (voxels)");
    analyze->add_option("--match-radius", match_radius, "Void match radius (mm)");

    auto* rank = app.add_subcommand("rank", "Best setting per printer from a metrics CSV");
    std::string metrics_csv, metric = "cusp_density", plane = "XY";
    rank->add_option("--metrics", metrics_csv)->required();
    rank->add_option("--metric", metric)->check(CLI::IsMember({"cusp_density", "roughness", "porosity"}));
    rank->add_option("--plane", plane)->check(CLI::IsMember({"XY", "XZ"}));

    auto* report = app.add_subcommand("report", "Rankings and charts from a metrics CSV");
    report->add_option("--metrics", metrics_csv)->required();

    auto* run = app.add_subcommand("run", "Full flow from a JSON config");
    std::string config_path;
    run->add_option("--config", config_path, "Pipeline config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        if (jobs > 0) omp_set_num_threads(jobs);

        if (*phantom) {
            const PhantomSpec spec = load_spec(sample, "", target_porosity);
            const fs::path dir = out.empty() ? fs::path("phantom") : fs::path(out);
            fs::create_directories(dir);
            io::write_phantom(dir / "phantom.txt", spec);
            if (phantom_spacing > 0) {
                auto [grid, labels] = voxelize(spec, phantom_spacing);
                io::write_grid(dir / "mu.raw", grid);
                io::write_labels(dir / "labels.raw", labels);
            }
            std::cout << "designed porosity " << 100.0 * designed_porosity(spec) << " %, " << spec.voids.size()
                      << " voids\n";
        } else if (*simulate) {
            const PhantomSpec spec = load_spec(sample, phantom_file, target_porosity);
            const ProfileRegistry reg = registry(profiles_file);
            const PrinterProfile& prof = reg.get(profile);
            PrinterSettings s = settings_table()[setting - 1];
            s.seed = seed;
            const DefectModel model = defect_model_for(s, prof);
            const int margin = print_margin_vox(model, spacing);
            auto [grid, printed] = simulate_print(spec, s, prof, spacing, margin);
            const LabelVolume truth = voxelize(spec, spacing, margin).second;
            const fs::path dir = out.empty() ? fs::path("simulate") : fs::path(out);
            fs::create_directories(dir);
            io::write_phantom(dir / "phantom.txt", spec);
            io::write_grid(dir / "printed_mu.raw", grid);
            io::write_labels(dir / "printed_labels.raw", printed);
            io::write_labels(dir / "truth_labels.raw", truth);
            std::cout << "printed porosity " << porosity(printed) << " %\n";
        } else if (*scan) {
            const VoxelGrid grid = io::read_grid(in);
            Sinogram s = project_volume(grid, default_geometry(grid.frame(), angles));
            if (noise) s = add_photon_noise(s, i0, seed);
            io::write_sinogram(out.empty() ? fs::path("sinogram.raw") : fs::path(out), s);
        } else if (*recon) {
            const Sinogram s = io::read_sinogram(in);
            FilterSpec f{filter == "ramp" ? FilterKind::ramp : FilterKind::ramp_hann, cutoff};
            io::write_grid(out.empty() ? fs::path("recon.raw") : fs::path(out), reconstruct_volume(s, f));
        } else if (*analyze) {
            const VoxelGrid grid = io::read_grid(in);
            SmoothingSpec sm{radius, exclusion};
            const double thr = otsu_threshold(grid);
            LabelVolume seg = segment(grid, thr);
            MetricsReport r;
            r.printer_id = printer_id;
            r.setting_id = setting_id;
            r.sample_id = sample_id;
            if (!reference_labels.empty()) {
                const LabelVolume ref = io::read_labels(reference_labels);
                seg = align(seg, ref, align_radius).registered;
                r.roughness_xy = roughness(seg, ref, Plane::XY, sm);
                r.roughness_xz = roughness(seg, ref, Plane::XZ, sm);
            }
            r.cusp_density_xy = cusp_density(seg, Plane::XY, sm);
            r.cusp_density_xz = cusp_density(seg, Plane::XZ, sm);
            r.porosity_pct = porosity(seg);
            auto voids = extract_voids(seg);
            const fs::path dir = out.empty() ? fs::path("analysis") : fs::path(out);
            fs::create_directories(dir);
            if (!phantom_file.empty()) {
                const auto det = score_detectability(voids, io::read_phantom(phantom_file), match_radius);
                std::cout << "detected " << 100.0 * det.overall_rate << " % of designed voids\n";
            }
            io::write_labels(dir / "segmented.raw", seg);
            io::write_voids_csv(dir / "voids.csv", voids);
            io::write_metrics_csv(dir / "metrics.csv", {r});
            std::cout << "threshold " << thr << " /mm, porosity " << r.porosity_pct << " %\n";
        } else if (*rank) {
            const auto rankings = rank_settings(io::read_metrics_csv(metrics_csv), parse_metric(metric), parse_plane(plane));
            if (out.empty()) std::cout << io::format_rankings_csv(rankings);
            else io::write_rankings_csv(out, rankings);
        } else if (*report) {
            const fs::path dir = out.empty() ? fs::path("report") : fs::path(out);
            for (const auto& f : emit_report(io::read_metrics_csv(metrics_csv), dir)) std::cout << (dir / f).string() << "\n";
        } else if (*run) {
            PipelineConfig c = load_config(config_path);
            if (app.get_option("--seed")->count()) c.seed = seed;
            if (!out.empty()) c.out = out;
            if (jobs > 0) c.jobs = jobs;
            const ReportBundle b = run_pipeline(c);
            std::cout << b.analyses.size() << " analyses, manifest " << b.manifest.string() << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "tomoprint: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "tomoprint: " << e.what() << "\n";
        return io_error;
    } catch (const std::exception& e) {
        std::cerr << "tomoprint: unexpected failure: " << e.what() << "\n";
        return unexpected;
    }
    return ok;
}
