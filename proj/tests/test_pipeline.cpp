#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "test_util.hpp"
#include "tomoprint/io.hpp"
#include "tomoprint/pipeline.hpp"

using namespace tomoprint;
using testutil::kind_of;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

PhantomSpec tiny(double edge, std::string label) {
    PhantomSpec s;
    s.outer_dims_mm = {edge, edge, edge};
    s.label = std::move(label);
    s.voids.push_back({VoidShape::cube, 0.4, {0.5, 0.5, 0.5}});
    s.voids.push_back({VoidShape::sphere, 0.4, {edge - 0.5, edge - 0.5, edge - 0.5}});
    s.voids.push_back({VoidShape::cube, 0.3, {edge - 0.45, 0.45, edge / 2}});
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PipelineConfig tiny_config(const fs::path& dir) {
    io::write_phantom(dir / "tiny_a.txt", tiny(1.5, "a"));
    io::write_phantom(dir / "tiny_b.txt", tiny(1.6, "b"));
    PipelineConfig c;
    c.phantoms = {dir / "tiny_a.txt", dir / "tiny_b.txt"};
    c.n_angles = 90;
    c.out = dir / "out";
    return c;
}

}  // namespace

TEST_CASE("config parsing") {
    const PipelineConfig c = parse_config(R"({"samples":[2],"settings":[1,5],"profiles":["printer_b"],
        "filter":{"kind":"ramp_hann","cutoff":0.5},"phantoms":["x/p.txt"],"seed":9,"n_angles":180})");
    CHECK(c.samples == std::vector<int>{2});
    CHECK(c.settings == std::vector<int>{1, 5});
    CHECK(c.profiles == std::vector<std::string>{"printer_b"});
    CHECK(c.filter.kind == FilterKind::ramp_hann);
    CHECK(c.filter.cutoff == 0.5);
    CHECK(c.phantoms == std::vector<fs::path>{"x/p.txt"});
    CHECK(c.seed == 9);
    CHECK(c.n_angles == 180);

    const PipelineConfig back = parse_config(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));

    CHECK(kind_of([] { parse_config(R"({"sampels":[1]})"); }) == ErrorKind::Config);
    CHECK(kind_of([] { parse_config("{not json"); }) == ErrorKind::Config);
    CHECK(kind_of([] { parse_config(R"({"n_angles":"many"})"); }) == ErrorKind::Config);
    CHECK(kind_of([] { parse_config(R"({"mode":"batch"})"); }) == ErrorKind::Config);
    CHECK(kind_of([] { parse_config("[1,2]"); }) == ErrorKind::Config);
    CHECK(kind_of([] { load_config("/nonexistent/config.json"); }) == ErrorKind::Config);
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(validate(PipelineConfig{}));
    auto bad = [](auto edit) {
        PipelineConfig c;
        edit(c);
        return kind_of([&] { validate(c); });
    };
    CHECK(bad([](PipelineConfig& c) { c.samples = {3}; }) == ErrorKind::Config);
    CHECK(bad([](PipelineConfig& c) { c.samples.clear(); }) == ErrorKind::Config);
    CHECK(bad([](PipelineConfig& c) { c.settings = {7}; }) == ErrorKind::Config);
    CHECK(bad([](PipelineConfig& c) { c.profiles = {"printer_z"}; }) == ErrorKind::Config);
    CHECK(bad([](PipelineConfig& c) { c.reference_profile = "nobody"; }) == ErrorKind::Config);
    CHECK(bad([](PipelineConfig& c) { c.spacing_mm = 0; }) == ErrorKind::Config);
    CHECK(bad([](PipelineConfig& c) { c.n_angles = 0; }) == ErrorKind::Config);
    CHECK(bad([](PipelineConfig& c) { c.filter.cutoff = 0; }) == ErrorKind::Config);
    CHECK(bad([](PipelineConfig& c) { c.phantoms = {"a/x.txt", "b/x.txt"}; }) == ErrorKind::Config);
    CHECK(bad([](PipelineConfig& c) { c.mode = RunMode::ingest; }) == ErrorKind::Config);
    CHECK(bad([](PipelineConfig& c) { c.profiles.clear(), c.reference_profile.clear(); }) == ErrorKind::Config);
}

TEST_CASE("setting names") {
    CHECK(setting_name(1) == "First");
    CHECK(setting_name(6) == "Sixth");
    CHECK(kind_of([] { setting_name(0); }) == ErrorKind::Config);
}

TEST_CASE("stage failures carry the stage name") {
    PipelineConfig c;
    c.spacing_mm = 0.1;  // coarser than every layer height in the table
    SyntheticCase sc{tiny(1.5, "a"), settings_table()[0], ProfileRegistry::builtin().get("default"), "p", "First",
                     "a", 1};
    try {
        analyze_synthetic(sc, c);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "simulate");
        CHECK(e.kind() == ErrorKind::Resolution);
    }
}

TEST_CASE("full synthetic run on small phantoms") {
    TempDir t("pipeline");
    PipelineConfig c = tiny_config(t.path);
    const ReportBundle b = run_pipeline(c);

    // 2 phantoms x (3 printers x 6 settings + 1 reference)
    REQUIRE(b.analyses.size() == 38);
    std::set<std::string> names;
    for (const auto& a : b.analyses) names.insert(a.name);
    CHECK(names.size() == 38);
    CHECK(names.count("tiny_a_reference_XHD") == 1);
    CHECK(names.count("tiny_b_printer_c_Sixth") == 1);

    CHECK(io::read_metrics_csv(c.out / "metrics.csv").size() == 38);

    // Manifest lists every file in the output tree with its digest.
    const auto m = nlohmann::json::parse(slurp(b.manifest));
    CHECK(m["analysis_count"] == 38);
    CHECK(m["analyses"].size() == 38);
    std::set<std::string> listed;
    for (const auto& o : m["outputs"]) {
        const std::string rel = o["path"];
        listed.insert(rel);
        CHECK(o["sha256"] == io::sha256_file(c.out / rel));
    }
    for (const auto& e : fs::recursive_directory_iterator(c.out)) {
        if (!e.is_regular_file()) continue;
        const std::string rel = fs::relative(e.path(), c.out).generic_string();
        if (rel == "manifest.json") continue;
        CHECK_MESSAGE(listed.count(rel) == 1, rel);
    }
    CHECK(listed.count("rankings_cusp_density_XY.csv") == 1);
    CHECK(listed.count("charts/tiny_a_porosity.svg") == 1);
    CHECK(b.files.size() == listed.size());

    // The reference printer is nearly ideal: every designed void is found.
    for (const auto& a : b.analyses)
        if (a.report.printer_id == "reference") {
            REQUIRE(a.detectability);
            CHECK(a.detectability->overall_rate == 1.0);
        }

    SUBCASE("deterministic for a fixed seed") {
        PipelineConfig again = c;
        again.out = t.path / "again";
        run_pipeline(again);
        for (const char* f : {"metrics.csv", "rankings_cusp_density_XY.csv", "rankings_roughness_XZ.csv",
                              "rankings_porosity.csv", "charts/tiny_b_cusp_density_XZ.svg"})
            CHECK_MESSAGE(slurp(c.out / f) == slurp(again.out / f), f);
    }
}

TEST_CASE("ingest run") {
    TempDir t("ingest");
    const PhantomSpec spec = tiny(1.5, "a");
    io::write_phantom(t.path / "phantom.txt", spec);
    const auto [grid, labels] = voxelize(spec, 0.05, 4);
    io::export_stack(grid, t.path / "stack", 16);

    PipelineConfig c;
    c.mode = RunMode::ingest;
    c.stack_dir = t.path / "stack";
    c.stack_sidecar = t.path / "stack" / "stack.json";
    c.reference_phantom = t.path / "phantom.txt";
    c.printer_id = "lab";
    c.out = t.path / "out";
    const ReportBundle b = run_pipeline(c);
    REQUIRE(b.analyses.size() == 1);
    const AnalysisResult& a = b.analyses[0];
    CHECK(a.report.printer_id == "lab");
    CHECK(a.shift == Shift{});
    REQUIRE(a.detectability);
    CHECK(a.detectability->overall_rate == 1.0);
    CHECK(a.report.roughness_xy < 0.05 * double(labels.counts().material));
    CHECK(a.report.porosity_pct == doctest::Approx(100.0 * designed_porosity(spec)).epsilon(0.15));

    PipelineConfig missing = c;
    missing.stack_dir = t.path / "nowhere";
    missing.out = t.path / "out2";
    CHECK(kind_of([&] { run_pipeline(missing); }) == ErrorKind::Ingestion);
}

TEST_CASE("report emission") {
    TempDir t("report");
    CHECK(kind_of([&] { emit_report({}, t.path); }) == ErrorKind::EmptySample);

    std::vector<MetricsReport> rs;
    const char* printers[] = {"ProJet", "Form"};
    for (int p = 0; p < 2; ++p)
        for (int row = 1; row <= 3; ++row) {
            MetricsReport r;
            r.sample_id = "s1";
            r.printer_id = printers[p];
            r.setting_id = setting_name(row);
            r.setting_index = row;
            r.cusp_density_xy = p == 0 && row == 2 ? 1.3276 : 2.0 + row + p;
            r.cusp_density_xz = r.roughness_xy = r.roughness_xz = r.porosity_pct = 1.0 + row;
            rs.push_back(r);
        }
    const auto files = emit_report(rs, t.path);
    CHECK(files.size() == 1 + 5 + 5);
    for (const auto& f : files) CHECK(fs::exists(t.path / f));
    const std::string ranked = slurp(t.path / "rankings_cusp_density_XY.csv");
    CHECK(ranked == "printer,s1_setting,s1_value\nProJet,Second,1.3276\nForm,First,4\n");
}
