#include <doctest.h>

#include <fstream>
#include <random>

#include "test_util.hpp"
#include "tomoprint/charts.hpp"
#include "tomoprint/error.hpp"
#include "tomoprint/io.hpp"

using namespace tomoprint;
namespace fs = std::filesystem;
using testutil::kind_of;
using testutil::TempDir;

namespace {

VoxelGrid random_grid(Dims d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 0.2f);
    VoxelGrid g(GridFrame{d, 0.05, {-0.15, -0.15, -0.15}});
    for (auto& v : g.values()) v = u(rng);
    return g;
}

void write_pgm16(const fs::path& p, int w, int h, std::uint16_t value) {
    std::ofstream f(p, std::ios::binary);
    f << "P5\n" << w << " " << h << "\n65535\n";
    for (int i = 0; i < w * h; ++i) {
        const unsigned char b[2] = {static_cast<unsigned char>(value >> 8), static_cast<unsigned char>(value & 255)};
        f.write(reinterpret_cast<const char*>(b), 2);
    }
}

void write_sidecar(const fs::path& p, int bits, double scale = 0.001) {
    io::write_text(p, "{\"bit_depth\": " + std::to_string(bits) + ", \"spacing_mm\": 0.05, \"scale_per_mm\": " +
                          std::to_string(scale) + "}");
}

}  // namespace

TEST_CASE("grid, label and sinogram round trips") {
    TempDir t("io");
    const VoxelGrid g = random_grid({7, 5, 3}, 1);
    io::write_grid(t.path / "g.raw", g);
    CHECK(fs::exists(io::sidecar_path(t.path / "g.raw")));
    CHECK(io::read_grid(t.path / "g.raw") == g);

    LabelVolume l(g.frame());
    l.at(1, 2, 0) = Label::material;
    l.at(3, 3, 2) = Label::void_;
    io::write_labels(t.path / "l.raw", l);
    CHECK(io::read_labels(t.path / "l.raw") == l);

    Sinogram s(ScanGeometry{12, 9, 0.05}, 3, 1e4);
    s.set_source_frame(g.frame());
    s.set_clamped_count(4);
    for (std::size_t i = 0; i < s.data().size(); ++i) s.data()[i] = float(i) * 0.5f;
    io::write_sinogram(t.path / "s.raw", s);
    const Sinogram r = io::read_sinogram(t.path / "s.raw");
    CHECK(r.geometry() == s.geometry());
    CHECK(r.n_slices() == 3);
    CHECK(r.i0() == 1e4);
    CHECK(r.clamped_count() == 4);
    CHECK(r.source_frame() == g.frame());
    CHECK(std::equal(r.data().begin(), r.data().end(), s.data().begin()));

    fs::remove(io::sidecar_path(t.path / "g.raw"));
    CHECK(kind_of([&] { io::read_grid(t.path / "g.raw"); }) == ErrorKind::Ingestion);
    io::write_text(t.path / "short.raw", "abc");
    io::write_text(io::sidecar_path(t.path / "short.raw"),
                   "{\"dims\":[2,2,2],\"spacing_mm\":0.1,\"origin_mm\":[0,0,0],\"units\":\"1/mm\"}");
    CHECK(kind_of([&] { io::read_grid(t.path / "short.raw"); }) == ErrorKind::Ingestion);
}

TEST_CASE("phantom text round trip") {
    PhantomSpec s;
    s.label = "demo";
    s.outer_dims_mm = {8, 8, 26};
    s.material_mu = 0.1;
    s.voids = {{VoidShape::cube, 1.4, {1.15, 1.15, 24.8}}, {VoidShape::sphere, 0.3, {2.0 / 3.0, 4, 5}}};
    CHECK(io::parse_phantom(io::format_phantom(s)) == s);
    const PhantomSpec c = io::parse_phantom("# comment\nouter_dims_mm 2 2 2\nvoid cube 0.5 1 1 1  # trailing\n");
    CHECK(c.outer_dims_mm == Vec3{2, 2, 2});
    CHECK(c.voids.size() == 1);
    CHECK(kind_of([] { io::parse_phantom("outer_dims_mm 2 2\n"); }) == ErrorKind::Ingestion);
    CHECK(kind_of([] { io::parse_phantom("void cube 0.5 1 1 1\n"); }) == ErrorKind::Ingestion);
    CHECK(kind_of([] { io::parse_phantom("outer_dims_mm 2 2 2\nvoid pyramid 0.5 1 1 1\n"); }) == ErrorKind::Ingestion);
}

TEST_CASE("profiles round trip") {
    TempDir t("prof");
    const std::vector<PrinterProfile> ps{{"mine", 0.001, 0.0005, 0.01, 0.002, 0.08, 0.2, 0.35}};
    io::write_profiles(t.path / "p.json", ps);
    CHECK(io::read_profiles(t.path / "p.json") == ps);
    io::write_text(t.path / "bad.json", "{\"profiles\": [{\"name\": \"x\"}");
    CHECK(kind_of([&] { io::read_profiles(t.path / "bad.json"); }) == ErrorKind::Config);
}

TEST_CASE("metrics CSV round trip") {
    TempDir t("csv");
    MetricsReport r;
    r.sample_id = "sample1";
    r.printer_id = "printer_a";
    r.setting_id = "Third";
    r.setting_index = 3;
    r.cusp_density_xy = 4.8496;
    r.cusp_density_xz = 8.3522;
    r.roughness_xy = 27698;
    r.roughness_xz = 24820;
    r.porosity_pct = 15.39;
    r.void_histogram_edges_mm = {0.0, 0.2, 0.3};
    r.void_histogram = {4, 2, 1};
    io::write_metrics_csv(t.path / "m.csv", {r});
    const auto back = io::read_metrics_csv(t.path / "m.csv");
    REQUIRE(back.size() == 1);
    CHECK(back[0].sample_id == r.sample_id);
    CHECK(back[0].printer_id == r.printer_id);
    CHECK(back[0].setting_id == r.setting_id);
    CHECK(back[0].setting_index == 3);
    for (Metric m : {Metric::cusp_density, Metric::roughness, Metric::porosity})
        for (Plane p : {Plane::XY, Plane::XZ}) CHECK(back[0].value(m, p) == r.value(m, p));

    const std::string text = io::read_text(t.path / "m.csv");
    CHECK(text.rfind("sample,printer,setting,setting_index,plane,metric,value\n", 0) == 0);
    io::write_text(t.path / "bad.csv", "nope\n");
    CHECK(kind_of([&] { io::read_metrics_csv(t.path / "bad.csv"); }) == ErrorKind::Ingestion);
}

TEST_CASE("rankings CSV shape") {
    const std::vector<Ranking> rs{{"sample1", "Delta Wasp", "Third", 4.8496}, {"sample2", "Delta Wasp", "Fifth", 7.7462},
                                  {"sample1", "ProJet", "XHD mode", 1.3276}, {"sample2", "ProJet", "XHD mode", 1.9423}};
    const std::string csv = io::format_rankings_csv(rs);
    CHECK(csv == "printer,sample1_setting,sample1_value,sample2_setting,sample2_value\n"
                 "Delta Wasp,Third,4.8496,Fifth,7.7462\n"
                 "ProJet,XHD mode,1.3276,XHD mode,1.9423\n");
}

TEST_CASE("slice stack ingest") {
    TempDir t("stack");
    const fs::path dir = t.path / "s";
    fs::create_directories(dir);
    for (int z = 0; z < 10; ++z) {
        char name[32];
        std::snprintf(name, sizeof name, "img_%02d.pgm", z);
        write_pgm16(dir / name, 64, 64, std::uint16_t(100 + z));
    }
    write_sidecar(t.path / "stack.json", 16);
    const VoxelGrid g = io::ingest_stack(dir, t.path / "stack.json");
    CHECK(g.dims() == Dims{64, 64, 10});
    CHECK(g.spacing_mm() == 0.05);
    for (int z = 0; z < 10; ++z) CHECK(g.at(5, 7, z) == doctest::Approx(0.001 * (100 + z)));

    // A mismatched slice is named in the error.
    write_pgm16(dir / "img_05.pgm", 32, 32, 1);
    try {
        io::ingest_stack(dir, t.path / "stack.json");
        FAIL("mixed dims accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Ingestion);
        CHECK(std::string(e.what()).find("img_05.pgm") != std::string::npos);
    }
    write_pgm16(dir / "img_05.pgm", 64, 64, 1);

    CHECK(kind_of([&] { io::ingest_stack(dir, t.path / "missing.json"); }) == ErrorKind::Ingestion);
    write_sidecar(t.path / "bad_depth.json", 12);
    try {
        io::ingest_stack(dir, t.path / "bad_depth.json");
        FAIL("bad bit depth accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Ingestion);
        CHECK(std::string(e.what()).find("bad_depth.json") != std::string::npos);
    }
    // 16-bit files under an 8-bit sidecar.
    write_sidecar(t.path / "eight.json", 8);
    try {
        io::ingest_stack(dir, t.path / "eight.json");
        FAIL("depth mismatch accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Ingestion);
    }
}

TEST_CASE("slice stack export and ingest") {
    TempDir t("export");
    const VoxelGrid g = random_grid({9, 6, 4}, 3);

    const io::StackInfo raw = io::export_stack(g, t.path / "f32", 32);
    CHECK(raw.bit_depth == 32);
    CHECK(io::ingest_stack(t.path / "f32", t.path / "f32" / "stack.json") == g);

    for (int bits : {8, 16}) {
        const fs::path dir = t.path / std::to_string(bits);
        const io::StackInfo info = io::export_stack(g, dir, bits);
        const VoxelGrid back = io::ingest_stack(dir, dir / "stack.json");
        CHECK(back.frame() == g.frame());
        for (std::size_t i = 0; i < g.values().size(); ++i)
            CHECK(std::abs(back.values()[i] - g.values()[i]) <= info.scale / 2 + 1e-7);
        // Values already on the count grid survive unchanged.
        const fs::path again = t.path / ("again" + std::to_string(bits));
        io::export_stack(back, again, bits);
        CHECK(io::ingest_stack(again, again / "stack.json") == back);
    }
    CHECK(kind_of([&] { io::export_stack(g, t.path / "x", 12); }) == ErrorKind::Config);
}

TEST_CASE("hashing") {
    CHECK(io::sha256_bytes("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(io::sha256_bytes("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    TempDir t("hash");
    io::write_text(t.path / "a.txt", "abc");
    CHECK(io::sha256_file(t.path / "a.txt") == io::sha256_bytes("abc"));
    CHECK(kind_of([&] { io::sha256_file(t.path / "none"); }) == ErrorKind::Io);
}

TEST_CASE("bar chart SVG") {
    const std::string svg = charts::bar_chart_svg("porosity", "%", {{"a <1>", 14.5, "x"}, {"b", 15.4, "y"}});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("a &lt;1&gt;") != std::string::npos);
    std::size_t rects = 0;
    for (std::size_t p = svg.find("<rect"); p != std::string::npos; p = svg.find("<rect", p + 1)) ++rects;
    CHECK(rects >= 2);
}
