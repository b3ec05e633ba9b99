#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "tomoprint/error.hpp"
#include "tomoprint/metrology.hpp"
#include "tomoprint/morphology.hpp"
#include "tomoprint/printsim.hpp"
#include "tomoprint/voxphantom.hpp"

using namespace tomoprint;
using testutil::box_labels;
using testutil::cube_frame;

namespace {

// Naive square-window morphology on an unbounded plane (outside = unset).
Mask2D brute_erode(const Mask2D& m, int r) {
    Mask2D o(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool all = true;
            for (int dy = -r; dy <= r && all; ++dy)
                for (int dx = -r; dx <= r && all; ++dx) {
                    const int xx = x + dx, yy = y + dy;
                    all = xx >= 0 && yy >= 0 && xx < m.width && yy < m.height && m.at(xx, yy);
                }
            o.at(x, y) = all;
        }
    return o;
}

Mask2D brute_dilate(const Mask2D& m, int r) {
    Mask2D o(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool any = false;
            for (int dy = -r; dy <= r && !any; ++dy)
                for (int dx = -r; dx <= r && !any; ++dx) {
                    const int xx = x + dx, yy = y + dy;
                    any = xx >= 0 && yy >= 0 && xx < m.width && yy < m.height && m.at(xx, yy);
                }
            o.at(x, y) = any;
        }
    return o;
}

Mask2D pad(const Mask2D& m, int r) {
    Mask2D o(m.width + 2 * r, m.height + 2 * r);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) o.at(x + r, y + r) = m.at(x, y);
    return o;
}

Mask2D crop(const Mask2D& m, int r) {
    Mask2D o(m.width - 2 * r, m.height - 2 * r);
    for (int y = 0; y < o.height; ++y)
        for (int x = 0; x < o.width; ++x) o.at(x, y) = m.at(x + r, y + r);
    return o;
}

Mask2D brute_smooth(const Mask2D& m, int r) {
    const Mask2D opened = brute_dilate(brute_erode(m, r), r);
    return crop(brute_erode(brute_dilate(pad(opened, r), r), r), r);
}

double brute_cusp(const LabelVolume& l, Plane p, int r) {
    double total = 0;
    for (int s = 0; s < slice_count(l.dims(), p); ++s) {
        const Mask2D m = slice_mask(l, p, s, is_solid);
        const Mask2D ref = brute_smooth(m, r);
        for (std::size_t i = 0; i < m.bits.size(); ++i) total += m.bits[i] != ref.bits[i];
    }
    return total;
}

MetricsReport report(std::string sample, std::string printer, std::string setting, int index, double v) {
    MetricsReport r;
    r.sample_id = std::move(sample);
    r.printer_id = std::move(printer);
    r.setting_id = std::move(setting);
    r.setting_index = index;
    r.cusp_density_xy = v;
    return r;
}

}  // namespace

TEST_CASE("morphology matches the naive window") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 6; ++trial) {
        Mask2D m(23 + trial, 19);
        for (auto& b : m.bits) b = (rng() % 100) < 60;
        for (int r : {1, 2, 3}) {
            CHECK(erode(m, r) == brute_erode(m, r));
            CHECK(dilate(m, r) == brute_dilate(m, r));
            CHECK(smooth_reference(m, r) == brute_smooth(m, r));
        }
    }
}

TEST_CASE("cusp density of a perfect cuboid is zero") {
    const LabelVolume l = box_labels(cube_frame(32), 4, 28, 6, 26, 5, 27);
    CHECK(cusp_density(l, Plane::XY, {}) == 0.0);
    CHECK(cusp_density(l, Plane::XZ, {}) == 0.0);
    try {
        cusp_density(LabelVolume(cube_frame(8)), Plane::XY, {});
        FAIL("empty sample accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptySample);
    }
}

TEST_CASE("single-voxel spike gives one cusp voxel") {
    LabelVolume l = box_labels(cube_frame(32), 4, 28, 4, 28, 4, 20);
    l.at(16, 16, 20) = Label::material;
    const double material = double(l.counts().material);
    for (Plane p : {Plane::XY, Plane::XZ}) {
        CHECK(brute_cusp(l, p, 3) == 1.0);
        CHECK(cusp_volume(l, p, {}) == 1.0);
        CHECK(cusp_density(l, p, {}) == doctest::Approx(100.0 / material));
    }
}

TEST_CASE("cusp volume matches brute force on rough shapes") {
    const GridFrame f = cube_frame(24, 0.05);
    const LabelVolume box = box_labels(f, 5, 19, 5, 19, 5, 19);
    DefectModel m;
    m.surface_amplitude_mm = 0.08;
    m.surface_correlation_mm = 0.1;
    const LabelVolume rough = apply_surface_noise(box, m, 4);
    for (Plane p : {Plane::XY, Plane::XZ})
        for (int r : {1, 3}) CHECK(cusp_volume(rough, p, {r, 0.1}) == brute_cusp(rough, p, r));
}

TEST_CASE("cusp density grows with surface amplitude") {
    const GridFrame f = cube_frame(40, 0.05);
    const LabelVolume box = box_labels(f, 8, 32, 8, 32, 8, 32);
    for (Plane p : {Plane::XY, Plane::XZ}) {
        int ordered = 0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            DefectModel a, b;
            a.surface_amplitude_mm = 0.03;
            b.surface_amplitude_mm = 0.08;
            a.surface_correlation_mm = b.surface_correlation_mm = 0.1;
            ordered += cusp_density(apply_surface_noise(box, a, seed), p, {}) <=
                       cusp_density(apply_surface_noise(box, b, seed), p, {});
        }
        CHECK(ordered >= 4);
    }
}

TEST_CASE("roughness") {
    const GridFrame f = cube_frame(32);
    const LabelVolume ref = box_labels(f, 8, 20, 9, 23, 7, 24);
    CHECK(roughness(ref, ref, Plane::XY, {}) == 0.0);

    const LabelVolume grown = box_labels(f, 7, 21, 8, 24, 6, 25);
    const double shell = 14.0 * 16 * 19 - 12.0 * 14 * 17;
    CHECK(roughness(grown, ref, Plane::XY, {}) == shell);
    CHECK(roughness(grown, ref, Plane::XZ, {}) == shell);
    CHECK(roughness(ref, grown, Plane::XY, {}) == shell);

    // Voxels within the exclusion radius of a reference void do not count.
    LabelVolume holed = ref;
    holed.at(14, 15, 15) = Label::void_;
    LabelVolume moved = holed;
    moved.at(15, 15, 15) = Label::background;
    CHECK(roughness(moved, holed, Plane::XY, {3, 0.1}) == 0.0);
    CHECK(roughness(moved, holed, Plane::XY, {3, 0.0}) == 1.0);

    try {
        roughness(ref, LabelVolume(cube_frame(30)), Plane::XY, {});
        FAIL("dims mismatch accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Registration);
    }
    CHECK_THROWS_AS(roughness(ref, ref, Plane::XY, {0, 0.1}), Error);
}

TEST_CASE("alignment") {
    const GridFrame f = cube_frame(32);
    LabelVolume ref = box_labels(f, 8, 20, 9, 23, 7, 24);
    ref.at(25, 25, 25) = Label::material;  // asymmetric marker
    const Shift t{2, -1, 3};
    const LabelVolume moving = shift_labels(ref, Shift{-t.dx, -t.dy, -t.dz});
    const Alignment a = align(moving, ref, 2);
    CHECK(a.shift.dx == 2);
    CHECK(a.shift.dy == -1);
    CHECK(a.shift.dz == 3);
    CHECK(a.registered == ref);
    CHECK(a.overlap == ref.counts().material);

    const Alignment same = align(ref, ref, 2);
    CHECK((same.shift.dx == 0 && same.shift.dy == 0 && same.shift.dz == 0));

    // A slab much wider than the window overlaps equally under x and y
    // shifts; the smallest shift wins.
    const LabelVolume slab = box_labels(f, 0, 32, 0, 32, 10, 20);
    const Alignment tie = align(slab, slab, 2);
    CHECK((tie.shift.dx == 0 && tie.shift.dy == 0 && tie.shift.dz == 0));

    LabelVolume far_a = box_labels(f, 0, 2, 0, 2, 0, 2);
    LabelVolume far_b = box_labels(f, 29, 32, 29, 32, 29, 32);
    far_b.at(0, 31, 31) = Label::material;  // keeps the centroid offset small
    far_a.at(31, 0, 0) = Label::material;
    try {
        align(far_a, far_b, 0);
        FAIL("zero overlap accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::AlignmentFailure);
    }
}

TEST_CASE("porosity") {
    const GridFrame f = cube_frame(16);
    LabelVolume l = box_labels(f, 2, 14, 2, 14, 2, 14);
    CHECK(porosity(l) == 0.0);
    l.at(5, 5, 5) = Label::void_;
    CHECK(porosity(l) == doctest::Approx(100.0 / 1728.0));
    CHECK_THROWS_AS(porosity(LabelVolume(f)), Error);

    const PhantomSpec s = sample1_spec(0.145);
    const auto [g, truth] = voxelize(s, 0.1);
    const LabelCounts c = truth.counts();
    CHECK(porosity(truth) == 100.0 * double(c.voids) / double(c.voids + c.material));
    CHECK(std::abs(porosity(truth) - 100.0 * designed_porosity(s)) < 1.0);

    PrinterProfile heavy = ProfileRegistry::builtin().get("default");
    heavy.rate_base_per_mm = 1.0;
    PhantomSpec small;
    small.outer_dims_mm = {3, 3, 3};
    small.voids = {{VoidShape::cube, 1.0, {1.5, 1.5, 1.5}}};
    const auto [pg, printed] = simulate_print(small, settings_table()[0], heavy, 0.05);
    CHECK(porosity(printed) > 100.0 * designed_porosity(small));
}

TEST_CASE("ranking") {
    // Cusp density XY, sample 1, one row per printer at its best setting plus worse rows.
    std::vector<MetricsReport> rs{
        report("1", "Delta Wasp", "First", 1, 5.9), report("1", "Delta Wasp", "Third", 3, 4.8496),
        report("1", "Raise E2", "First", 1, 7.2638), report("1", "Raise E2", "Second", 2, 7.9),
        report("1", "ProJet", "XHD mode", 0, 1.3276), report("1", "Ultimaker", "First", 1, 4.5611),
        report("1", "Ultimaker", "Fifth", 5, 6.0),
    };
    const auto ranked = rank_settings(rs, Metric::cusp_density, Plane::XY);
    REQUIRE(ranked.size() == 4);
    CHECK(ranked[0].printer_id == "Delta Wasp");
    CHECK(ranked[0].setting_id == "Third");
    CHECK(ranked[0].value == 4.8496);
    CHECK(ranked[1].setting_id == "First");
    CHECK(ranked[3].setting_id == "First");
    const Ranking& best = global_best(ranked);
    CHECK(best.printer_id == "ProJet");
    CHECK(best.value == 1.3276);

    const auto one = rank_settings({rs[0]}, Metric::cusp_density, Plane::XY);
    REQUIRE(one.size() == 1);
    CHECK(one[0].setting_id == "First");
    CHECK(one[0].value == 5.9);

    // Ties go to the lower setting index regardless of input order.
    const auto tied = rank_settings({report("1", "P", "Fourth", 4, 2.0), report("1", "P", "Second", 2, 2.0)},
                                    Metric::cusp_density, Plane::XY);
    CHECK(tied[0].setting_id == "Second");

    try {
        rank_settings({}, Metric::roughness, Plane::XZ);
        FAIL("empty input accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptySample);
    }
}

TEST_CASE("metric and plane names") {
    CHECK(parse_plane("XY") == Plane::XY);
    CHECK(parse_plane("xz") == Plane::XZ);
    CHECK(parse_metric("roughness") == Metric::roughness);
    CHECK(to_string(Metric::cusp_density) == "cusp_density");
    try {
        parse_plane("YZ");
        FAIL("bad plane accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
}

TEST_CASE("property: registration recovers every shift in the search window") {
    // A printed-looking part: rough outer surface and a few voids.
    PhantomSpec s;
    s.outer_dims_mm = {1.2, 1.0, 1.4};
    s.voids.push_back({VoidShape::cube, 0.3, {0.4, 0.4, 0.5}});
    s.voids.push_back({VoidShape::sphere, 0.3, {0.8, 0.6, 1.0}});
    DefectModel m;
    m.surface_amplitude_mm = 0.05;
    m.surface_correlation_mm = 0.1;
    const LabelVolume ref = apply_surface_noise(voxelize(s, 0.05, 6).second, m, 4);
    for (int dz = -2; dz <= 2; ++dz)
        for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx) {
                const LabelVolume moving = shift_labels(ref, Shift{-dx, -dy, -dz});
                const Alignment a = align(moving, ref, 2);
                CHECK(a.shift == Shift{dx, dy, dz});
                CHECK(a.registered == ref);
            }
}

TEST_CASE("property: rankings are invariant under increasing transforms") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> level(0, 15);
    const std::vector<double (*)(double)> transforms{
        [](double v) { return 3.0 * v + 7.0; }, [](double v) { return std::exp(v); },
        [](double v) { return v * v * v; }, [](double v) { return std::log1p(v); },
        [](double v) { return -1.0 / (1.0 + v); }};
    const char* printers[] = {"A", "B", "C"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<MetricsReport> rs;
        for (const char* sample : {"sample1", "sample2"})
            for (const char* p : printers)
                for (int row = 1; row <= 6; ++row)
                    rs.push_back(report(sample, p, "S" + std::to_string(row), row, level(rng) / 8.0));
        const auto base = rank_settings(rs, Metric::cusp_density, Plane::XY);
        const Ranking& best = global_best(base);
        for (auto f : transforms) {
            auto moved = rs;
            for (auto& r : moved) r.cusp_density_xy = f(r.cusp_density_xy);
            const auto got = rank_settings(moved, Metric::cusp_density, Plane::XY);
            REQUIRE(got.size() == base.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].setting_id == base[i].setting_id);
                CHECK(got[i].value == f(base[i].value));
            }
            const Ranking& b = global_best(got);
            CHECK(b.printer_id == best.printer_id);
            CHECK(b.sample_id == best.sample_id);
        }
    }
}
