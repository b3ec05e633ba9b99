#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "test_util.hpp"
#include "tomoprint/error.hpp"
#include "tomoprint/voxphantom.hpp"

using namespace tomoprint;

namespace {

// Level sizes top to bottom, keyed by shape.
std::vector<std::pair<VoidShape, double>> levels_top_down(const PhantomSpec& s) {
    std::map<double, std::pair<VoidShape, double>, std::greater<>> by_z;
    for (const auto& v : s.voids) by_z[v.center_mm.z] = {v.shape, v.size_mm};
    std::vector<std::pair<VoidShape, double>> out;
    for (auto& [z, l] : by_z) out.push_back(l);
    return out;
}

std::size_t brute_void_count(const PhantomSpec& spec, double h) {
    const int nx = int(std::lround(spec.outer_dims_mm.x / h)), ny = int(std::lround(spec.outer_dims_mm.y / h)),
              nz = int(std::lround(spec.outer_dims_mm.z / h));
    std::size_t n = 0;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                const Vec3 c{(x + 0.5) * h, (y + 0.5) * h, (z + 0.5) * h};
                for (const auto& v : spec.voids) {
                    const Vec3 d = c - v.center_mm;
                    const double r = v.size_mm / 2, eps = 1e-9;
                    auto half_open = [&](double t) { return t + r >= -eps && r - t > eps; };
                    const bool in = v.shape == VoidShape::cube
                                        ? half_open(d.x) && half_open(d.y) && half_open(d.z)
                                        : d.x * d.x + d.y * d.y + d.z * d.z < r * r;
                    if (in) {
                        ++n;
                        break;
                    }
                }
            }
    return n;
}

PhantomSpec random_spec(std::mt19937_64& rng) {
    PhantomSpec s;
    s.outer_dims_mm = {4, 4, 4};
    std::uniform_real_distribution<double> size(0.4, 1.0), pos(0.6, 3.4);
    while (s.voids.size() < 4) {
        VoidSpec v{rng() % 2 ? VoidShape::cube : VoidShape::sphere, size(rng), {pos(rng), pos(rng), pos(rng)}};
        const Vec3 lo = v.bbox_lo(), hi = v.bbox_hi();
        if (lo.x <= 0 || lo.y <= 0 || lo.z <= 0 || hi.x >= 4 || hi.y >= 4 || hi.z >= 4) continue;
        bool clash = false;
        for (const auto& o : s.voids) {
            const Vec3 a = o.bbox_lo(), b = o.bbox_hi();
            clash |= lo.x < b.x && a.x < hi.x && lo.y < b.y && a.y < hi.y && lo.z < b.z && a.z < hi.z;
        }
        if (!clash) s.voids.push_back(v);
    }
    return s;
}

}  // namespace

TEST_CASE("sample 1 geometry and porosity") {
    const PhantomSpec s = sample1_spec(0.145);
    CHECK(s.outer_dims_mm == Vec3{8, 8, 26});
    CHECK(designed_porosity(s) >= 0.140);
    CHECK(designed_porosity(s) <= 0.150);
    CHECK(std::abs(designed_porosity(s) - 0.145) <= 0.005);
    CHECK_NOTHROW(validate(s));

    const auto levels = levels_top_down(s);
    REQUIRE(levels.size() >= 4);
    CHECK(levels.front().second == doctest::Approx(1.40));
    std::vector<double> large, small;
    for (std::size_t i = 0; i < levels.size(); ++i) (i % 2 == 0 ? large : small).push_back(levels[i].second);
    CHECK(std::is_sorted(large.rbegin(), large.rend()));
    CHECK(large.back() == doctest::Approx(0.20));
    // Small cubes rise to a peak then fall.
    const auto peak = std::max_element(small.begin(), small.end());
    CHECK(std::is_sorted(small.begin(), peak + 1));
    CHECK(std::is_sorted(std::reverse_iterator(small.end()), std::reverse_iterator(peak)));
    CHECK(*std::min_element(small.begin(), small.end()) == doctest::Approx(0.20));
}

TEST_CASE("sample 2 geometry and porosity") {
    const PhantomSpec s = sample2_spec(0.148);
    CHECK(s.outer_dims_mm == Vec3{6, 6, 17.5});
    CHECK(designed_porosity(s) >= 0.143);
    CHECK(designed_porosity(s) <= 0.153);
    CHECK_NOTHROW(validate(s));

    std::vector<double> spheres, cubes;
    for (auto [shape, size] : levels_top_down(s)) (shape == VoidShape::sphere ? spheres : cubes).push_back(size);
    CHECK(spheres.front() == doctest::Approx(1.20));
    CHECK(spheres.back() == doctest::Approx(0.20));
    CHECK(cubes.front() == doctest::Approx(0.70));
    CHECK(cubes.back() == doctest::Approx(0.20));
    CHECK(std::is_sorted(spheres.rbegin(), spheres.rend()));
    CHECK(std::is_sorted(cubes.rbegin(), cubes.rend()));
}

TEST_CASE("tiny target gives a feasible schedule or a schedule error") {
    try {
        const PhantomSpec s = sample1_spec(0.0001);
        CHECK(std::abs(designed_porosity(s) - 0.0001) <= ScheduleOptions{}.tolerance);
        CHECK(s.smallest_void_mm() >= 0.2 - 1e-12);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ScheduleInfeasible);
    }
}

TEST_CASE("schedule rejects out-of-range targets") {
    CHECK_THROWS_AS(sample1_spec(0.0), Error);
    CHECK_THROWS_AS(sample2_spec(0.9), Error);
}

TEST_CASE("validate catches overlaps and escapes") {
    PhantomSpec s;
    s.outer_dims_mm = {2, 2, 2};
    s.voids = {{VoidShape::cube, 0.5, {1, 1, 1}}, {VoidShape::cube, 0.5, {1.2, 1, 1}}};
    try {
        validate(s);
        FAIL("overlap not detected");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ScheduleInfeasible);
    }
    s.voids = {{VoidShape::sphere, 0.5, {0.2, 1, 1}}};
    CHECK_THROWS_AS(validate(s), Error);
    s.voids = {{VoidShape::cube, -1, {1, 1, 1}}};
    CHECK_THROWS_AS(validate(s), Error);
    s.voids.clear();
    s.material_mu = 0;
    CHECK_THROWS_AS(validate(s), Error);
}

TEST_CASE("designed porosity") {
    PhantomSpec s;
    s.outer_dims_mm = {10, 10, 10};
    CHECK(designed_porosity(s) == 0.0);
    s.voids = {{VoidShape::cube, 1.0, {5, 5, 5}}};
    CHECK(designed_porosity(s) == doctest::Approx(0.001));
    s.voids = {{VoidShape::sphere, 2.0, {5, 5, 5}}};
    CHECK(designed_porosity(s) == doctest::Approx(4.0 / 3.0 * M_PI / 1000.0));
    CHECK(std::abs(designed_porosity(sample1_spec(0.145)) - 0.145) <= 0.005);
}

TEST_CASE("voxelize dims and simple counts") {
    const PhantomSpec s1 = sample1_spec(0.145);
    const auto [g, l] = voxelize(s1, 0.05);
    CHECK(g.dims() == Dims{160, 160, 520});
    CHECK(l.dims() == g.dims());

    PhantomSpec body;
    body.outer_dims_mm = {1, 1, 1};
    const auto [g2, l2] = voxelize(body, 0.5);
    CHECK(g2.dims() == Dims{2, 2, 2});
    CHECK(l2.counts().material == 8);
    for (float v : g2.values()) CHECK(v == doctest::Approx(body.material_mu));

    PhantomSpec one;
    one.outer_dims_mm = {2, 2, 2};
    one.voids = {{VoidShape::cube, 0.5, {1, 1, 1}}};
    const auto [g3, l3] = voxelize(one, 0.1);
    CHECK(l3.counts().voids == brute_void_count(one, 0.1));
    CHECK(l3.counts().voids == 125);
    CHECK(l3.counts().material == 8000 - 125);
}

TEST_CASE("voxelize margin and resolution errors") {
    PhantomSpec one;
    one.outer_dims_mm = {2, 2, 2};
    one.voids = {{VoidShape::cube, 0.5, {1, 1, 1}}};
    const auto [g, l] = voxelize(one, 0.1, 3);
    CHECK(g.dims() == Dims{26, 26, 26});
    CHECK(g.frame().origin_mm.x == doctest::Approx(-0.3));
    CHECK(l.counts().voids == 125);
    CHECK(l.counts().material == 8000 - 125);
    try {
        voxelize(one, 0.3);
        FAIL("coarse spacing accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Resolution);
    }
}

TEST_CASE("property: voxelized void fraction converges to the designed porosity") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const PhantomSpec s = random_spec(rng);
        const double h = s.smallest_void_mm() / 8;
        const auto [g, l] = voxelize(s, h);
        const LabelCounts c = l.counts();
        CHECK(c.total() == l.dims().count());
        const double frac = double(c.voids) / double(c.material + c.voids);
        CHECK(std::abs(frac - designed_porosity(s)) < 0.01);
        CHECK(c.voids == brute_void_count(s, h));

    }
}

TEST_CASE("property: voxelize is deterministic and partitions every voxel") {
    const PhantomSpec s = sample2_spec(0.148);
    const auto a = voxelize(s, 0.1, 2), b = voxelize(s, 0.1, 2);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    CHECK(a.second.counts().total() == a.second.dims().count());
}

TEST_CASE("property: scaling void sizes by k scales the designed porosity by k cubed") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        PhantomSpec s = random_spec(rng);
        const double k = 0.5 + 0.1 * trial;
        PhantomSpec t = s;
        for (auto& v : t.voids) v.size_mm *= k;
        CHECK(designed_porosity(t) == doctest::Approx(k * k * k * designed_porosity(s)).epsilon(1e-12));
    }
}
