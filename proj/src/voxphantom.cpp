#include "tomoprint/voxphantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "tomoprint/error.hpp"

namespace tomoprint {

double VoidSpec::volume_mm3() const {
    const double s3 = size_mm * size_mm * size_mm;
    return shape == VoidShape::cube ? s3 : std::numbers::pi / 6.0 * s3;
}

double PhantomSpec::smallest_void_mm() const {
    double m = 0;
    for (const auto& v : voids) m = (m == 0) ? v.size_mm : std::min(m, v.size_mm);
    return m;
}

namespace {

bool boxes_overlap(const VoidSpec& a, const VoidSpec& b) {
    const Vec3 alo = a.bbox_lo(), ahi = a.bbox_hi(), blo = b.bbox_lo(), bhi = b.bbox_hi();
    return alo.x < bhi.x && blo.x < ahi.x && alo.y < bhi.y && blo.y < ahi.y && alo.z < bhi.z && blo.z < ahi.z;
}

}  // namespace

void validate(const PhantomSpec& spec) {
    const Vec3& d = spec.outer_dims_mm;
    require(d.x > 0 && d.y > 0 && d.z > 0, ErrorKind::Domain, "outer dimensions must be positive");
    require(spec.material_mu > 0, ErrorKind::Domain, "material attenuation must be positive");
    for (std::size_t i = 0; i < spec.voids.size(); ++i) {
        const auto& v = spec.voids[i];
        require(v.size_mm > 0, ErrorKind::Domain, "void " + std::to_string(i) + " has non-positive size");
        const Vec3 lo = v.bbox_lo(), hi = v.bbox_hi();
        require(lo.x > 0 && lo.y > 0 && lo.z > 0 && hi.x < d.x && hi.y < d.y && hi.z < d.z,
                ErrorKind::ScheduleInfeasible, "void " + std::to_string(i) + " is not strictly inside the body");
    }
    // Sweep along z so the pairwise test stays near-linear for dense schedules.
    std::vector<std::size_t> order(spec.voids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return spec.voids[a].bbox_lo().z < spec.voids[b].bbox_lo().z; });
    for (std::size_t a = 0; a < order.size(); ++a) {
        const auto& va = spec.voids[order[a]];
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            const auto& vb = spec.voids[order[b]];
            if (vb.bbox_lo().z >= va.bbox_hi().z) break;
            require(!boxes_overlap(va, vb), ErrorKind::ScheduleInfeasible,
                    "voids " + std::to_string(order[a]) + " and " + std::to_string(order[b]) + " overlap");
        }
    }
}

double designed_porosity(const PhantomSpec& spec) {
    double v = 0;
    for (const auto& s : spec.voids) v += s.volume_mm3();
    return v / spec.body_volume_mm3();
}

namespace {

struct Level {
    VoidShape shape;
    double size;
};

double lerp(double a, double b, double t) { return a + (b - a) * t; }

/// Nearest multiple of `step`, written as n / (1/step) when 1/step is whole
/// so that 0.3 comes out as 0.3 rather than 0.30000000000000004.
double snap(double v, double step) {
    const double inv = 1.0 / step;
    const double n = std::round(v * inv);
    return std::abs(inv - std::round(inv)) < 1e-9 ? n / std::round(inv) : n * step;
}

double round_to(double s, double q) { return q > 0 ? snap(s, q) : snap(s, 0.01); }

double fraction(int i, int n) { return n > 1 ? double(i) / double(n - 1) : 0.0; }

/// Places `sizes` along [0, width] separated by n+1 walls as equal as
/// possible. With a quantum q > 0 every wall is a whole number of quanta, so
/// void faces land on the q grid. Returns the centers, or nothing when the
/// thinnest wall would fall below `min_gap`.
std::optional<std::vector<double>> place(double width, const std::vector<double>& sizes, double q, double min_gap) {
    double used = 0;
    for (double s : sizes) used += s;
    const std::size_t n_walls = sizes.size() + 1;
    std::vector<double> walls(n_walls);
    if (q > 0) {
        const long units = std::lround((width - used) / q);
        if (units < 0) return std::nullopt;
        const long base = units / long(n_walls), extra = units % long(n_walls);
        // Spread the leftover quanta evenly rather than piling them at one end.
        for (std::size_t i = 0; i < n_walls; ++i) {
            const long add = (long(i + 1) * extra) / long(n_walls) - (long(i) * extra) / long(n_walls);
            walls[i] = double(base + add) * q;
        }
    } else {
        std::fill(walls.begin(), walls.end(), (width - used) / double(n_walls));
    }
    if (*std::min_element(walls.begin(), walls.end()) < min_gap - 1e-9) return std::nullopt;
    std::vector<double> centers;
    double at = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        at += walls[i];
        centers.push_back(q > 0 ? snap(at + sizes[i] / 2, q / 2) : at + sizes[i] / 2);
        at += sizes[i];
    }
    return centers;
}

/// Largest m <= cap whose m x m lattice of size-s voids fits across `width`.
int lattice_count(double width, double s, double q, double min_gap, int cap) {
    int m = 0;
    while (m < cap && place(width, std::vector<double>(m + 1, s), q, min_gap)) ++m;
    return m;
}

/// Stacks the levels top to bottom with near-uniform walls between them,
/// fills each level with a square lattice of columns, then drops voids until
/// the designed porosity meets the target.
PhantomSpec build_schedule(Vec3 body, const std::vector<Level>& levels, double target, const ScheduleOptions& opts,
                           std::string label, bool* reached) {
    PhantomSpec spec;
    spec.outer_dims_mm = body;
    spec.material_mu = opts.material_mu;
    spec.label = std::move(label);
    *reached = false;

    const double q = opts.size_quantum_mm;
    std::vector<double> heights;
    for (const auto& l : levels) heights.push_back(l.size);
    const auto zs = place(body.z, heights, q, opts.min_gap_mm);
    if (!zs) return spec;

    const double side = std::min(body.x, body.y);
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const Level& l = levels[k];
        // Levels are listed top first.
        const double zc = q > 0 ? snap(body.z - (*zs)[k], q / 2) : body.z - (*zs)[k];
        const int m = lattice_count(side, l.size, q, opts.min_gap_mm, std::max(1, opts.max_per_row));
        if (m == 0) {
            spec.voids.clear();
            return spec;
        }
        const auto xs = *place(body.x, std::vector<double>(m, l.size), q, opts.min_gap_mm);
        const auto ys = *place(body.y, std::vector<double>(m, l.size), q, opts.min_gap_mm);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) spec.voids.push_back({l.shape, l.size, {xs[i], ys[j], zc}});
    }

    const double body_vol = spec.body_volume_mm3();
    double excess = designed_porosity(spec) * body_vol - target * body_vol;
    if (excess < 0) return spec;
    *reached = true;
    for (;;) {
        // Drop the largest void that still fits in the excess; later entries
        // win ties so the upper levels keep their full lattices.
        std::ptrdiff_t pick = -1;
        double best = 0;
        for (std::size_t i = 0; i < spec.voids.size(); ++i) {
            const double v = spec.voids[i].volume_mm3();
            if (v <= excess && v >= best) {
                best = v;
                pick = std::ptrdiff_t(i);
            }
        }
        if (pick < 0) break;
        excess -= best;
        spec.voids.erase(spec.voids.begin() + pick);
    }
    return spec;
}

template <typename LevelFn>
PhantomSpec fit_schedule(Vec3 body, double target, const ScheduleOptions& opts, const std::string& label,
                         LevelFn&& make_levels) {
    require(target > 0 && target < 0.5, ErrorKind::Domain, "target porosity must lie in (0, 0.5)");
    for (int k = 2; k < 400; ++k) {
        bool reached = false;
        PhantomSpec spec = build_schedule(body, make_levels(k), target, opts, label, &reached);
        if (!reached) {
            if (spec.voids.empty()) break;  // walls got too thin before the target was met
            continue;
        }
        const double p = designed_porosity(spec);
        if (spec.voids.empty() || std::abs(p - target) > opts.tolerance)
            fail(ErrorKind::ScheduleInfeasible, "cannot match porosity " + std::to_string(target) + " (best " +
                                                    std::to_string(p) + ")");
        validate(spec);
        return spec;
    }
    fail(ErrorKind::ScheduleInfeasible,
         "porosity " + std::to_string(target) + " needs more voids than fit with the minimum wall thickness");
}

}  // namespace

PhantomSpec sample1_spec(double target_porosity, const ScheduleOptions& opts) {
    return fit_schedule({8.0, 8.0, 26.0}, target_porosity, opts, "sample1", [&](int k) {
        const int n_large = (k + 1) / 2, n_small = k / 2;
        std::vector<Level> levels;
        int li = 0, si = 0;
        for (int i = 0; i < k; ++i) {
            if (i % 2 == 0) {
                levels.push_back({VoidShape::cube, round_to(lerp(1.40, 0.20, fraction(li++, n_large)), opts.size_quantum_mm)});
            } else {
                // Rises from the floor to the peak at mid-height, then falls back.
                const double t = n_small > 1 ? fraction(si++, n_small) : 0.5;
                levels.push_back(
                    {VoidShape::cube, round_to(lerp(0.20, opts.small_peak_mm, 1.0 - std::abs(2.0 * t - 1.0)), opts.size_quantum_mm)});
            }
        }
        return levels;
    });
}

PhantomSpec sample2_spec(double target_porosity, const ScheduleOptions& opts) {
    return fit_schedule({6.0, 6.0, 17.5}, target_porosity, opts, "sample2", [&](int k) {
        const int n_sphere = (k + 1) / 2, n_cube = k / 2;
        std::vector<Level> levels;
        int si = 0, ci = 0;
        for (int i = 0; i < k; ++i) {
            if (i % 2 == 0)
                levels.push_back({VoidShape::sphere, round_to(lerp(1.20, 0.20, fraction(si++, n_sphere)), opts.size_quantum_mm)});
            else
                levels.push_back({VoidShape::cube, round_to(lerp(0.70, 0.20, fraction(ci++, n_cube)), opts.size_quantum_mm)});
        }
        return levels;
    });
}

namespace {

// Half-open [lo, hi) along one axis, with a small snap so centers that land
// exactly on a face (up to round-off) are classified consistently.
bool in_half_open(double p, double lo, double hi, double eps) { return p - lo >= -eps && hi - p > eps; }

int axis_count(double length, double spacing) {
    const double r = length / spacing;
    const double n = std::round(r);
    return int(std::abs(r - n) < 1e-6 ? n : std::ceil(r));
}

}  // namespace

bool void_contains(const VoidSpec& v, const Vec3& p, double spacing_mm) {
    const double eps = 1e-7 * spacing_mm;
    if (v.shape == VoidShape::cube) {
        const Vec3 lo = v.bbox_lo(), hi = v.bbox_hi();
        return in_half_open(p.x, lo.x, hi.x, eps) && in_half_open(p.y, lo.y, hi.y, eps) &&
               in_half_open(p.z, lo.z, hi.z, eps);
    }
    const Vec3 d = p - v.center_mm;
    const double r = v.size_mm / 2;
    return d.x * d.x + d.y * d.y + d.z * d.z < r * r;
}

std::pair<VoxelGrid, LabelVolume> voxelize(const PhantomSpec& spec, double spacing_mm, int margin_vox) {
    validate(spec);
    require(spacing_mm > 0, ErrorKind::Domain, "spacing must be positive");
    require(margin_vox >= 0, ErrorKind::Domain, "margin must be non-negative");
    if (!spec.voids.empty())
        require(spacing_mm <= spec.smallest_void_mm() / 2 + 1e-12, ErrorKind::Resolution,
                "spacing " + std::to_string(spacing_mm) + " mm is coarser than half the smallest void (" +
                    std::to_string(spec.smallest_void_mm()) + " mm)");

    const Vec3& body = spec.outer_dims_mm;
    const int bx = axis_count(body.x, spacing_mm), by = axis_count(body.y, spacing_mm),
              bz = axis_count(body.z, spacing_mm);
    GridFrame frame{{bx + 2 * margin_vox, by + 2 * margin_vox, bz + 2 * margin_vox},
                    spacing_mm,
                    {-margin_vox * spacing_mm, -margin_vox * spacing_mm, -margin_vox * spacing_mm}};
    LabelVolume labels(frame, Label::background);

    const double eps = 1e-7 * spacing_mm;
    for (int z = 0; z < frame.dims.nz; ++z)
        for (int y = 0; y < frame.dims.ny; ++y)
            for (int x = 0; x < frame.dims.nx; ++x) {
                const Vec3 c = frame.center_mm(x, y, z);
                if (in_half_open(c.x, 0, body.x, eps) && in_half_open(c.y, 0, body.y, eps) &&
                    in_half_open(c.z, 0, body.z, eps))
                    labels.at(x, y, z) = Label::material;
            }

    auto to_index = [&](double w, double o) { return (w - o) / spacing_mm - 0.5; };
    for (const auto& v : spec.voids) {
        const Vec3 lo = v.bbox_lo(), hi = v.bbox_hi();
        const int x0 = std::max(0, int(std::floor(to_index(lo.x, frame.origin_mm.x))) - 1);
        const int y0 = std::max(0, int(std::floor(to_index(lo.y, frame.origin_mm.y))) - 1);
        const int z0 = std::max(0, int(std::floor(to_index(lo.z, frame.origin_mm.z))) - 1);
        const int x1 = std::min(frame.dims.nx - 1, int(std::ceil(to_index(hi.x, frame.origin_mm.x))) + 1);
        const int y1 = std::min(frame.dims.ny - 1, int(std::ceil(to_index(hi.y, frame.origin_mm.y))) + 1);
        const int z1 = std::min(frame.dims.nz - 1, int(std::ceil(to_index(hi.z, frame.origin_mm.z))) + 1);
        for (int z = z0; z <= z1; ++z)
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x)
                    if (labels.at(x, y, z) == Label::material && void_contains(v, frame.center_mm(x, y, z), spacing_mm))
                        labels.at(x, y, z) = Label::void_;
    }

    return {grid_from_labels(labels, float(spec.material_mu)), std::move(labels)};
}

}  // namespace tomoprint
