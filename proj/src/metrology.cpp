#include "tomoprint/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "tomoprint/distance.hpp"
#include "tomoprint/error.hpp"

namespace tomoprint {

std::string to_string(Plane p) { return p == Plane::XY ? "XY" : "XZ"; }

std::string to_string(Metric m) {
    switch (m) {
        case Metric::cusp_density: return "cusp_density";
        case Metric::roughness: return "roughness";
        case Metric::porosity: return "porosity";
    }
    return "?";
}

Plane parse_plane(const std::string& s) {
    if (s == "XY" || s == "xy") return Plane::XY;
    if (s == "XZ" || s == "xz") return Plane::XZ;
    fail(ErrorKind::Config, "unknown plane '" + s + "'");
}

Metric parse_metric(const std::string& s) {
    if (s == "cusp_density" || s == "cusp") return Metric::cusp_density;
    if (s == "roughness") return Metric::roughness;
    if (s == "porosity") return Metric::porosity;
    fail(ErrorKind::Config, "unknown metric '" + s + "'");
}

void validate(const SmoothingSpec& spec) {
    require(spec.structuring_radius_vox >= 1, ErrorKind::Domain, "structuring radius must be >= 1 voxel");
    require(spec.void_exclusion_radius_mm >= 0, ErrorKind::Domain, "void exclusion radius must be >= 0");
}

double MetricsReport::value(Metric m, Plane p) const {
    switch (m) {
        case Metric::cusp_density: return p == Plane::XY ? cusp_density_xy : cusp_density_xz;
        case Metric::roughness: return p == Plane::XY ? roughness_xy : roughness_xz;
        case Metric::porosity: return porosity_pct;
    }
    return 0;
}

int slice_count(const Dims& d, Plane p) { return p == Plane::XY ? d.nz : d.ny; }

Mask2D slice_mask(const LabelVolume& labels, Plane p, int index, bool (*pred)(Label)) {
    const Dims d = labels.dims();
    if (p == Plane::XY) {
        Mask2D m(d.nx, d.ny);
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) m.at(x, y) = pred(labels.at(x, y, index));
        return m;
    }
    Mask2D m(d.nx, d.nz);
    for (int z = 0; z < d.nz; ++z)
        for (int x = 0; x < d.nx; ++x) m.at(x, z) = pred(labels.at(x, index, z));
    return m;
}

namespace {

bool solid_pred(Label l) { return l != Label::background; }

}  // namespace

double cusp_volume(const LabelVolume& labels, Plane plane, const SmoothingSpec& spec) {
    validate(spec);
    const int n = slice_count(labels.dims(), plane);
    long long total = 0;
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : total)
    for (int s = 0; s < n; ++s) {
        const Mask2D m = slice_mask(labels, plane, s, solid_pred);
        if (std::find(m.bits.begin(), m.bits.end(), 1) == m.bits.end()) continue;
        const Mask2D ref = smooth_reference(m, spec.structuring_radius_vox);
        long long c = 0;
        for (std::size_t i = 0; i < m.bits.size(); ++i) c += m.bits[i] != ref.bits[i];
        total += c;
    }
    return double(total);
}

double cusp_density(const LabelVolume& labels, Plane plane, const SmoothingSpec& spec) {
    const std::size_t material = labels.counts().material;
    require(material > 0, ErrorKind::EmptySample, "no material voxels");
    return 100.0 * cusp_volume(labels, plane, spec) / double(material);
}

double roughness(const LabelVolume& labels, const LabelVolume& reference, Plane plane, const SmoothingSpec& spec) {
    validate(spec);
    require(labels.dims() == reference.dims(), ErrorKind::Registration, "label volumes differ in dims");
    const Dims d = labels.dims();
    const auto a = labels.labels(), b = reference.labels();

    std::vector<char> excluded(a.size(), 0);
    const double r_vox = spec.void_exclusion_radius_mm / reference.spacing_mm();
    std::vector<char> feature(a.size(), 0);
    bool any_void = false;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i] == Label::void_) feature[i] = 1, any_void = true;
    if (any_void) {
        const auto d2 = squared_distance_transform(d, feature);
        const double lim = r_vox * r_vox + 1e-9;
        for (std::size_t i = 0; i < d2.size(); ++i) excluded[i] = d2[i] <= lim;
    }

    // Per-slice accumulation in the requested family; the totals coincide
    // across families because the count is voxelwise.
    const int n = slice_count(d, plane);
    long long total = 0;
#pragma omp parallel for schedule(static) reduction(+ : total)
    for (int s = 0; s < n; ++s) {
        long long c = 0;
        const int outer = plane == Plane::XY ? d.ny : d.nz;
        for (int o = 0; o < outer; ++o)
            for (int x = 0; x < d.nx; ++x) {
                const std::size_t i = plane == Plane::XY ? labels.frame().index(x, o, s) : labels.frame().index(x, s, o);
                if (excluded[i]) continue;
                c += (a[i] == Label::material) != (b[i] == Label::material);
            }
        total += c;
    }
    return double(total);
}

LabelVolume shift_labels(const LabelVolume& in, Shift s) {
    const Dims d = in.dims();
    LabelVolume out(in.frame(), Label::background);
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                const int sx = x + s.dx, sy = y + s.dy, sz = z + s.dz;
                if (d.contains(sx, sy, sz)) out.at(x, y, z) = in.at(sx, sy, sz);
            }
    return out;
}

namespace {

std::vector<std::uint8_t> material_bytes(const LabelVolume& l) {
    std::vector<std::uint8_t> m(l.labels().size());
    std::transform(l.labels().begin(), l.labels().end(), m.begin(),
                   [](Label v) { return std::uint8_t(v == Label::material); });
    return m;
}

std::size_t overlap_bytes(const std::vector<std::uint8_t>& mov, const std::vector<std::uint8_t>& ref, const Dims& d,
                          Shift s) {
    const int x0 = std::max(0, -s.dx), x1 = std::min(d.nx, d.nx - s.dx);
    const int y0 = std::max(0, -s.dy), y1 = std::min(d.ny, d.ny - s.dy);
    const int z0 = std::max(0, -s.dz), z1 = std::min(d.nz, d.nz - s.dz);
    if (x0 >= x1 || y0 >= y1 || z0 >= z1) return 0;
    const std::size_t sy = std::size_t(d.nx), sz = d.slice_count();
    std::size_t total = 0;
    for (int z = z0; z < z1; ++z)
        for (int y = y0; y < y1; ++y) {
            const std::uint8_t* r = ref.data() + z * sz + y * sy;
            const std::uint8_t* m = mov.data() + (z + s.dz) * sz + (y + s.dy) * sy + s.dx;
            unsigned row = 0;
            for (int x = x0; x < x1; ++x) row += r[x] & m[x];
            total += row;
        }
    return total;
}

Vec3 material_centroid(const LabelVolume& l) {
    const Dims d = l.dims();
    double sx = 0, sy = 0, sz = 0;
    std::size_t n = 0;
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x)
                if (l.at(x, y, z) == Label::material) sx += x, sy += y, sz += z, ++n;
    if (n == 0) return {};
    return {sx / double(n), sy / double(n), sz / double(n)};
}

}  // namespace

std::size_t overlap_count(const LabelVolume& moving, const LabelVolume& reference, Shift s) {
    require(moving.dims() == reference.dims(), ErrorKind::Registration, "label volumes differ in dims");
    return overlap_bytes(material_bytes(moving), material_bytes(reference), moving.dims(), s);
}

Alignment align(const LabelVolume& moving, const LabelVolume& reference, int search_radius_vox) {
    require(moving.dims() == reference.dims(), ErrorKind::Registration, "label volumes differ in dims");
    require(search_radius_vox >= 0, ErrorKind::Domain, "search radius must be >= 0");
    const Dims d = moving.dims();
    const auto mov = material_bytes(moving), ref = material_bytes(reference);
    const Vec3 c = material_centroid(moving) - material_centroid(reference);
    const Shift c0{int(std::lround(c.x)), int(std::lround(c.y)), int(std::lround(c.z))};

    const int k = search_radius_vox, w = 2 * k + 1;
    std::vector<Shift> candidates;
    candidates.reserve(std::size_t(w) * w * w);
    for (int a = -k; a <= k; ++a)
        for (int b = -k; b <= k; ++b)
            for (int e = -k; e <= k; ++e) candidates.push_back({c0.dx + a, c0.dy + b, c0.dz + e});
    std::vector<std::size_t> scores(candidates.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(candidates.size()); ++i)
        scores[i] = overlap_bytes(mov, ref, d, candidates[i]);

    auto better = [](std::size_t sa, const Shift& a, std::size_t sb, const Shift& b) {
        if (sa != sb) return sa > sb;
        const long ma = long(a.dx) * a.dx + long(a.dy) * a.dy + long(a.dz) * a.dz;
        const long mb = long(b.dx) * b.dx + long(b.dy) * b.dy + long(b.dz) * b.dz;
        if (ma != mb) return ma < mb;
        return std::tie(a.dx, a.dy, a.dz) < std::tie(b.dx, b.dy, b.dz);
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (better(scores[i], candidates[i], scores[best], candidates[best])) best = i;
    require(scores[best] > 0, ErrorKind::AlignmentFailure, "no material overlap in the search window");

    Alignment out;
    out.shift = candidates[best];
    out.overlap = scores[best];
    out.registered = shift_labels(moving, out.shift);
    return out;
}

double porosity(const LabelVolume& labels) {
    const LabelCounts c = labels.counts();
    require(c.material + c.voids > 0, ErrorKind::EmptySample, "no material or void voxels");
    return 100.0 * double(c.voids) / double(c.material + c.voids);
}

std::vector<Ranking> rank_settings(const std::vector<MetricsReport>& reports, Metric metric, Plane plane) {
    require(!reports.empty(), ErrorKind::EmptySample, "no reports to rank");
    std::vector<Ranking> out;
    std::vector<int> best_index;
    std::map<std::pair<std::string, std::string>, std::size_t> slot;
    for (const auto& r : reports) {
        const double v = r.value(metric, plane);
        const auto key = std::make_pair(r.sample_id, r.printer_id);
        auto it = slot.find(key);
        if (it == slot.end()) {
            slot.emplace(key, out.size());
            out.push_back({r.sample_id, r.printer_id, r.setting_id, v});
            best_index.push_back(r.setting_index);
            continue;
        }
        Ranking& cur = out[it->second];
        int& idx = best_index[it->second];
        if (v < cur.value || (v == cur.value && r.setting_index < idx)) {
            cur.setting_id = r.setting_id;
            cur.value = v;
            idx = r.setting_index;
        }
    }
    return out;
}

const Ranking& global_best(const std::vector<Ranking>& rankings) {
    require(!rankings.empty(), ErrorKind::EmptySample, "no rankings");
    std::size_t best = 0;
    for (std::size_t i = 1; i < rankings.size(); ++i)
        if (rankings[i].value < rankings[best].value) best = i;
    return rankings[best];
}

}  // namespace tomoprint
