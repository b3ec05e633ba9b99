#include "tomoprint/segmet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <limits>
#include <numbers>
#include <numeric>

#include "kernels/kernels.hpp"
#include "tomoprint/error.hpp"

namespace tomoprint {

OtsuResult otsu(const VoxelGrid& grid) {
    const auto v = grid.values();
    require(!v.empty(), ErrorKind::DegenerateHistogram, "empty grid");
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    OtsuResult r;
    r.lo = *mn;
    r.hi = *mx;
    require(r.hi > r.lo, ErrorKind::DegenerateHistogram, "grid is constant; no threshold separates it");

    std::vector<double> hist(kOtsuBins, 0.0);
    const double width = r.hi - r.lo;
    for (float x : v) {
        const int b = std::min(kOtsuBins - 1, int((double(x) - r.lo) / width * kOtsuBins));
        hist[b] += 1.0;
    }
    const double total = double(v.size());
    double sum_all = 0;
    for (int b = 0; b < kOtsuBins; ++b) sum_all += b * hist[b];

    r.between_class_variance.assign(kOtsuBins, 0.0);
    double w0 = 0, sum0 = 0;
    for (int k = 0; k < kOtsuBins; ++k) {
        w0 += hist[k];
        sum0 += k * hist[k];
        const double w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
        r.between_class_variance[k] = (w0 / total) * (w1 / total) * (m0 - m1) * (m0 - m1);
    }
    const double best = *std::max_element(r.between_class_variance.begin(), r.between_class_variance.end());
    int first = 0;
    while (r.between_class_variance[first] != best) ++first;
    int last = first;
    while (last + 1 < kOtsuBins && r.between_class_variance[last + 1] == best) ++last;
    r.bin = (first + last) / 2;
    r.threshold = r.lo + (r.bin + 1) * width / kOtsuBins;
    return r;
}

double otsu_threshold(const VoxelGrid& grid) { return otsu(grid).threshold; }

VoxelGrid erode_cross(const VoxelGrid& grid) {
    VoxelGrid out(grid.frame());
    kernels::cross_extremum(grid, out, false);
    return out;
}

VoxelGrid dilate_cross(const VoxelGrid& grid) {
    VoxelGrid out(grid.frame());
    kernels::cross_extremum(grid, out, true);
    return out;
}

VoxelGrid smooth(const VoxelGrid& grid) {
    const VoxelGrid closed = erode_cross(dilate_cross(grid));
    return dilate_cross(erode_cross(closed));
}

LabelVolume segment(const VoxelGrid& grid, double threshold) {
    const VoxelGrid smoothed = smooth(grid);
    const Dims d = grid.dims();
    LabelVolume labels(grid.frame(), Label::void_);
    auto out = labels.labels();
    const auto in = smoothed.values();
    for (std::size_t i = 0; i < in.size(); ++i)
        if (in[i] >= threshold) out[i] = Label::material;

    // Sub-threshold voxels reachable from the border are outside the sample.
    std::vector<std::size_t> stack;
    auto seed = [&](int x, int y, int z) {
        const std::size_t i = labels.frame().index(x, y, z);
        if (out[i] == Label::void_) {
            out[i] = Label::background;
            stack.push_back(i);
        }
    };
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x)
                if (x == 0 || y == 0 || z == 0 || x == d.nx - 1 || y == d.ny - 1 || z == d.nz - 1) seed(x, y, z);
    const std::size_t sy = d.nx, sz = d.slice_count();
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        const int x = int(i % sy), y = int((i / sy) % d.ny), z = int(i / sz);
        if (x > 0) seed(x - 1, y, z);
        if (x + 1 < d.nx) seed(x + 1, y, z);
        if (y > 0) seed(x, y - 1, z);
        if (y + 1 < d.ny) seed(x, y + 1, z);
        if (z > 0) seed(x, y, z - 1);
        if (z + 1 < d.nz) seed(x, y, z + 1);
    }
    return labels;
}

double sphere_equivalent_diameter(double volume_mm3) { return std::cbrt(6.0 * volume_mm3 / std::numbers::pi); }

std::vector<VoidDetection> extract_voids(const LabelVolume& labels) {
    const Dims d = labels.dims();
    const GridFrame& f = labels.frame();
    const auto lab = labels.labels();
    std::vector<char> visited(lab.size(), 0);
    std::vector<VoidDetection> out;
    std::vector<std::size_t> stack;
    const std::size_t sy = d.nx, sz = d.slice_count();
    const double voxel_volume = f.spacing_mm * f.spacing_mm * f.spacing_mm;

    for (std::size_t start = 0; start < lab.size(); ++start) {
        if (lab[start] != Label::void_ || visited[start]) continue;
        double sx = 0, sy_sum = 0, sz_sum = 0;
        std::size_t count = 0;
        visited[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const int x = int(i % sy), y = int((i / sy) % d.ny), z = int(i / sz);
            const Vec3 c = f.center_mm(x, y, z);
            sx += c.x, sy_sum += c.y, sz_sum += c.z;
            ++count;
            auto visit = [&](int xx, int yy, int zz) {
                const std::size_t j = f.index(xx, yy, zz);
                if (lab[j] == Label::void_ && !visited[j]) {
                    visited[j] = 1;
                    stack.push_back(j);
                }
            };
            if (x > 0) visit(x - 1, y, z);
            if (x + 1 < d.nx) visit(x + 1, y, z);
            if (y > 0) visit(x, y - 1, z);
            if (y + 1 < d.ny) visit(x, y + 1, z);
            if (z > 0) visit(x, y, z - 1);
            if (z + 1 < d.nz) visit(x, y, z + 1);
        }
        VoidDetection det;
        det.voxel_count = count;
        det.centroid_mm = {sx / count, sy_sum / count, sz_sum / count};
        det.volume_mm3 = double(count) * voxel_volume;
        det.equivalent_size_mm = std::cbrt(det.volume_mm3);
        out.push_back(det);
    }
    return out;
}

std::vector<double> default_size_edges() { return {0.0, 0.2, 0.3, 0.4, 0.6, 1.0}; }

DetectabilityReport score_detectability(std::vector<VoidDetection>& found, const PhantomSpec& truth,
                                        double match_radius_mm, const std::vector<double>& size_edges) {
    require(match_radius_mm > 0, ErrorKind::Domain, "match radius must be positive");
    require(!size_edges.empty() && std::is_sorted(size_edges.begin(), size_edges.end()), ErrorKind::Domain,
            "size bin edges must be sorted");
    for (auto& f : found) f.matched_truth.reset();

    DetectabilityReport report;
    const auto& voids = truth.voids;
    std::vector<std::size_t> order(voids.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return voids[a].size_mm > voids[b].size_mm; });

    // Bucket detections on a coarse grid so matching stays near-linear.
    const double cell = std::max(match_radius_mm, 1e-6);
    auto key = [cell](const Vec3& p) {
        return std::array<long long, 3>{(long long)std::floor(p.x / cell), (long long)std::floor(p.y / cell),
                                        (long long)std::floor(p.z / cell)};
    };
    std::map<std::array<long long, 3>, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < found.size(); ++i) buckets[key(found[i].centroid_mm)].push_back(i);

    report.outcomes.resize(voids.size());
    for (std::size_t t : order) {
        const VoidSpec& v = voids[t];
        TruthOutcome& o = report.outcomes[t];
        o.truth_index = t;
        o.size_mm = v.size_mm;
        const auto k = key(v.center_mm);
        std::ptrdiff_t best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (long long dz = -1; dz <= 1; ++dz)
            for (long long dy = -1; dy <= 1; ++dy)
                for (long long dx = -1; dx <= 1; ++dx) {
                    auto it = buckets.find({k[0] + dx, k[1] + dy, k[2] + dz});
                    if (it == buckets.end()) continue;
                    for (std::size_t i : it->second) {
                        if (found[i].matched_truth) continue;
                        const double dist = (found[i].centroid_mm - v.center_mm).norm();
                        if (dist <= match_radius_mm && (dist < best_dist || (dist == best_dist && std::ptrdiff_t(i) < best))) {
                            best_dist = dist;
                            best = std::ptrdiff_t(i);
                        }
                    }
                }
        if (best >= 0) {
            found[best].matched_truth = t;
            o.detected = true;
            o.centroid_error_mm = best_dist;
            o.volume_ratio = found[best].volume_mm3 / v.volume_mm3();
        }
    }

    for (std::size_t b = 0; b < size_edges.size(); ++b) {
        SizeBin bin;
        bin.lo_mm = size_edges[b];
        bin.hi_mm = b + 1 < size_edges.size() ? size_edges[b + 1] : std::numeric_limits<double>::infinity();
        report.bins.push_back(bin);
    }
    std::size_t detected = 0;
    for (const auto& o : report.outcomes) {
        // Sizes are quoted to 0.01 mm; nudge so 0.3 lands in [0.3, 0.4).
        const double s = o.size_mm + 1e-9;
        for (auto& bin : report.bins)
            if (s >= bin.lo_mm && s < bin.hi_mm) {
                ++bin.total;
                if (o.detected) {
                    ++bin.detected;
                    bin.mean_volume_ratio += o.volume_ratio;
                }
            }
        detected += o.detected;
    }
    for (auto& bin : report.bins)
        if (bin.detected) bin.mean_volume_ratio /= double(bin.detected);
    report.overall_rate = voids.empty() ? 0.0 : double(detected) / double(voids.size());

    auto threshold_size = [&](double rate) -> std::optional<double> {
        std::optional<double> result;
        for (std::size_t b = report.bins.size(); b-- > 0;) {
            const auto& bin = report.bins[b];
            if (bin.total == 0) continue;
            if (bin.rate() + 1e-12 < rate) break;
            result = bin.lo_mm;
        }
        return result;
    };
    report.min_size_full = threshold_size(1.0);
    report.min_size_half = threshold_size(0.5);
    return report;
}

}  // namespace tomoprint
