#include "reference/serial_reference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "kernels/trig.hpp"

namespace tomoprint::reference {

namespace {

// Parameter interval of the line {u*n + tau*d} inside [lo, hi) along one axis,
// where the axis coordinate is base + tau * slope.
bool clip_axis(double base, double slope, double lo, double hi, double& tmin, double& tmax) {
    if (slope == 0.0) return base >= lo && base < hi;
    double a = (lo - base) / slope, b = (hi - base) / slope;
    if (a > b) std::swap(a, b);
    tmin = std::max(tmin, a);
    tmax = std::min(tmax, b);
    return tmin < tmax;
}

}  // namespace

std::vector<float> radon_slice(const SliceView& slice, const ScanGeometry& geometry) {
    const int nb = geometry.detector_bins, na = geometry.n_angles;
    const double h = slice.spacing_mm;
    std::vector<float> out(std::size_t(na) * nb, 0.0f);
    for (int a = 0; a < na; ++a) {
        const auto [c, s] = kernels::unit_direction(a, na);
        for (int k = 0; k < nb; ++k) {
            const double u = geometry.bin_center_mm(k);
            double sum = 0.0;
            for (int j = 0; j < slice.ny; ++j) {
                const double y0 = (j - slice.ny / 2.0) * h;
                for (int i = 0; i < slice.nx; ++i) {
                    const float v = slice.values[std::size_t(j) * slice.nx + i];
                    if (v == 0.0f) continue;
                    const double x0 = (i - slice.nx / 2.0) * h;
                    double tmin = -std::numeric_limits<double>::infinity();
                    double tmax = std::numeric_limits<double>::infinity();
                    // Ray point: (u c - tau s, u s + tau c).
                    if (!clip_axis(u * c, -s, x0, x0 + h, tmin, tmax)) continue;
                    if (!clip_axis(u * s, c, y0, y0 + h, tmin, tmax)) continue;
                    sum += double(v) * (tmax - tmin);
                }
            }
            out[std::size_t(a) * nb + k] = float(sum);
        }
    }
    return out;
}

std::vector<float> backproject_slice(std::span<const float> filtered, const ScanGeometry& geometry, int nx, int ny,
                                     double spacing_mm) {
    const int nb = geometry.detector_bins, na = geometry.n_angles;
    std::vector<float> out(std::size_t(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double x = (i + 0.5 - nx / 2.0) * spacing_mm;
            const double y = (j + 0.5 - ny / 2.0) * spacing_mm;
            double sum = 0.0;
            for (int a = 0; a < na; ++a) {
                const auto [c, s] = kernels::unit_direction(a, na);
                const double u = x * c + y * s;
                const double f = u / geometry.detector_pitch_mm + nb / 2.0 - 0.5;
                const int k = int(std::floor(f));
                const double w = f - k;
                const float* q = filtered.data() + std::size_t(a) * nb;
                if (k >= 0 && k < nb) sum += (1.0 - w) * q[k];
                if (k + 1 >= 0 && k + 1 < nb) sum += w * q[k + 1];
            }
            out[std::size_t(j) * nx + i] = float(sum * std::numbers::pi / na);
        }
    return out;
}

std::vector<float> ramlak_convolve(std::span<const float> row, double pitch_mm) {
    const int n = int(row.size());
    auto kernel = [pitch_mm](int m) {
        if (m == 0) return 1.0 / (4.0 * pitch_mm * pitch_mm);
        if (m % 2 == 0) return 0.0;
        return -1.0 / (std::numbers::pi * std::numbers::pi * double(m) * double(m) * pitch_mm * pitch_mm);
    };
    std::vector<float> out(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += kernel(i - j) * row[j];
        out[i] = float(acc * pitch_mm);
    }
    return out;
}

VoxelGrid cross_extremum(const VoxelGrid& grid, bool maximum) {
    const Dims d = grid.dims();
    VoxelGrid out(grid.frame());
    constexpr int off[7][3] = {{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                float v = grid.at(x, y, z);
                for (const auto& o : off) {
                    const int a = x + o[0], b = y + o[1], c = z + o[2];
                    if (!d.contains(a, b, c)) continue;
                    v = maximum ? std::max(v, grid.at(a, b, c)) : std::min(v, grid.at(a, b, c));
                }
                out.at(x, y, z) = v;
            }
    return out;
}

}  // namespace tomoprint::reference
