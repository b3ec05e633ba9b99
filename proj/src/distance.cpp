#include "tomoprint/distance.hpp"

#include <cmath>
#include <limits>

namespace tomoprint {

namespace {

constexpr float kInf = std::numeric_limits<float>::infinity();

// 1D squared distance transform of sampled function f (lower envelope of
// parabolas). `v` and `z` are scratch buffers of size n and n+1.
void edt_1d(const float* f, float* d, int n, std::ptrdiff_t stride, std::vector<int>& v, std::vector<double>& z,
            std::vector<float>& line) {
    for (int i = 0; i < n; ++i) line[i] = f[i * stride];
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (line[q] == kInf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -std::numeric_limits<double>::infinity();
            z[1] = std::numeric_limits<double>::infinity();
            continue;
        }
        double s;
        for (;;) {
            const int p = v[k];
            s = ((line[q] + double(q) * q) - (line[p] + double(p) * p)) / (2.0 * (q - p));
            if (s > z[k]) break;
            --k;  // z[0] is -inf, so k never drops below zero
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    if (k < 0) {
        for (int i = 0; i < n; ++i) d[i * stride] = kInf;
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const double dq = double(q) - v[j];
        d[q * stride] = float(dq * dq + line[v[j]]);
    }
}

}  // namespace

std::vector<float> squared_distance_transform(const Dims& dims, const std::vector<char>& feature) {
    const int nx = dims.nx, ny = dims.ny, nz = dims.nz;
    std::vector<float> d(dims.count());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = feature[i] ? 0.0f : kInf;

    const int longest = std::max({nx, ny, nz});
    const std::ptrdiff_t sx = 1, sy = nx, sz = std::ptrdiff_t(nx) * ny;

#pragma omp parallel
    {
        std::vector<int> v(longest + 1);
        std::vector<double> z(longest + 2);
        std::vector<float> line(longest);
#pragma omp for collapse(2) schedule(static)
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j) {
                float* p = d.data() + k * sz + j * sy;
                edt_1d(p, p, nx, sx, v, z, line);
            }
#pragma omp for collapse(2) schedule(static)
        for (int k = 0; k < nz; ++k)
            for (int i = 0; i < nx; ++i) {
                float* p = d.data() + k * sz + i;
                edt_1d(p, p, ny, sy, v, z, line);
            }
#pragma omp for collapse(2) schedule(static)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                float* p = d.data() + j * sy + i;
                edt_1d(p, p, nz, sz, v, z, line);
            }
    }
    return d;
}

std::vector<float> signed_distance(const Dims& dims, const std::vector<char>& inside) {
    std::vector<char> outside(inside.size());
    for (std::size_t i = 0; i < inside.size(); ++i) outside[i] = !inside[i];
    const auto to_outside = squared_distance_transform(dims, outside);
    const auto to_inside = squared_distance_transform(dims, inside);
    std::vector<float> sd(inside.size());
    for (std::size_t i = 0; i < sd.size(); ++i)
        sd[i] = inside[i] ? std::sqrt(to_outside[i]) - 0.5f : -(std::sqrt(to_inside[i]) - 0.5f);
    return sd;
}

}  // namespace tomoprint
