#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>
#include <vector>

#include "kernels/kernels.hpp"
#include "kernels/trig.hpp"

namespace tomoprint::kernels {

void backproject_slice(std::span<const float> filtered, const ScanGeometry& geometry, int nx, int ny,
                       double spacing_mm, std::span<float> out) {
    const int nb = geometry.detector_bins;
    const int na = geometry.n_angles;
    const double inv_rho = spacing_mm / geometry.detector_pitch_mm;
    const double offset = nb / 2.0 - 0.5;
    const double scale = std::numbers::pi / double(na);

    std::vector<double> cosines(na), sines(na);
    for (int a = 0; a < na; ++a) std::tie(cosines[a], sines[a]) = unit_direction(a, na);

    // Rows padded with zeros so the interpolation taps never leave the buffer
    // while the continuous index stays within [-pad + 1, nb + pad - 2].
    constexpr int pad = 2;
    const int stride = nb + 2 * pad;
    std::vector<double> padded(std::size_t(na) * stride, 0.0);
    for (int a = 0; a < na; ++a)
        for (int k = 0; k < nb; ++k) padded[std::size_t(a) * stride + pad + k] = filtered[std::size_t(a) * nb + k];

#pragma omp parallel
    {
        std::vector<double> acc(nx);
#pragma omp for schedule(static)
        for (int j = 0; j < ny; ++j) {
            std::fill(acc.begin(), acc.end(), 0.0);
            const double y = j + 0.5 - ny / 2.0;
            for (int a = 0; a < na; ++a) {
                const double* q = padded.data() + std::size_t(a) * stride + pad;
                const double step = cosines[a] * inv_rho;
                // Continuous bin index of pixel i is f0 + i * step.
                const double f0 = ((0.5 - nx / 2.0) * cosines[a] + y * sines[a]) * inv_rho + offset;
                const double f1 = f0 + (nx - 1) * step;
                if (std::min(f0, f1) > -pad + 1 && std::max(f0, f1) < nb + pad - 2) {
                    for (int i = 0; i < nx; ++i) {
                        const double g = f0 + i * step + pad;
                        const int k = int(g);
                        const double w = g - k;
                        const double* p = q + (k - pad);
                        acc[i] += p[0] + w * (p[1] - p[0]);
                    }
                    continue;
                }
                for (int i = 0; i < nx; ++i) {
                    const double f = f0 + i * step;
                    const double fl = std::floor(f);
                    const int k = int(fl);
                    const double w = f - fl;
                    double v = 0.0;
                    if (k >= 0 && k < nb) v += (1.0 - w) * q[k];
                    if (k + 1 >= 0 && k + 1 < nb) v += w * q[k + 1];
                    acc[i] += v;
                }
            }
            float* dst = out.data() + std::size_t(j) * nx;
            for (int i = 0; i < nx; ++i) dst[i] = float(acc[i] * scale);
        }
    }
}

}  // namespace tomoprint::kernels
