#include <algorithm>
#include <cmath>
#include <vector>

#include "kernels/kernels.hpp"
#include "kernels/trig.hpp"

namespace tomoprint::kernels {

void radon_accumulate(const SliceView& slice, const ScanGeometry& geometry, std::span<double> acc_all) {
    const int nb = geometry.detector_bins;
    const int na = geometry.n_angles;
    const double rho = geometry.detector_pitch_mm / slice.spacing_mm;  // bin pitch in pixel units
    const double half_nb = nb / 2.0;
    const int nx = slice.nx, ny = slice.ny;

    // Rows that contain no attenuation are skipped outright.
    std::vector<char> row_used(ny, 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (slice.values[std::size_t(j) * nx + i] != 0.0f) {
                row_used[j] = 1;
                break;
            }

#pragma omp parallel for schedule(dynamic, 4)
    for (int a = 0; a < na; ++a) {
        const auto [c, s] = unit_direction(a, na);
        const double ac = std::abs(c), as = std::abs(s);
        const double outer = 0.5 * (ac + as);
        const double inner = 0.5 * std::abs(ac - as);
        const double peak = 1.0 / std::max(ac, as);
        const double ramp = outer - inner;
        const bool aligned = ramp < 1e-12;
        // On axis-aligned views a ray lying on a pixel edge belongs to the
        // pixel on its positive side in world coordinates.
        const bool positive = c + s > 0;

        double* acc = acc_all.data() + std::size_t(a) * nb;
        for (int j = 0; j < ny; ++j) {
            if (!row_used[j]) continue;
            const float* row = slice.values.data() + std::size_t(j) * nx;
            const double y = j + 0.5 - ny / 2.0;
            const double t_row = (0.5 - nx / 2.0) * c + y * s;
            for (int i = 0; i < nx; ++i) {
                const float v = row[i];
                if (v == 0.0f) continue;
                const double t = t_row + i * c;
                const int k_lo = std::max(0, int(std::ceil((t - outer) / rho + half_nb - 0.5)));
                const int k_hi = std::min(nb - 1, int(std::floor((t + outer) / rho + half_nb - 0.5)));
                for (int k = k_lo; k <= k_hi; ++k) {
                    const double d = (k + 0.5 - half_nb) * rho - t;
                    double w;
                    if (aligned) {
                        const bool in = positive ? (d >= -inner && d < inner) : (d > -inner && d <= inner);
                        w = in ? peak : 0.0;
                    } else {
                        const double ad = std::abs(d);
                        w = ad <= inner ? peak : (ad < outer ? peak * (outer - ad) / ramp : 0.0);
                    }
                    acc[k] += v * w;
                }
            }
        }
    }
}

void radon_slice(const SliceView& slice, const ScanGeometry& geometry, std::span<float> out) {
    std::vector<double> acc(out.size(), 0.0);
    radon_accumulate(slice, geometry, acc);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = float(acc[i] * slice.spacing_mm);
}

}  // namespace tomoprint::kernels
