#include <algorithm>

#include "kernels/kernels.hpp"

namespace tomoprint::kernels {

void cross_extremum(const VoxelGrid& in, VoxelGrid& out, bool maximum) {
    const Dims d = in.dims();
    const auto src = in.values();
    auto dst = out.values();
    const std::ptrdiff_t sy = d.nx, sz = std::ptrdiff_t(d.slice_count());
#pragma omp parallel for schedule(static)
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y) {
            const std::ptrdiff_t row = z * sz + y * sy;
            const float* c = src.data() + row;
            // Neighbours outside the grid are skipped by pointing them at the centre.
            const float* ym = y > 0 ? c - sy : c;
            const float* yp = y + 1 < d.ny ? c + sy : c;
            const float* zm = z > 0 ? c - sz : c;
            const float* zp = z + 1 < d.nz ? c + sz : c;
            float* o = dst.data() + row;
            for (int x = 0; x < d.nx; ++x) {
                const float xm = c[x > 0 ? x - 1 : x], xp = c[x + 1 < d.nx ? x + 1 : x];
                const float a = maximum ? std::max({c[x], xm, xp}) : std::min({c[x], xm, xp});
                const float b = maximum ? std::max({ym[x], yp[x], zm[x], zp[x]}) : std::min({ym[x], yp[x], zm[x], zp[x]});
                o[x] = maximum ? std::max(a, b) : std::min(a, b);
            }
        }
}

}  // namespace tomoprint::kernels
