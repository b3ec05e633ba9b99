#include "tomoprint/xray.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "kernels/kernels.hpp"
#include "tomoprint/error.hpp"
#include "util/hash.hpp"

namespace tomoprint {

double attenuate(double i0, double mu_per_mm, double t_mm) {
    require(i0 >= 0 && mu_per_mm >= 0 && t_mm >= 0, ErrorKind::Domain,
            "attenuate needs non-negative intensity, attenuation and thickness");
    return i0 * std::exp(-mu_per_mm * t_mm);
}

double ScanGeometry::angle(int a) const { return 2.0 * std::numbers::pi * double(a) / double(n_angles); }

ScanGeometry default_geometry(const GridFrame& frame, int n_angles) {
    const double diag = std::hypot(double(frame.dims.nx), double(frame.dims.ny));
    int bins = int(std::ceil(diag)) + 2;
    if ((bins - frame.dims.nx) % 2 != 0) ++bins;
    return ScanGeometry{n_angles, bins, frame.spacing_mm, BeamKind::parallel};
}

void check_coverage(const ScanGeometry& geometry, int nx, int ny, double spacing_mm) {
    require(geometry.n_angles >= 1 && geometry.detector_bins >= 1 && geometry.detector_pitch_mm > 0,
            ErrorKind::Geometry, "scan geometry needs at least one angle, one bin and a positive pitch");
    const double diag = std::hypot(double(nx), double(ny)) * spacing_mm;
    require(geometry.span_mm() >= diag - 1e-9, ErrorKind::Geometry,
            "detector span " + std::to_string(geometry.span_mm()) + " mm does not cover the slice diagonal " +
                std::to_string(diag) + " mm");
}

Sinogram::Sinogram(ScanGeometry geometry, int n_slices, double i0)
    : geometry_(geometry), n_slices_(n_slices), i0_(i0),
      data_(std::size_t(n_slices) * std::size_t(geometry.n_angles) * std::size_t(geometry.detector_bins), 0.0f) {}

std::vector<float> radon_slice(const SliceView& slice, const ScanGeometry& geometry) {
    require(slice.values.size() == std::size_t(slice.nx) * std::size_t(slice.ny), ErrorKind::Geometry,
            "slice value count does not match its dimensions");
    check_coverage(geometry, slice.nx, slice.ny, slice.spacing_mm);
    std::vector<float> out(std::size_t(geometry.n_angles) * geometry.detector_bins);
    kernels::radon_slice(slice, geometry, out);
    return out;
}

Sinogram project_volume(const VoxelGrid& grid, const ScanGeometry& geometry) {
    const Dims& d = grid.dims();
    check_coverage(geometry, d.nx, d.ny, grid.spacing_mm());
    Sinogram sino(geometry, d.nz);
    sino.set_source_frame(grid.frame());

    // Projection is linear, and neighbouring printed slices differ in few
    // pixels: project slice z as slice z-1 plus the difference whenever the
    // difference is the sparser of the two.
    const std::size_t n = d.slice_count();
    std::vector<double> acc(std::size_t(geometry.n_angles) * geometry.detector_bins, 0.0);
    std::vector<float> delta(n);
    std::span<const float> prev;
    for (int z = 0; z < d.nz; ++z) {
        const auto in = grid.slice(z);
        std::size_t changed = 0, nonzero = 0;
        for (std::size_t i = 0; i < n; ++i) {
            nonzero += in[i] != 0.0f;
            if (!prev.empty()) changed += in[i] != prev[i];
        }
        if (!prev.empty() && changed == 0) {
            const auto src = sino.slice(z - 1);
            std::copy(src.begin(), src.end(), sino.slice(z).begin());
            continue;
        }
        bool exact = !prev.empty() && changed < nonzero;
        for (std::size_t i = 0; exact && i < n; ++i) {
            const double diff = double(in[i]) - double(prev[i]);
            delta[i] = float(diff);
            exact = double(delta[i]) == diff;
        }
        if (exact) {
            kernels::radon_accumulate(SliceView{delta, d.nx, d.ny, grid.spacing_mm()}, geometry, acc);
        } else {
            std::fill(acc.begin(), acc.end(), 0.0);
            kernels::radon_accumulate(SliceView{in, d.nx, d.ny, grid.spacing_mm()}, geometry, acc);
        }
        auto dst = sino.slice(z);
        for (std::size_t i = 0; i < acc.size(); ++i) dst[i] = float(acc[i] * grid.spacing_mm());
        prev = in;
    }
    return sino;
}

Sinogram add_photon_noise(const Sinogram& sino, double i0_photons, std::uint64_t seed) {
    require(i0_photons > 0, ErrorKind::Domain, "photon count must be positive");
    Sinogram out = sino;
    out.set_i0(i0_photons);
    std::uint64_t clamped = 0;
#pragma omp parallel for reduction(+ : clamped) schedule(static)
    for (int z = 0; z < sino.n_slices(); ++z) {
        std::mt19937_64 rng(util::mix_seed(seed, std::uint64_t(z)));
        const auto in = sino.slice(z);
        auto dst = out.slice(z);
        for (std::size_t i = 0; i < in.size(); ++i) {
            const double mean = i0_photons * std::exp(-double(in[i]));
            double counts = double(std::poisson_distribution<long long>(mean)(rng));
            if (counts < 1.0) {
                counts = 1.0;
                ++clamped;
            }
            dst[i] = float(std::max(0.0, -std::log(counts / i0_photons)));
        }
    }
    out.set_clamped_count(clamped);
    return out;
}

}  // namespace tomoprint
