#include "tomoprint/fbp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <unordered_map>

#include "kernels/filter.hpp"
#include "kernels/kernels.hpp"
#include "tomoprint/error.hpp"
#include "util/hash.hpp"

namespace tomoprint {

void validate(const FilterSpec& spec) {
    require(spec.cutoff > 0 && spec.cutoff <= 1, ErrorKind::Domain, "filter cutoff must lie in (0, 1]");
}

int padded_length(int n) {
    int p = 64;
    while (p < 2 * n) p *= 2;
    return p;
}

std::vector<double> filter_response(int padded, const FilterSpec& spec, double pitch_mm) {
    validate(spec);
    const double tau2 = pitch_mm * pitch_mm;
    std::vector<double> kernel(padded, 0.0);
    kernel[0] = 1.0 / (4.0 * tau2);
    for (int n = 1; n < padded / 2; n += 2) {
        const double h = -1.0 / (std::numbers::pi * std::numbers::pi * double(n) * double(n) * tau2);
        kernel[n] = h;
        kernel[padded - n] = h;
    }
    // Even real kernel: its DFT is a cosine series.
    std::vector<double> spectrum(padded / 2 + 1);
    for (int k = 0; k <= padded / 2; ++k) {
        double acc = kernel[0];
        for (int n = 1; n < padded / 2; n += 2)
            acc += 2.0 * kernel[n] * std::cos(2.0 * std::numbers::pi * double(k) * double(n) / double(padded));
        spectrum[k] = acc;
    }
    std::vector<double> response(padded / 2 + 1);
    for (int k = 0; k <= padded / 2; ++k) {
        const double nu = double(k) / double(padded / 2);  // 1 at Nyquist
        double w = nu <= spec.cutoff ? 1.0 : 0.0;
        if (spec.kind == FilterKind::ramp_hann && nu <= spec.cutoff)
            w = 0.5 * (1.0 + std::cos(std::numbers::pi * nu / spec.cutoff));
        response[k] = spectrum[k] * w;
    }
    // The truncated kernel leaves a residual of order 1/padded at DC.
    response[0] = 0.0;
    return response;
}

std::vector<float> filter_projection(std::span<const float> row, const FilterSpec& spec, double pitch_mm) {
    require(row.size() >= 2, ErrorKind::Domain, "projection row needs at least two samples");
    kernels::RampFilter filter(int(row.size()), spec, pitch_mm);
    std::vector<float> out(row.size());
    auto ws = filter.make_workspace();
    filter.apply(row, out, *ws);
    return out;
}

namespace {

void check_slice_shape(std::span<const float> sino2d, const ScanGeometry& geometry) {
    require(geometry.n_angles >= 1 && geometry.detector_bins >= 2, ErrorKind::Geometry, "invalid scan geometry");
    require(sino2d.size() == std::size_t(geometry.n_angles) * std::size_t(geometry.detector_bins),
            ErrorKind::Geometry, "sinogram shape does not match the scan geometry");
}

void fbp_slice_into(const kernels::RampFilter& filter, std::span<const float> sino2d, const ScanGeometry& geometry,
                    int nx, int ny, double spacing_mm, std::span<float> out) {
    std::vector<float> filtered(sino2d.size());
    kernels::filter_rows(filter, sino2d, geometry.n_angles, filtered);
    kernels::backproject_slice(filtered, geometry, nx, ny, spacing_mm, out);
}

}  // namespace

std::vector<float> fbp_slice(std::span<const float> sino2d, const ScanGeometry& geometry, const FilterSpec& spec,
                             int nx, int ny, double spacing_mm) {
    check_slice_shape(sino2d, geometry);
    require(nx >= 1 && ny >= 1 && spacing_mm > 0, ErrorKind::Geometry, "invalid output slice");
    kernels::RampFilter filter(geometry.detector_bins, spec, geometry.detector_pitch_mm);
    std::vector<float> out(std::size_t(nx) * ny);
    fbp_slice_into(filter, sino2d, geometry, nx, ny, spacing_mm, out);
    return out;
}

VoxelGrid reconstruct_volume(const Sinogram& sino, const FilterSpec& spec) {
    const ScanGeometry& geometry = sino.geometry();
    GridFrame frame = sino.source_frame();
    require(frame.dims.nz == sino.n_slices(), ErrorKind::Geometry,
            "sinogram slice count does not match its source frame");
    if (sino.n_slices() > 0) check_slice_shape(sino.slice(0), geometry);
    check_coverage(geometry, frame.dims.nx, frame.dims.ny, frame.spacing_mm);
    kernels::RampFilter filter(geometry.detector_bins, spec, geometry.detector_pitch_mm);

    VoxelGrid grid(frame);
    std::unordered_map<std::uint64_t, std::vector<int>> seen;
    for (int z = 0; z < sino.n_slices(); ++z) {
        const auto in = sino.slice(z);
        const std::uint64_t h = util::fnv1a(in.data(), in.size_bytes());
        bool reused = false;
        for (int prev : seen[h]) {
            const auto other = sino.slice(prev);
            if (std::memcmp(other.data(), in.data(), in.size_bytes()) == 0) {
                std::copy(grid.slice(prev).begin(), grid.slice(prev).end(), grid.slice(z).begin());
                reused = true;
                break;
            }
        }
        if (reused) continue;
        seen[h].push_back(z);
        auto out = grid.slice(z);
        fbp_slice_into(filter, in, geometry, frame.dims.nx, frame.dims.ny, frame.spacing_mm, out);
        for (float& v : out) v = std::max(v, 0.0f);
    }
    return grid;
}

}  // namespace tomoprint
