#include "tomoprint/volume.hpp"

#include <algorithm>
#include <cmath>

#include "tomoprint/error.hpp"

namespace tomoprint {

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

namespace {

void check_frame(const GridFrame& frame) {
    require(frame.spacing_mm > 0, ErrorKind::Domain, "voxel spacing must be positive");
    require(frame.dims.nx >= 1 && frame.dims.ny >= 1 && frame.dims.nz >= 1, ErrorKind::Domain,
            "grid dimensions must be at least 1");
}

}  // namespace

VoxelGrid::VoxelGrid(GridFrame frame, float fill) : frame_(frame) {
    check_frame(frame_);
    require(fill >= 0.0f, ErrorKind::Domain, "attenuation values must be non-negative");
    values_.assign(frame_.dims.count(), fill);
}

VoxelGrid::VoxelGrid(GridFrame frame, std::vector<float> values) : frame_(frame), values_(std::move(values)) {
    check_frame(frame_);
    require(values_.size() == frame_.dims.count(), ErrorKind::Domain, "value count does not match grid dimensions");
}

LabelVolume::LabelVolume(GridFrame frame, Label fill) : frame_(frame) {
    check_frame(frame_);
    labels_.assign(frame_.dims.count(), fill);
}

LabelCounts LabelVolume::counts() const {
    LabelCounts c;
    for (Label l : labels_) {
        switch (l) {
        case Label::background: ++c.background; break;
        case Label::material: ++c.material; break;
        case Label::void_: ++c.voids; break;
        }
    }
    return c;
}

VoxelGrid grid_from_labels(const LabelVolume& labels, float material_mu) {
    VoxelGrid grid(labels.frame());
    auto out = grid.values();
    auto in = labels.labels();
    std::transform(in.begin(), in.end(), out.begin(),
                   [material_mu](Label l) { return l == Label::material ? material_mu : 0.0f; });
    return grid;
}

}  // namespace tomoprint
