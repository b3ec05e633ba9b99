#pragma once

#include <memory>
#include <span>
#include <vector>

#include "tomoprint/fbp.hpp"

namespace tomoprint::kernels {

/// FFT convolution with a precomputed ramp response. One instance is shared by
/// all threads; each thread brings its own Workspace.
class RampFilter {
public:
    class Workspace;
    struct WorkspaceDeleter {
        void operator()(Workspace* w) const;
    };
    using WorkspacePtr = std::unique_ptr<Workspace, WorkspaceDeleter>;

    RampFilter(int n, const FilterSpec& spec, double pitch_mm);
    ~RampFilter();
    RampFilter(const RampFilter&) = delete;
    RampFilter& operator=(const RampFilter&) = delete;

    int size() const { return n_; }
    int padded() const { return padded_; }

    WorkspacePtr make_workspace() const;
    void apply(std::span<const float> in, std::span<float> out, Workspace& ws) const;

private:
    int n_;
    int padded_;
    double pitch_;
    std::vector<double> response_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

/// Filter every row of an n_angles x bins slice sinogram. Parallel over rows.
void filter_rows(const RampFilter& filter, std::span<const float> sino2d, int n_rows, std::span<float> out);

}  // namespace tomoprint::kernels
