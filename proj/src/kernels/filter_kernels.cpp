#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "kernels/filter.hpp"

namespace tomoprint::kernels {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct RampFilter::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

class RampFilter::Workspace {
public:
    explicit Workspace(int padded)
        : real(static_cast<double*>(fftw_malloc(sizeof(double) * padded))),
          spectrum(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (padded / 2 + 1)))) {}
    ~Workspace() {
        fftw_free(real);
        fftw_free(spectrum);
    }
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    double* real;
    fftw_complex* spectrum;
};

RampFilter::RampFilter(int n, const FilterSpec& spec, double pitch_mm)
    : n_(n), padded_(padded_length(n)), pitch_(pitch_mm), response_(filter_response(padded_, spec, pitch_mm)),
      plans_(std::make_unique<Plans>()) {
    Workspace ws(padded_);
    std::lock_guard lock(planner_mutex());
    plans_->forward = fftw_plan_dft_r2c_1d(padded_, ws.real, ws.spectrum, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r_1d(padded_, ws.spectrum, ws.real, FFTW_ESTIMATE);
}

RampFilter::~RampFilter() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plans_->forward);
    fftw_destroy_plan(plans_->backward);
}

void RampFilter::WorkspaceDeleter::operator()(Workspace* w) const { delete w; }

RampFilter::WorkspacePtr RampFilter::make_workspace() const { return WorkspacePtr(new Workspace(padded_)); }

void RampFilter::apply(std::span<const float> in, std::span<float> out, Workspace& ws) const {
    std::fill(ws.real, ws.real + padded_, 0.0);
    std::copy(in.begin(), in.end(), ws.real);
    fftw_execute_dft_r2c(plans_->forward, ws.real, ws.spectrum);
    for (int k = 0; k <= padded_ / 2; ++k) {
        ws.spectrum[k][0] *= response_[k];
        ws.spectrum[k][1] *= response_[k];
    }
    fftw_execute_dft_c2r(plans_->backward, ws.spectrum, ws.real);
    // Convolution sum times the sample pitch; FFTW's inverse is unnormalized.
    const double scale = pitch_ / double(padded_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = float(ws.real[i] * scale);
}

void filter_rows(const RampFilter& filter, std::span<const float> sino2d, int n_rows, std::span<float> out) {
    const std::size_t n = std::size_t(filter.size());
#pragma omp parallel
    {
        auto ws = filter.make_workspace();
#pragma omp for schedule(static)
        for (int r = 0; r < n_rows; ++r)
            filter.apply(sino2d.subspan(r * n, n), out.subspan(r * n, n), *ws);
    }
}

}  // namespace tomoprint::kernels
