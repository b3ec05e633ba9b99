#include "tomoprint/morphology.hpp"

#include <algorithm>

namespace tomoprint {

namespace {

// Sliding-window count along rows then columns. `need_all` selects erosion
// (every pixel in the window set) versus dilation (any pixel set).
Mask2D window_pass(const Mask2D& m, int r, bool need_all) {
    const int w = m.width, h = m.height;
    const int full = 2 * r + 1;
    Mask2D tmp(w, h), out(w, h);
    std::vector<int> prefix(std::max(w, h) + 1);
    for (int y = 0; y < h; ++y) {
        prefix[0] = 0;
        for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + m.at(x, y);
        for (int x = 0; x < w; ++x) {
            const int n = prefix[std::min(w, x + r + 1)] - prefix[std::max(0, x - r)];
            tmp.at(x, y) = need_all ? (n == full) : (n > 0);
        }
    }
    for (int x = 0; x < w; ++x) {
        prefix[0] = 0;
        for (int y = 0; y < h; ++y) prefix[y + 1] = prefix[y] + tmp.at(x, y);
        for (int y = 0; y < h; ++y) {
            const int n = prefix[std::min(h, y + r + 1)] - prefix[std::max(0, y - r)];
            out.at(x, y) = need_all ? (n == full) : (n > 0);
        }
    }
    return out;
}

Mask2D pad(const Mask2D& m, int r) {
    Mask2D out(m.width + 2 * r, m.height + 2 * r);
    for (int y = 0; y < m.height; ++y)
        std::copy_n(m.bits.begin() + std::size_t(y) * m.width, m.width, out.bits.begin() + std::size_t(y + r) * out.width + r);
    return out;
}

Mask2D crop(const Mask2D& m, int r) {
    Mask2D out(m.width - 2 * r, m.height - 2 * r);
    for (int y = 0; y < out.height; ++y)
        std::copy_n(m.bits.begin() + std::size_t(y + r) * m.width + r, out.width, out.bits.begin() + std::size_t(y) * out.width);
    return out;
}

}  // namespace

Mask2D erode(const Mask2D& m, int r) { return r <= 0 ? m : window_pass(m, r, true); }
Mask2D dilate(const Mask2D& m, int r) { return r <= 0 ? m : window_pass(m, r, false); }
Mask2D open(const Mask2D& m, int r) { return dilate(erode(m, r), r); }

Mask2D close(const Mask2D& m, int r) {
    if (r <= 0) return m;
    return crop(erode(dilate(pad(m, r), r), r), r);
}

Mask2D smooth_reference(const Mask2D& m, int r) { return close(open(m, r), r); }

}  // namespace tomoprint
