#pragma once

#include <cstdint>
#include <vector>

namespace tomoprint {

/// Binary 2D mask, row-major, 1 = set.
struct Mask2D {
    int width = 0, height = 0;
    std::vector<std::uint8_t> bits;

    Mask2D() = default;
    Mask2D(int w, int h) : width(w), height(h), bits(std::size_t(w) * h, 0) {}
    std::uint8_t& at(int x, int y) { return bits[std::size_t(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return bits[std::size_t(y) * width + x]; }
    friend bool operator==(const Mask2D&, const Mask2D&) = default;
};

// Square (2r+1)^2 structuring element; pixels outside the mask are unset.
Mask2D erode(const Mask2D& m, int r);
Mask2D dilate(const Mask2D& m, int r);
Mask2D open(const Mask2D& m, int r);
/// Computed on a canvas padded by r so shapes touching the edge close as they
/// would in the unbounded plane.
Mask2D close(const Mask2D& m, int r);

/// close(open(m, r), r).
Mask2D smooth_reference(const Mask2D& m, int r);

}  // namespace tomoprint
