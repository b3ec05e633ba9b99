#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "tomoprint/error.hpp"
#include "tomoprint/volume.hpp"

namespace testutil {

using namespace tomoprint;

inline GridFrame cube_frame(int n, double spacing = 0.1) { return GridFrame{{n, n, n}, spacing, {}}; }

/// Material box [x0,x1) x [y0,y1) x [z0,z1) in an otherwise empty volume.
inline LabelVolume box_labels(GridFrame f, int x0, int x1, int y0, int y1, int z0, int z1) {
    LabelVolume l(f);
    for (int z = z0; z < z1; ++z)
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) l.at(x, y, z) = Label::material;
    return l;
}

/// Kind of the library error `f` raises, or nothing when it returns normally.
inline std::optional<ErrorKind> kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng{std::random_device{}()};
        path = std::filesystem::temp_directory_path() / ("tomoprint_" + tag + "_" + std::to_string(rng()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

}  // namespace testutil
