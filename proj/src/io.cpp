#include "tomoprint/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "tomoprint/error.hpp"

namespace tomoprint::io {

static_assert(std::endian::native == std::endian::little, "raw formats assume a little-endian host");

using nlohmann::json;

namespace {

// Shortest text that parses back to the same double.
std::string num(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string short_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_bytes(const fs::path& path, const void* data, std::size_t n) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    require(bool(f), ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    f.write(static_cast<const char*>(data), std::streamsize(n));
    require(bool(f), ErrorKind::Io, "short write to '" + path.string() + "'");
}

std::vector<char> read_bytes(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    require(bool(f), ErrorKind::Io, "cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

json read_json(const fs::path& path) {
    const std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::Ingestion, "'" + path.string() + "': " + e.what());
    }
}

json frame_json(const GridFrame& f) {
    return {{"dims", {f.dims.nx, f.dims.ny, f.dims.nz}},
            {"spacing_mm", f.spacing_mm},
            {"origin_mm", {f.origin_mm.x, f.origin_mm.y, f.origin_mm.z}}};
}

GridFrame frame_from(const json& j) {
    GridFrame f;
    f.dims = {j.at("dims")[0].get<int>(), j.at("dims")[1].get<int>(), j.at("dims")[2].get<int>()};
    f.spacing_mm = j.at("spacing_mm").get<double>();
    f.origin_mm = {j.at("origin_mm")[0].get<double>(), j.at("origin_mm")[1].get<double>(),
                   j.at("origin_mm")[2].get<double>()};
    require(f.dims.nx >= 0 && f.dims.ny >= 0 && f.dims.nz >= 0 && f.spacing_mm > 0, ErrorKind::Ingestion,
            "invalid grid frame in sidecar");
    return f;
}

template <class F>
auto with_sidecar(const fs::path& raw, F&& body) {
    const fs::path side = sidecar_path(raw);
    require(fs::exists(side), ErrorKind::Ingestion, "missing sidecar '" + side.string() + "'");
    const json j = read_json(side);
    try {
        return body(j);
    } catch (const json::exception& e) {
        fail(ErrorKind::Ingestion, "'" + side.string() + "': " + e.what());
    }
}

}  // namespace

fs::path sidecar_path(const fs::path& raw) { return fs::path(raw.string() + ".json"); }

void write_text(const fs::path& path, const std::string& text) { write_bytes(path, text.data(), text.size()); }

std::string read_text(const fs::path& path) {
    const auto b = read_bytes(path);
    return {b.begin(), b.end()};
}

void write_grid(const fs::path& raw, const VoxelGrid& grid) {
    write_bytes(raw, grid.values().data(), grid.values().size_bytes());
    json j = frame_json(grid.frame());
    j["kind"] = "voxel_grid";
    j["dtype"] = "float32le";
    j["units"] = "1/mm";
    write_text(sidecar_path(raw), j.dump(2) + "\n");
}

VoxelGrid read_grid(const fs::path& raw) {
    return with_sidecar(raw, [&](const json& j) {
        const GridFrame f = frame_from(j);
        const auto bytes = read_bytes(raw);
        require(bytes.size() == f.dims.count() * sizeof(float), ErrorKind::Ingestion,
                "'" + raw.string() + "' size does not match its sidecar dims");
        std::vector<float> v(f.dims.count());
        std::memcpy(v.data(), bytes.data(), bytes.size());
        return VoxelGrid(f, std::move(v));
    });
}

void write_sinogram(const fs::path& raw, const Sinogram& sino) {
    write_bytes(raw, sino.data().data(), sino.data().size_bytes());
    const auto& g = sino.geometry();
    json j{{"kind", "sinogram"},
           {"dtype", "float32le"},
           {"n_angles", g.n_angles},
           {"detector_bins", g.detector_bins},
           {"detector_pitch_mm", g.detector_pitch_mm},
           {"beam", "parallel"},
           {"i0", sino.i0()},
           {"slices", sino.n_slices()},
           {"clamped", sino.clamped_count()},
           {"source_frame", frame_json(sino.source_frame())}};
    write_text(sidecar_path(raw), j.dump(2) + "\n");
}

Sinogram read_sinogram(const fs::path& raw) {
    return with_sidecar(raw, [&](const json& j) {
        ScanGeometry g;
        g.n_angles = j.at("n_angles").get<int>();
        g.detector_bins = j.at("detector_bins").get<int>();
        g.detector_pitch_mm = j.at("detector_pitch_mm").get<double>();
        require(g.n_angles > 0 && g.detector_bins > 0 && g.detector_pitch_mm > 0, ErrorKind::Ingestion,
                "invalid sinogram geometry in sidecar");
        Sinogram s(g, j.at("slices").get<int>(), j.at("i0").get<double>());
        s.set_source_frame(frame_from(j.at("source_frame")));
        s.set_clamped_count(j.value("clamped", std::uint64_t(0)));
        const auto bytes = read_bytes(raw);
        require(bytes.size() == s.data().size_bytes(), ErrorKind::Ingestion,
                "'" + raw.string() + "' size does not match its sidecar");
        std::memcpy(s.data().data(), bytes.data(), bytes.size());
        return s;
    });
}

void write_labels(const fs::path& raw, const LabelVolume& labels) {
    write_bytes(raw, labels.labels().data(), labels.labels().size());
    json j = frame_json(labels.frame());
    j["kind"] = "label_volume";
    j["dtype"] = "uint8";
    j["labels"] = {{"background", 0}, {"material", 1}, {"void", 2}};
    write_text(sidecar_path(raw), j.dump(2) + "\n");
}

LabelVolume read_labels(const fs::path& raw) {
    return with_sidecar(raw, [&](const json& j) {
        LabelVolume l(frame_from(j));
        const auto bytes = read_bytes(raw);
        require(bytes.size() == l.labels().size(), ErrorKind::Ingestion,
                "'" + raw.string() + "' size does not match its sidecar dims");
        for (std::size_t i = 0; i < bytes.size(); ++i) {
            const auto b = static_cast<unsigned char>(bytes[i]);
            require(b <= 2, ErrorKind::Ingestion, "'" + raw.string() + "' holds an unknown label value");
            l.labels()[i] = Label(b);
        }
        return l;
    });
}

std::string format_phantom(const PhantomSpec& spec) {
    std::ostringstream os;
    os << "# tomoprint phantom: void <shape> <size_mm> <cx> <cy> <cz>\n";
    if (!spec.label.empty()) os << "label " << spec.label << "\n";
    os << "outer_dims_mm " << num(spec.outer_dims_mm.x) << " " << num(spec.outer_dims_mm.y) << " "
       << num(spec.outer_dims_mm.z) << "\n";
    os << "material_mu " << num(spec.material_mu) << "\n";
    for (const auto& v : spec.voids)
        os << "void " << (v.shape == VoidShape::cube ? "cube" : "sphere") << " " << num(v.size_mm) << " "
           << num(v.center_mm.x) << " " << num(v.center_mm.y) << " " << num(v.center_mm.z) << "\n";
    return os.str();
}

PhantomSpec parse_phantom(const std::string& text) {
    PhantomSpec spec;
    bool have_dims = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        auto bad = [&] { fail(ErrorKind::Ingestion, "phantom line " + std::to_string(lineno) + ": cannot parse '" + line + "'"); };
        if (key == "label") {
            std::getline(ls >> std::ws, spec.label);
        } else if (key == "outer_dims_mm") {
            if (!(ls >> spec.outer_dims_mm.x >> spec.outer_dims_mm.y >> spec.outer_dims_mm.z)) bad();
            have_dims = true;
        } else if (key == "material_mu") {
            if (!(ls >> spec.material_mu)) bad();
        } else if (key == "void") {
            std::string shape;
            VoidSpec v;
            if (!(ls >> shape >> v.size_mm >> v.center_mm.x >> v.center_mm.y >> v.center_mm.z)) bad();
            if (shape == "cube") v.shape = VoidShape::cube;
            else if (shape == "sphere") v.shape = VoidShape::sphere;
            else bad();
            spec.voids.push_back(v);
        } else {
            bad();
        }
    }
    require(have_dims, ErrorKind::Ingestion, "phantom text has no outer_dims_mm record");
    return spec;
}

void write_phantom(const fs::path& path, const PhantomSpec& spec) { write_text(path, format_phantom(spec)); }
PhantomSpec read_phantom(const fs::path& path) { return parse_phantom(read_text(path)); }

void write_profiles(const fs::path& path, const std::vector<PrinterProfile>& profiles) {
    json arr = json::array();
    for (const auto& p : profiles)
        arr.push_back({{"name", p.name},
                       {"amplitude_base_mm", p.amplitude_base_mm},
                       {"amplitude_per_um", p.amplitude_per_um},
                       {"rate_base_per_mm", p.rate_base_per_mm},
                       {"rate_per_mm_s", p.rate_per_mm_s},
                       {"pore_radius_mm", p.pore_radius_mm},
                       {"correlation_mm", p.correlation_mm},
                       {"raster_pitch_mm", p.raster_pitch_mm}});
    write_text(path, json{{"profiles", arr}}.dump(2) + "\n");
}

std::vector<PrinterProfile> read_profiles(const fs::path& path) {
    std::vector<PrinterProfile> out;
    try {
        const json j = json::parse(read_text(path));
        for (const auto& e : j.at("profiles")) {
            PrinterProfile p;
            p.name = e.at("name").get<std::string>();
            p.amplitude_base_mm = e.value("amplitude_base_mm", 0.0);
            p.amplitude_per_um = e.value("amplitude_per_um", 0.0);
            p.rate_base_per_mm = e.value("rate_base_per_mm", 0.0);
            p.rate_per_mm_s = e.value("rate_per_mm_s", 0.0);
            p.pore_radius_mm = e.value("pore_radius_mm", 0.0);
            p.correlation_mm = e.value("correlation_mm", 0.0);
            p.raster_pitch_mm = e.value("raster_pitch_mm", 0.4);
            validate(p);
            out.push_back(p);
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Config, "'" + path.string() + "': " + e.what());
    }
    return out;
}

void write_voids_csv(const fs::path& path, const std::vector<VoidDetection>& voids) {
    std::ostringstream os;
    os << "id,centroid_x_mm,centroid_y_mm,centroid_z_mm,volume_mm3,equivalent_size_mm,voxels,matched_truth\n";
    for (std::size_t i = 0; i < voids.size(); ++i) {
        const auto& v = voids[i];
        os << i << "," << short_num(v.centroid_mm.x) << "," << short_num(v.centroid_mm.y) << ","
           << short_num(v.centroid_mm.z) << "," << short_num(v.volume_mm3) << "," << short_num(v.equivalent_size_mm)
           << "," << v.voxel_count << "," << (v.matched_truth ? std::to_string(*v.matched_truth) : std::string())
           << "\n";
    }
    write_text(path, os.str());
}

void write_metrics_csv(const fs::path& path, const std::vector<MetricsReport>& reports) {
    std::ostringstream os;
    os << "sample,printer,setting,setting_index,plane,metric,value\n";
    for (const auto& r : reports) {
        const std::string head = r.sample_id + "," + r.printer_id + "," + r.setting_id + "," +
                                 std::to_string(r.setting_index) + ",";
        os << head << "XY,cusp_density," << num(r.cusp_density_xy) << "\n";
        os << head << "XZ,cusp_density," << num(r.cusp_density_xz) << "\n";
        os << head << "XY,roughness," << num(r.roughness_xy) << "\n";
        os << head << "XZ,roughness," << num(r.roughness_xz) << "\n";
        os << head << "-,porosity," << num(r.porosity_pct) << "\n";
        for (std::size_t b = 0; b < r.void_histogram.size() && b < r.void_histogram_edges_mm.size(); ++b)
            os << head << "-,void_count_ge_" << short_num(r.void_histogram_edges_mm[b]) << "mm,"
               << r.void_histogram[b] << "\n";
    }
    write_text(path, os.str());
}

std::vector<MetricsReport> read_metrics_csv(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::string line;
    std::getline(in, line);
    require(line.rfind("sample,printer,setting", 0) == 0, ErrorKind::Ingestion,
            "'" + path.string() + "' is not a metrics CSV");
    std::vector<MetricsReport> out;
    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> index;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        require(f.size() == 7, ErrorKind::Ingestion,
                "'" + path.string() + "' line " + std::to_string(lineno) + " needs 7 fields");
        const auto key = std::make_tuple(f[0], f[1], f[2]);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, out.size()).first;
            MetricsReport r;
            r.sample_id = f[0];
            r.printer_id = f[1];
            r.setting_id = f[2];
            r.setting_index = std::stoi(f[3]);
            out.push_back(r);
        }
        MetricsReport& r = out[it->second];
        double v = 0;
        try {
            v = std::stod(f[6]);
        } catch (const std::exception&) {
            fail(ErrorKind::Ingestion, "'" + path.string() + "' line " + std::to_string(lineno) + ": bad value");
        }
        const std::string& plane = f[4];
        const std::string& metric = f[5];
        if (metric == "cusp_density") (plane == "XY" ? r.cusp_density_xy : r.cusp_density_xz) = v;
        else if (metric == "roughness") (plane == "XY" ? r.roughness_xy : r.roughness_xz) = v;
        else if (metric == "porosity") r.porosity_pct = v;
        else if (metric.rfind("void_count_ge_", 0) == 0) {
            r.void_histogram_edges_mm.push_back(std::stod(metric.substr(14)));
            r.void_histogram.push_back(std::size_t(v));
        }
    }
    return out;
}

std::string format_rankings_csv(const std::vector<Ranking>& rankings) {
    std::vector<std::string> samples, printers;
    std::map<std::pair<std::string, std::string>, const Ranking*> cell;
    for (const auto& r : rankings) {
        if (std::find(samples.begin(), samples.end(), r.sample_id) == samples.end()) samples.push_back(r.sample_id);
        if (std::find(printers.begin(), printers.end(), r.printer_id) == printers.end()) printers.push_back(r.printer_id);
        cell[{r.printer_id, r.sample_id}] = &r;
    }
    std::ostringstream os;
    os << "printer";
    for (const auto& s : samples) os << "," << s << "_setting," << s << "_value";
    os << "\n";
    for (const auto& p : printers) {
        os << p;
        for (const auto& s : samples) {
            auto it = cell.find({p, s});
            if (it == cell.end()) os << ",,";
            else os << "," << it->second->setting_id << "," << short_num(it->second->value);
        }
        os << "\n";
    }
    return os.str();
}

void write_rankings_csv(const fs::path& path, const std::vector<Ranking>& rankings) {
    write_text(path, format_rankings_csv(rankings));
}

namespace {

void write_pgm(const fs::path& path, int w, int h, int bit_depth, const std::vector<std::uint32_t>& counts) {
    const int maxval = bit_depth == 8 ? 255 : 65535;
    std::string data = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n" + std::to_string(maxval) + "\n";
    for (std::uint32_t c : counts) {
        if (bit_depth == 8) {
            data.push_back(char(c));
        } else {
            data.push_back(char(c >> 8));
            data.push_back(char(c & 0xff));
        }
    }
    write_text(path, data);
}

struct Pgm {
    int w = 0, h = 0, maxval = 0;
    std::vector<std::uint32_t> counts;
};

Pgm read_pgm(const fs::path& path) {
    const auto bytes = read_bytes(path);
    std::size_t pos = 0;
    auto token = [&]() {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
        std::string t;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) t.push_back(bytes[pos++]);
        return t;
    };
    const std::string where = "'" + path.string() + "'";
    require(token() == "P5", ErrorKind::Ingestion, where + " is not a binary PGM");
    Pgm p;
    try {
        p.w = std::stoi(token());
        p.h = std::stoi(token());
        p.maxval = std::stoi(token());
    } catch (const std::exception&) {
        fail(ErrorKind::Ingestion, where + " has a malformed header");
    }
    ++pos;
    require(p.maxval == 255 || p.maxval == 65535, ErrorKind::Ingestion, where + " has an unsupported bit depth");
    const std::size_t bpp = p.maxval == 255 ? 1 : 2;
    require(bytes.size() - pos == std::size_t(p.w) * p.h * bpp, ErrorKind::Ingestion, where + " is truncated");
    p.counts.resize(std::size_t(p.w) * p.h);
    for (std::size_t i = 0; i < p.counts.size(); ++i) {
        const auto* b = reinterpret_cast<const unsigned char*>(bytes.data() + pos + i * bpp);
        p.counts[i] = bpp == 1 ? b[0] : (std::uint32_t(b[0]) << 8 | b[1]);
    }
    return p;
}

std::string slice_name(int z, int bit_depth) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "slice_%05d.%s", z, bit_depth == 32 ? "raw" : "pgm");
    return buf;
}

}  // namespace

StackInfo export_stack(const VoxelGrid& grid, const fs::path& dir, int bit_depth) {
    require(bit_depth == 8 || bit_depth == 16 || bit_depth == 32, ErrorKind::Config, "bit depth must be 8, 16 or 32");
    fs::create_directories(dir);
    const Dims d = grid.dims();
    StackInfo info;
    info.bit_depth = bit_depth;
    info.spacing_mm = grid.spacing_mm();
    info.origin_mm = grid.frame().origin_mm;
    if (bit_depth != 32) {
        const double maxcount = bit_depth == 8 ? 255.0 : 65535.0;
        float mx = 0;
        for (float v : grid.values()) mx = std::max(mx, v);
        info.scale = mx > 0 ? double(mx) / maxcount : 1.0;
    }
    for (int z = 0; z < d.nz; ++z) {
        const auto s = grid.slice(z);
        const fs::path p = dir / slice_name(z, bit_depth);
        if (bit_depth == 32) {
            write_bytes(p, s.data(), s.size_bytes());
            continue;
        }
        const double maxcount = bit_depth == 8 ? 255.0 : 65535.0;
        std::vector<std::uint32_t> counts(s.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            counts[i] = std::uint32_t(std::clamp(std::round((double(s[i]) - info.offset) / info.scale), 0.0, maxcount));
        write_pgm(p, d.nx, d.ny, bit_depth, counts);
    }
    json j{{"kind", "slice_stack"},
           {"bit_depth", bit_depth},
           {"dims", {d.nx, d.ny, d.nz}},
           {"spacing_mm", info.spacing_mm},
           {"origin_mm", {info.origin_mm.x, info.origin_mm.y, info.origin_mm.z}},
           {"scale_per_mm", info.scale},
           {"offset_per_mm", info.offset}};
    write_text(dir / "stack.json", j.dump(2) + "\n");
    return info;
}

VoxelGrid ingest_stack(const fs::path& dir, const fs::path& sidecar) {
    require(fs::exists(sidecar), ErrorKind::Ingestion, "missing stack sidecar '" + sidecar.string() + "'");
    const json j = read_json(sidecar);
    StackInfo info;
    try {
        info.bit_depth = j.at("bit_depth").get<int>();
        info.spacing_mm = j.at("spacing_mm").get<double>();
        if (j.contains("origin_mm"))
            info.origin_mm = {j["origin_mm"][0].get<double>(), j["origin_mm"][1].get<double>(),
                              j["origin_mm"][2].get<double>()};
        info.scale = j.value("scale_per_mm", 1.0);
        info.offset = j.value("offset_per_mm", 0.0);
    } catch (const json::exception& e) {
        fail(ErrorKind::Ingestion, "'" + sidecar.string() + "': " + e.what());
    }
    require(info.bit_depth == 8 || info.bit_depth == 16 || info.bit_depth == 32, ErrorKind::Ingestion,
            "'" + sidecar.string() + "': unsupported bit depth " + std::to_string(info.bit_depth));
    require(info.spacing_mm > 0, ErrorKind::Ingestion, "'" + sidecar.string() + "': spacing must be positive");

    const std::string ext = info.bit_depth == 32 ? ".raw" : ".pgm";
    std::vector<fs::path> files;
    require(fs::is_directory(dir), ErrorKind::Ingestion, "'" + dir.string() + "' is not a directory");
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ext) files.push_back(e.path());
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });
    require(!files.empty(), ErrorKind::Ingestion, "no " + ext + " slices in '" + dir.string() + "'");

    int nx = 0, ny = 0;
    if (info.bit_depth == 32) {
        require(j.contains("dims"), ErrorKind::Ingestion, "raw float stacks need dims in the sidecar");
        nx = j["dims"][0].get<int>();
        ny = j["dims"][1].get<int>();
    }
    std::vector<float> values;
    for (const auto& f : files) {
        if (info.bit_depth == 32) {
            const auto bytes = read_bytes(f);
            require(bytes.size() == std::size_t(nx) * ny * sizeof(float), ErrorKind::Ingestion,
                    "slice '" + f.string() + "' does not match the stack dims");
            const std::size_t at = values.size();
            values.resize(at + std::size_t(nx) * ny);
            std::memcpy(values.data() + at, bytes.data(), bytes.size());
            continue;
        }
        const Pgm p = read_pgm(f);
        if (nx == 0) nx = p.w, ny = p.h;
        require(p.w == nx && p.h == ny, ErrorKind::Ingestion,
                "slice '" + f.string() + "' is " + std::to_string(p.w) + "x" + std::to_string(p.h) + ", expected " +
                    std::to_string(nx) + "x" + std::to_string(ny));
        require(p.maxval == (info.bit_depth == 8 ? 255 : 65535), ErrorKind::Ingestion,
                "slice '" + f.string() + "' bit depth differs from the sidecar");
        for (auto c : p.counts) values.push_back(float(info.offset + double(c) * info.scale));
    }
    GridFrame frame{{nx, ny, int(files.size())}, info.spacing_mm, info.origin_mm};
    for (float& v : values) v = std::max(v, 0.0f);
    return VoxelGrid(frame, std::move(values));
}

std::string sha256_bytes(const std::string& bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    require(ctx && EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) == 1 &&
                EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) == 1 &&
                EVP_DigestFinal_ex(ctx.get(), md, &len) == 1,
            ErrorKind::Io, "SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

std::string sha256_file(const fs::path& path) { return sha256_bytes(read_text(path)); }

}  // namespace tomoprint::io
