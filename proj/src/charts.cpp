#include "tomoprint/charts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tomoprint/error.hpp"
#include "tomoprint/io.hpp"

namespace tomoprint::charts {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// Round the axis top up to 1, 2 or 5 times a power of ten.
double nice_ceiling(double v) {
    if (v <= 0) return 1;
    const double p = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * p >= v) return m * p;
    return 10 * p;
}

const char* palette[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377", "#bbbbbb"};

}  // namespace

std::string bar_chart_svg(const std::string& title, const std::string& y_label, const std::vector<Bar>& bars) {
    require(!bars.empty(), ErrorKind::Domain, "chart needs at least one bar");
    const double left = 70, right = 20, top = 40, bottom = 110;
    const double bar_w = 28, gap = 10;
    const double plot_w = bars.size() * (bar_w + gap) + gap;
    const double plot_h = 260;
    const double width = left + plot_w + right, height = top + plot_h + bottom;
    double vmax = 0;
    for (const auto& b : bars) vmax = std::max(vmax, b.value);
    const double ymax = nice_ceiling(vmax);

    std::vector<std::string> groups;
    for (const auto& b : bars)
        if (std::find(groups.begin(), groups.end(), b.group) == groups.end()) groups.push_back(b.group);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
       << "</text>\n";
    for (int t = 0; t <= 5; ++t) {
        const double v = ymax * t / 5, y = top + plot_h - plot_h * t / 5;
        os << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w << "\" y2=\"" << y
           << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
    }
    os << "<text transform=\"translate(16," << top + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(y_label) << "</text>\n";
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const auto& b = bars[i];
        const double h = std::max(0.0, b.value) / ymax * plot_h;
        const double x = left + gap + i * (bar_w + gap);
        const auto g = std::find(groups.begin(), groups.end(), b.group) - groups.begin();
        os << "<rect x=\"" << x << "\" y=\"" << top + plot_h - h << "\" width=\"" << bar_w << "\" height=\"" << h
           << "\" fill=\"" << palette[g % 7] << "\"><title>" << escape(b.label) << ": " << fmt(b.value)
           << "</title></rect>\n";
        const double lx = x + bar_w / 2, ly = top + plot_h + 8;
        os << "<text transform=\"translate(" << lx << "," << ly << ") rotate(60)\">" << escape(b.label)
           << "</text>\n";
    }
    os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
       << top + plot_h << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
       << "\" stroke=\"black\"/>\n";
    os << "</svg>\n";
    return os.str();
}

void write_bar_chart(const std::filesystem::path& path, const std::string& title, const std::string& y_label,
                     const std::vector<Bar>& bars) {
    io::write_text(path, bar_chart_svg(title, y_label, bars));
}

}  // namespace tomoprint::charts
