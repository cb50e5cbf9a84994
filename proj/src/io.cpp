#include "fibtrans/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <locale>
#include <sstream>

#include "fibtrans/errors.hpp"

namespace fibtrans {

namespace {

std::ostringstream classic_stream() {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    return os;
}

std::string short_real(double v) {
    auto os = classic_stream();
    os << std::setprecision(6) << v;
    return os.str();
}

std::string escape_xml(const std::string& s) {
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

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    auto os = classic_stream();
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return os.str();
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::logic_error("CsvTable: row width does not match header");
    rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path.string() + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw ConfigError("write to " + path.string() + " failed");
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string series_svg(const SvgAxes& axes, const std::vector<SvgSeries>& series) {
    constexpr double width = 640, height = 420, left = 70, right = 160, top = 40, bottom = 55;
    auto tx = [&](double v) { return axes.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return axes.log_y ? std::log10(v) : v; };
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((axes.log_x && s.x[i] <= 0) || (axes.log_y && s.y[i] <= 0)) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (x0 > x1) x0 = 0, x1 = 1;
    if (y0 > y1) y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return top + ph - (ty(v) - y0) / (y1 - y0) * ph; };

    auto os = classic_stream();
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(axes.title)
       << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
        const double gx = left + pw * i / 4.0, gy = top + ph - ph * i / 4.0;
        os << "<text x=\"" << gx << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">"
           << short_real(axes.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
           << short_real(axes.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
       << escape_xml(axes.x_label) << "</text>\n";
    os << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape_xml(axes.y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % std::size(palette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((axes.log_x && s.x[i] <= 0) || (axes.log_y && s.y[i] <= 0)) continue;
            os << short_real(px(s.x[i])) << ',' << short_real(py(s.y[i])) << ' ';
        }
        os << "\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(k);
        os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 32 << "\" y2=\""
           << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly << "\">" << escape_xml(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string contour_svg(const ComponentContour& c, const KoebeRadii& radii) {
    constexpr double size = 600, margin = 30;
    // Scale so the contour fills the frame; the outer circle is usually far larger and is clipped.
    const double span = std::max(c.circumscribed_radius, radii.r_inner) * 1.15;
    const double scale = (size / 2 - margin) / span;
    auto px = [&](double re) { return size / 2 + (re - c.center.real()) * scale; };
    auto py = [&](double im) { return size / 2 - (im - c.center.imag()) * scale; };
    auto os = classic_stream();
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<defs><clipPath id=\"frame\"><rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size
       << "\"/></clipPath></defs>\n";
    os << "<g clip-path=\"url(#frame)\">\n";
    os << "<circle cx=\"" << size / 2 << "\" cy=\"" << size / 2 << "\" r=\"" << short_real(radii.r_outer * scale)
       << "\" fill=\"none\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>\n";
    os << "<circle cx=\"" << size / 2 << "\" cy=\"" << size / 2 << "\" r=\"" << short_real(radii.r_inner * scale)
       << "\" fill=\"none\" stroke=\"#2ca02c\" stroke-dasharray=\"6 4\"/>\n";
    os << "<polygon fill=\"#1f77b4\" fill-opacity=\"0.15\" stroke=\"#1f77b4\" points=\"";
    for (const auto& z : c.polyline) os << short_real(px(z.real())) << ',' << short_real(py(z.imag())) << ' ';
    os << "\"/>\n";
    os << "<circle cx=\"" << size / 2 << "\" cy=\"" << size / 2 << "\" r=\"2.5\" fill=\"black\"/>\n</g>\n";
    os << "<text x=\"10\" y=\"18\">k=" << c.k << " lambda=" << short_real(c.lambda) << " delta=" << short_real(c.delta)
       << " E_k=" << short_real(c.center.real()) << "</text>\n";
    os << "<text x=\"10\" y=\"" << size - 10 << "\">inner r=" << short_real(radii.r_inner)
       << "  contour [" << short_real(c.inscribed_radius) << ", " << short_real(c.circumscribed_radius)
       << "]  outer r=" << short_real(radii.r_outer) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

}  // namespace fibtrans
