#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fibtrans/complex_components.hpp"

namespace fibtrans {

/// Shortest-safe text form of a double: 17 significant digits, '.' decimal, round-trip exact.
std::string format_real(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    template <typename... Cells>
    void row(const Cells&... cells) {
        std::vector<std::string> r;
        r.reserve(sizeof...(cells));
        (r.push_back(cell(cells)), ...);
        add_row(std::move(r));
    }
    void add_row(std::vector<std::string> cells);

    std::size_t size() const { return rows_.size(); }
    std::string str() const;

    static std::string cell(double v) { return format_real(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(long long v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, std::string_view text);

/// Pretty-printed with sorted keys, so identical data gives identical bytes.
std::string json_text(const nlohmann::json& j);

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgAxes {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
};

/// Self-contained line plot.
std::string series_svg(const SvgAxes& axes, const std::vector<SvgSeries>& series);

/// Component boundary with the inner and outer distortion circles around the center.
std::string contour_svg(const ComponentContour& contour, const KoebeRadii& radii);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace fibtrans
