#include "fibtrans/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "fibtrans/errors.hpp"
#include "fibtrans/io.hpp"
#include "fibtrans/quantum_dynamics.hpp"

namespace fibtrans {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const ConfigEntry& e, const std::string& key, const std::string& what) {
    throw ConfigError(e.origin + ": " + key + ": " + what + " (got '" + e.value + "')");
}

double to_real(const ConfigEntry& e, const std::string& key) {
    std::istringstream is(e.value);
    is.imbue(std::locale::classic());
    double v = 0;
    if (!(is >> v) || !is.eof() || !std::isfinite(v)) fail(e, key, "expected a finite real number");
    return v;
}

long long to_integer(const ConfigEntry& e, const std::string& key) {
    long long v = 0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(e, key, "expected an integer");
    return v;
}

template <typename T>
T in_range(const ConfigEntry& e, const std::string& key, T v, T lo, T hi) {
    if (v < lo || v > hi) {
        std::ostringstream msg;
        msg << "out of range [" << lo << ", " << hi << "]";
        fail(e, key, msg.str());
    }
    return v;
}

const ConfigEntry& single(const std::vector<ConfigEntry>& list, const std::string& key) {
    if (list.size() > 1) fail(list[1], key, "given more than once");
    return list.front();
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "command", "lambda", "omega", "omega_samples", "seed", "k", "delta", "delta_rule", "L", "T", "T_min",
        "T_max", "T_count", "p", "N", "n", "energy", "eta", "lambda_small", "epsilon", "n_max", "zeros",
        "window", "precision", "route", "out", "jobs"};
    return keys;
}

double RunConfig::delta_for(double lambda) const {
    return delta_rule == DeltaRule::Absolute ? delta : delta * lambda * lambda;
}

std::vector<double> RunConfig::omega_list() const {
    if (!omegas.empty()) return omegas;
    if (omega_samples <= 0) return {0.0};
    // mt19937_64 output is fixed by the standard; the mapping to [0,1) is done here by hand so
    // the samples do not depend on the library's distribution implementation.
    std::mt19937_64 rng(seed);
    std::vector<double> out;
    for (int i = 0; i < omega_samples; ++i) out.push_back(static_cast<double>(rng() >> 11) * 0x1.0p-53);
    return out;
}

std::vector<double> RunConfig::T_grid() const {
    if (!T_values.empty()) return T_values;
    return geometric_grid(T_min, T_max, T_count);
}

std::string RunConfig::to_text() const {
    std::ostringstream os;
    auto put = [&](const std::string& key, const std::string& value) { os << key << " = " << value << "\n"; };
    if (!command.empty()) put("command", command);
    for (double v : lambdas) put("lambda", format_real(v));
    for (double v : omegas) put("omega", format_real(v));
    put("omega_samples", std::to_string(omega_samples));
    put("seed", std::to_string(seed));
    put("k", std::to_string(k_min) + ".." + std::to_string(k_max));
    put("delta", format_real(delta));
    put("delta_rule", delta_rule == DeltaRule::Absolute ? "absolute" : "lambda2");
    put("L", std::to_string(L));
    for (double v : T_values) put("T", format_real(v));
    put("T_min", format_real(T_min));
    put("T_max", format_real(T_max));
    put("T_count", std::to_string(T_count));
    for (double v : p_values) put("p", format_real(v));
    for (long v : N_values) put("N", std::to_string(v));
    for (long v : sites) put("n", std::to_string(v));
    for (double v : energies) put("energy", format_real(v));
    put("eta", format_real(eta));
    put("lambda_small", format_real(lambda_small));
    put("epsilon", format_real(epsilon));
    put("n_max", std::to_string(n_max));
    put("zeros", std::to_string(zero_count));
    put("window", format_real(window_fraction));
    put("precision", precision == Precision::Double ? "double" : "extended");
    put("route", route);
    put("out", output_dir);
    put("jobs", std::to_string(jobs));
    return os.str();
}

ConfigEntries parse_entries(std::string_view text, std::string_view source) {
    ConfigEntries out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string content = trim(line);
        if (content.empty()) continue;
        const std::string origin = std::string(source) + ":" + std::to_string(line_no);
        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ConfigError(origin + ": expected 'key = value'");
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        const auto& keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(origin + ": unknown key '" + key + "'");
        if (value.empty()) throw ConfigError(origin + ": " + key + ": empty value");
        out[key].push_back({value, origin});
    }
    return out;
}

ConfigEntries overlay(ConfigEntries base, const ConfigEntries& over) {
    for (const auto& [key, list] : over) {
        if (!list.empty()) base[key] = list;
    }
    return base;
}

RunConfig build_config(const ConfigEntries& entries) {
    RunConfig c;
    for (const auto& [key, list] : entries) {
        if (list.empty()) continue;
        if (key == "command") {
            c.command = single(list, key).value;
        } else if (key == "lambda") {
            for (const auto& e : list) c.lambdas.push_back(in_range(e, key, to_real(e, key), 0.0, 100.0));
        } else if (key == "omega") {
            for (const auto& e : list) c.omegas.push_back(in_range(e, key, to_real(e, key), 0.0, 1.0));
        } else if (key == "omega_samples") {
            const auto& e = single(list, key);
            c.omega_samples = static_cast<int>(in_range<long long>(e, key, to_integer(e, key), 0, 100000));
        } else if (key == "seed") {
            const auto& e = single(list, key);
            c.seed = static_cast<std::uint64_t>(in_range<long long>(e, key, to_integer(e, key), 0, INT64_MAX));
        } else if (key == "k") {
            const auto& e = single(list, key);
            const auto dots = e.value.find("..");
            ConfigEntry lo{e.value.substr(0, dots), e.origin};
            ConfigEntry hi{dots == std::string::npos ? e.value : e.value.substr(dots + 2), e.origin};
            c.k_min = static_cast<int>(in_range<long long>(e, key, to_integer(lo, key), 1, 20));
            c.k_max = static_cast<int>(in_range<long long>(e, key, to_integer(hi, key), 1, 20));
            if (c.k_max < c.k_min) fail(e, key, "empty range");
        } else if (key == "delta") {
            const auto& e = single(list, key);
            c.delta = in_range(e, key, to_real(e, key), 0.0, 1e6);
        } else if (key == "delta_rule") {
            const auto& e = single(list, key);
            if (e.value == "absolute") c.delta_rule = DeltaRule::Absolute;
            else if (e.value == "lambda2") c.delta_rule = DeltaRule::LambdaSquared;
            else fail(e, key, "expected 'absolute' or 'lambda2'");
        } else if (key == "L") {
            const auto& e = single(list, key);
            c.L = static_cast<long>(in_range<long long>(e, key, to_integer(e, key), 1, 4000));
        } else if (key == "T") {
            for (const auto& e : list) c.T_values.push_back(in_range(e, key, to_real(e, key), 1e-6, 1e6));
        } else if (key == "T_min") {
            const auto& e = single(list, key);
            c.T_min = in_range(e, key, to_real(e, key), 1e-6, 1e6);
        } else if (key == "T_max") {
            const auto& e = single(list, key);
            c.T_max = in_range(e, key, to_real(e, key), 1e-6, 1e6);
        } else if (key == "T_count") {
            const auto& e = single(list, key);
            c.T_count = static_cast<int>(in_range<long long>(e, key, to_integer(e, key), 2, 1000));
        } else if (key == "p") {
            for (const auto& e : list) c.p_values.push_back(in_range(e, key, to_real(e, key), 1e-6, 100.0));
        } else if (key == "N") {
            for (const auto& e : list) c.N_values.push_back(static_cast<long>(in_range<long long>(e, key, to_integer(e, key), 0, 4000)));
        } else if (key == "n") {
            for (const auto& e : list) c.sites.push_back(static_cast<long>(in_range<long long>(e, key, to_integer(e, key), -4000, 4000)));
        } else if (key == "energy") {
            for (const auto& e : list) c.energies.push_back(in_range(e, key, to_real(e, key), -1e3, 1e3));
        } else if (key == "eta") {
            const auto& e = single(list, key);
            c.eta = in_range(e, key, to_real(e, key), 1e-9, 10.0);
        } else if (key == "lambda_small") {
            const auto& e = single(list, key);
            c.lambda_small = in_range(e, key, to_real(e, key), 1e-9, 100.0);
        } else if (key == "epsilon") {
            const auto& e = single(list, key);
            c.epsilon = in_range(e, key, to_real(e, key), 0.0, 10.0);
        } else if (key == "n_max") {
            const auto& e = single(list, key);
            c.n_max = static_cast<long>(in_range<long long>(e, key, to_integer(e, key), 10, 10000000));
        } else if (key == "zeros") {
            const auto& e = single(list, key);
            c.zero_count = static_cast<int>(in_range<long long>(e, key, to_integer(e, key), 1, 100000));
        } else if (key == "window") {
            const auto& e = single(list, key);
            c.window_fraction = in_range(e, key, to_real(e, key), 1e-6, 1.0);
        } else if (key == "precision") {
            const auto& e = single(list, key);
            if (e.value == "double") c.precision = Precision::Double;
            else if (e.value == "extended") c.precision = Precision::Extended;
            else fail(e, key, "expected 'double' or 'extended'");
        } else if (key == "route") {
            const auto& e = single(list, key);
            if (e.value != "time" && e.value != "resolvent" && e.value != "both") {
                fail(e, key, "expected 'time', 'resolvent' or 'both'");
            }
            c.route = e.value;
        } else if (key == "out") {
            c.output_dir = single(list, key).value;
        } else if (key == "jobs") {
            const auto& e = single(list, key);
            c.jobs = static_cast<int>(in_range<long long>(e, key, to_integer(e, key), 1, 256));
        } else {
            throw ConfigError(list.front().origin + ": unknown key '" + key + "'");
        }
    }
    if (c.T_values.empty() && !(c.T_max > c.T_min)) {
        const auto it = entries.find("T_max");
        throw ConfigError((it != entries.end() ? it->second.front().origin : std::string("config")) +
                          ": T_max: must exceed T_min");
    }
    return c;
}

RunConfig parse_config(std::string_view text, std::string_view source) {
    return build_config(parse_entries(text, source));
}

}  // namespace fibtrans
