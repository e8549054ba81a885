#include "simboot/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "simboot/csv.hpp"
#include "simboot/error.hpp"

namespace simboot {

namespace {

struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<Entry> parse_lines(const std::string& text) {
    std::vector<Entry> entries;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError("", "expected key=value", number);
        Entry e{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), number};
        if (e.key.empty()) throw ConfigError("", "missing key before '='", number);
        entries.push_back(std::move(e));
    }
    return entries;
}

double parse_double(const Entry& e, std::string_view text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(v))
        throw ConfigError(e.key, "'" + t + "' is not a finite number", e.line);
    return v;
}

std::uint64_t parse_unsigned(const Entry& e) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (e.value.empty() || res.ec != std::errc{} || res.ptr != e.value.data() + e.value.size())
        throw ConfigError(e.key, "'" + e.value + "' is not a nonnegative integer", e.line);
    return v;
}

std::size_t parse_count(const Entry& e) {
    const auto v = parse_unsigned(e);
    if (v == 0) throw ConfigError(e.key, "must be positive", e.line);
    return static_cast<std::size_t>(v);
}

std::vector<double> parse_list(const Entry& e) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(e.value);
    while (std::getline(in, item, ',')) out.push_back(parse_double(e, item));
    if (out.empty()) throw ConfigError(e.key, "empty list", e.line);
    return out;
}

void apply_preset(RunConfig& c, const std::string& name, std::size_t line) {
    if (name == "paper") {
        c.n = 400;
        c.k = 71;
        c.b = 10000;
        c.m.reset();
    } else if (name == "desk") {
        c.n = 400;
        c.k = 71;
        c.b = 2000;
        c.m = 500;
    } else {
        throw ConfigError("preset", "unknown preset '" + name + "' (expected paper or desk)", line);
    }
    c.preset = name;
}

void apply(RunConfig& c, const Entry& e) {
    const auto& k = e.key;
    if (k == "family") {
        if (e.value == "lc") c.family = Family::LocalConstant;
        else if (e.value == "lq") c.family = Family::LocalQuadratic;
        else if (e.value == "qt") c.family = Family::QuantileLocation;
        else throw ConfigError(k, "unknown family '" + e.value + "' (expected lc, lq or qt)", e.line);
    } else if (k == "n") {
        c.n = parse_count(e);
    } else if (k == "k") {
        c.k = parse_count(e);
    } else if (k == "centers") {
        c.centers = parse_list(e);
    } else if (k == "taus") {
        c.taus = parse_list(e);
    } else if (k == "h") {
        c.h = parse_double(e, e.value);
    } else if (k == "b") {
        c.b = parse_count(e);
    } else if (k == "m") {
        c.m = parse_count(e);
    } else if (k == "alpha") {
        c.alphas = parse_list(e);
    } else if (k == "scheme") {
        if (e.value == "gauss") c.scheme = WeightScheme::Gaussian;
        else if (e.value == "exp") c.scheme = WeightScheme::Exponential;
        else if (e.value == "bern") c.scheme = WeightScheme::Bernoulli;
        else throw ConfigError(k, "unknown scheme '" + e.value + "' (expected gauss, exp or bern)", e.line);
    } else if (k == "seed") {
        c.seed = parse_unsigned(e);
    } else if (k == "threads") {
        c.threads = static_cast<unsigned>(parse_unsigned(e));
    } else if (k == "out") {
        if (e.value.empty()) throw ConfigError(k, "empty output directory", e.line);
        c.out = e.value;
    } else if (k == "preset") {
        // resolved before the other keys
    } else if (k == "noise_sd") {
        c.noise_sd = parse_double(e, e.value);
    } else if (k == "dgp") {
        c.dgp = e.value;
    } else if (k == "data") {
        c.data = e.value;
    } else if (k == "reps") {
        c.reps = parse_count(e);
    } else if (k == "band_alpha") {
        c.band_alpha = parse_double(e, e.value);
    } else {
        throw ConfigError(k, "unknown key", e.line);
    }
}

RunConfig build(const std::vector<Entry>& file, const ConfigOverrides& overrides) {
    std::vector<Entry> all = file;
    for (const auto& [key, value] : overrides) all.push_back({key, value, 0});

    RunConfig c;
    std::string preset = "paper";
    std::size_t preset_line = 0;
    for (const auto& e : all)
        if (e.key == "preset") {
            preset = e.value;
            preset_line = e.line;
        }
    apply_preset(c, preset, preset_line);
    for (const auto& e : all) apply(c, e);
    try {
        validate(c);
    } catch (const ConfigError& error) {
        // point at the entry that set the offending key last
        for (auto it = all.rbegin(); it != all.rend(); ++it)
            if (it->key == error.key() && it->line > 0) throw ConfigError(error.key(), error.message(), it->line);
        throw;
    }
    return c;
}

std::string join(const std::vector<double>& v) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
    return out.str();
}

std::string number17(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

void validate(const RunConfig& c) {
    if (c.n < 2) throw ConfigError("n", "the synthetic design needs n >= 2");
    if (!(c.h > 0.0)) throw ConfigError("h", "bandwidth must be positive");
    if (!(c.noise_sd >= 0.0)) throw ConfigError("noise_sd", "noise standard deviation must be nonnegative");
    if (c.alphas.empty()) throw ConfigError("alpha", "at least one level is required");
    for (double a : c.alphas)
        if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha", "levels must lie in (0, 1)");
    if (!(c.band_alpha > 0.0 && c.band_alpha < 1.0))
        throw ConfigError("band_alpha", "level must lie in (0, 1)");
    if (!c.centers.empty()) {
        if (c.centers.size() != c.k) throw ConfigError("centers", "count differs from k");
        for (std::size_t j = 1; j < c.centers.size(); ++j)
            if (!(c.centers[j] > c.centers[j - 1]))
                throw ConfigError("centers", "centers must be strictly increasing");
    }
    if (!c.taus.empty()) {
        if (c.taus.size() != c.k) throw ConfigError("taus", "count differs from k");
        for (double t : c.taus)
            if (!(t > 0.0 && t < 1.0)) throw ConfigError("taus", "quantile indices must lie in (0, 1)");
    }
    if (c.dgp != "bumps" && c.dgp != "flat" && c.dgp.rfind("table:", 0) != 0)
        throw ConfigError("dgp", "expected bumps, flat or table:PATH");
    if (c.family == Family::QuantileLocation) {
        if (!is_nonnegative(c.scheme))
            throw ConfigError("scheme", "the quantile family needs exp or bern multipliers");
        if (c.dgp != "flat") throw ConfigError("dgp", "the quantile family supports dgp=flat only");
    }
}

std::size_t RunConfig::datasets_for(Command command) const {
    if (m) return *m;
    return command == Command::Coverage ? 5000 : 10000;
}

unsigned RunConfig::worker_threads() const {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

DgpSpec RunConfig::dgp_spec() const {
    DgpSpec spec;
    spec.n = n;
    spec.noise_sd = noise_sd;
    if (dgp == "flat") {
        spec.mean = FlatMean{5.0};
    } else if (dgp.rfind("table:", 0) == 0) {
        TableMean table;
        for (const auto& [x, f] : read_two_columns(dgp.substr(6))) {
            table.xs.push_back(x);
            table.fs.push_back(f);
        }
        spec.mean = std::move(table);
    }
    try {
        spec.validate();
    } catch (const Error& e) {
        throw ConfigError("dgp", e.what());
    }
    return spec;
}

ModelGrid RunConfig::grid() const {
    if (family == Family::QuantileLocation) {
        auto g = ModelGrid::quantiles(k);
        if (!taus.empty()) g.taus = taus;
        return g;
    }
    auto g = ModelGrid::regression(family, k, h);
    if (!centers.empty()) g.centers = centers;
    return g;
}

RunConfig parse_config_text(const std::string& text, const ConfigOverrides& overrides) {
    return build(parse_lines(text), overrides);
}

RunConfig load_config(const std::optional<std::filesystem::path>& file,
                      const ConfigOverrides& overrides) {
    if (!file) return build({}, overrides);
    std::ifstream in(*file);
    if (!in) throw ConfigError("config", "cannot open " + file->string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), overrides);
}

std::string format_config(const RunConfig& c) {
    std::ostringstream out;
    out << "preset = " << c.preset << '\n';
    out << "family = " << to_string(c.family) << '\n';
    out << "n = " << c.n << '\n';
    out << "k = " << c.k << '\n';
    if (!c.centers.empty()) out << "centers = " << join(c.centers) << '\n';
    if (!c.taus.empty()) out << "taus = " << join(c.taus) << '\n';
    out << "h = " << number17(c.h) << '\n';
    out << "b = " << c.b << '\n';
    if (c.m) out << "m = " << *c.m << '\n';
    out << "alpha = " << join(c.alphas) << '\n';
    out << "scheme = " << to_string(c.scheme) << '\n';
    out << "seed = " << c.seed << '\n';
    out << "threads = " << c.threads << '\n';
    out << "out = " << c.out << '\n';
    out << "noise_sd = " << number17(c.noise_sd) << '\n';
    out << "dgp = " << c.dgp << '\n';
    if (!c.data.empty()) out << "data = " << c.data << '\n';
    out << "reps = " << c.reps << '\n';
    out << "band_alpha = " << number17(c.band_alpha) << '\n';
    return out.str();
}

}  // namespace simboot
