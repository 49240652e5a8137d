#include "hjstab/config.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "hjstab/error.hpp"

namespace hjstab {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Location {
    std::string_view source;
    int line = 0;
    std::string key;

    [[noreturn]] void fail(std::string_view what) const {
        throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: field '{}': {}", source, line, key, what));
    }
};

double parse_double(const Location& at, std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) at.fail(fmt::format("'{}' is not a number", text));
    if (!std::isfinite(v)) at.fail("value must be finite");
    return v;
}

long long parse_integer(const Location& at, std::string_view text) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) at.fail(fmt::format("'{}' is not an integer", text));
    return v;
}

int parse_positive_int(const Location& at, std::string_view text) {
    const long long v = parse_integer(at, text);
    if (v <= 0 || v > 1'000'000'000) at.fail("must be a positive integer");
    return static_cast<int>(v);
}

double parse_positive(const Location& at, std::string_view text) {
    const double v = parse_double(at, text);
    if (!(v > 0.0)) at.fail("must be positive");
    return v;
}

bool parse_bool(const Location& at, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    at.fail(fmt::format("'{}' is not a boolean", text));
}

struct SeriesBuilder {
    std::optional<double> a0;
    std::map<int, double> cos, sin;
    int first_line = 0;

    FourierSeries build(const Location& at, double fallback_a0) const {
        int modes = 0;
        for (const auto& [k, v] : cos) modes = std::max(modes, k);
        for (const auto& [k, v] : sin) modes = std::max(modes, k);
        std::vector<double> c(static_cast<std::size_t>(modes), 0.0), s(static_cast<std::size_t>(modes), 0.0);
        for (const auto& [k, v] : cos) c[static_cast<std::size_t>(k - 1)] = v;
        for (const auto& [k, v] : sin) s[static_cast<std::size_t>(k - 1)] = v;
        try {
            return FourierSeries(a0.value_or(fallback_a0), std::move(c), std::move(s));
        } catch (const Error& e) {
            at.fail(e.what());
        }
    }
};

// Handles "<name>.a0", "<name>.cos.<k>", "<name>.sin.<k>". Returns false when the
// key does not belong to a Fourier block.
bool parse_series_key(const Location& at, std::string_view value, std::map<std::string, SeriesBuilder>& blocks) {
    const std::string_view key = at.key;
    const auto dot = key.find('.');
    if (dot == std::string_view::npos) return false;
    const std::string name(key.substr(0, dot));
    if (name != "lambda" && name != "V" && name != "phi") return false;
    SeriesBuilder& b = blocks[name];
    if (b.first_line == 0) b.first_line = at.line;
    const std::string_view rest = key.substr(dot + 1);
    if (rest == "a0") {
        b.a0 = parse_double(at, value);
        return true;
    }
    const auto dot2 = rest.find('.');
    const std::string_view family = rest.substr(0, dot2);
    if (dot2 == std::string_view::npos || (family != "cos" && family != "sin")) {
        at.fail("expected <name>.a0, <name>.cos.<k> or <name>.sin.<k>");
    }
    const long long k = parse_integer(at, rest.substr(dot2 + 1));
    if (k < 1 || k > static_cast<long long>(FourierSeries::kMaxModes)) {
        at.fail(fmt::format("mode index must be in 1..{}", FourierSeries::kMaxModes));
    }
    auto& target = family == "cos" ? b.cos : b.sin;
    if (target.contains(static_cast<int>(k))) at.fail("duplicate coefficient");
    target[static_cast<int>(k)] = parse_double(at, value);
    return true;
}

std::vector<double> parse_list(const Location& at, std::string_view value) {
    std::vector<double> out;
    while (!value.empty()) {
        const auto comma = value.find(',');
        out.push_back(parse_double(at, trim(value.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        value = value.substr(comma + 1);
    }
    if (out.empty()) at.fail("empty list");
    return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, std::string_view source) {
    ExperimentConfig cfg;
    std::map<std::string, SeriesBuilder> blocks;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        Location at{source, line_no, std::string(trim(line.substr(0, eq)))};
        if (eq == std::string_view::npos) at.fail("expected key = value");
        const std::string_view value = trim(line.substr(eq + 1));
        if (at.key.empty()) at.fail("empty key");
        if (value.empty()) at.fail("empty value");

        if (parse_series_key(at, value, blocks)) continue;
        const std::string& key = at.key;
        if (key == "model") {
            if (value != "example1" && value != "example2") at.fail("expected example1 or example2");
            cfg.model = std::string(value);
        } else if (key == "u0") {
            cfg.u0 = parse_double(at, value);
        } else if (key == "n") {
            cfg.n = parse_positive_int(at, value);
        } else if (key == "aubry_n") {
            cfg.aubry_n = parse_positive_int(at, value);
            if (cfg.aubry_n < 64 || !std::has_single_bit(static_cast<unsigned>(cfg.aubry_n))) {
                at.fail("must be a power of two >= 64");
            }
        } else if (key == "t_final") {
            cfg.t_final = parse_positive(at, value);
        } else if (key == "sample_dt") {
            cfg.sample_dt = parse_positive(at, value);
        } else if (key == "seed") {
            const long long seed = parse_integer(at, value);
            if (seed < 0) at.fail("must be non-negative");
            cfg.seed = static_cast<std::uint64_t>(seed);
        } else if (key == "trials") {
            cfg.trials = parse_positive_int(at, value);
        } else if (key == "delta") {
            cfg.delta = parse_positive(at, value);
        } else if (key == "tol") {
            cfg.tol = parse_positive(at, value);
        } else if (key == "max_iters") {
            cfg.max_iters = parse_positive_int(at, value);
        } else if (key == "x0") {
            cfg.x0 = parse_list(at, value);
        } else if (key == "kind") {
            if (value != "stationary_sub" && value != "stationary_super" && value != "evol_sub" &&
                value != "evol_super" && value != "periodic_sub") {
                at.fail("unknown certificate kind");
            }
            cfg.kind = std::string(value);
        } else if (key == "eps") {
            cfg.eps = parse_double(at, value);
        } else if (key == "theta") {
            cfg.theta = parse_double(at, value);
        } else if (key == "verify_nx") {
            cfg.verify_nx = parse_positive_int(at, value);
        } else if (key == "verify_nt") {
            cfg.verify_nt = parse_positive_int(at, value);
        } else if (key == "initial") {
            if (value.starts_with("offset:")) {
                cfg.initial = "offset";
                cfg.initial_offset = parse_double(at, trim(value.substr(7)));
            } else if (value.starts_with("csv:")) {
                cfg.initial = "csv";
                cfg.initial_csv = std::string(trim(value.substr(4)));
                if (cfg.initial_csv.empty()) at.fail("csv: needs a path");
            } else if (value == "fourier" || value == "certificate" || value == "offset") {
                cfg.initial = std::string(value);
            } else {
                at.fail("expected offset:<c>, fourier, certificate or csv:<path>");
            }
        } else if (key == "snapshots") {
            cfg.snapshots = parse_bool(at, value);
        } else {
            at.fail("unknown key");
        }
    }

    for (const auto& [name, builder] : blocks) {
        const Location at{source, builder.first_line, name};
        if (name == "lambda") cfg.lambda = builder.build(at, 0.0);
        if (name == "V") cfg.V = builder.build(at, 0.0);
        if (name == "phi") cfg.phi = builder.build(at, 0.0);
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, fmt::format("cannot open config '{}'", path.string()));
    return parse_config(in, path.string());
}

}  // namespace hjstab
