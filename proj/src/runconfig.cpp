#include "opfield/runconfig.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <vector>

namespace opfield::cli {

namespace {

// Whitelists in echo order; "c*" admits the dynamic c2, c3, ... keys.
const std::map<std::string, std::vector<std::string>>& command_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"solve-sourced", {"d", "n", "mass", "alpha", "beta", "radius", "tol", "max_iter", "c*"}},
        {"certify", {"d", "n", "mass", "alpha", "beta", "radius", "tol", "max_iter", "c*"}},
        {"solve-phi3",
         {"d", "n", "mass", "lambda", "signature", "shell_floor", "start_scale", "tol",
          "max_iter"}},
        {"wightman", {"d", "n", "k", "samples", "signature"}},
        {"reconstruct", {"d", "points", "level", "ridge", "tol"}},
        {"intertwine-check", {"k", "levels", "trials", "tol"}},
        {"qcd-residual", {"n", "colors", "gs", "mass", "field_scale", "manifest", "tol"}},
    };
    return keys;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw ConfigError("invalid value for " + key + ": '" + value + "'");
}

long long parse_ll(const std::string& key, const std::string& value) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    const long long v = parse_ll(key, value);
    if (v < -(1LL << 31) || v >= (1LL << 31)) bad_value(key, value);
    return static_cast<int>(v);
}

bool coefficient_key(const std::string& key, int& order) {
    if (key.size() < 2 || key[0] != 'c') return false;
    for (std::size_t i = 1; i < key.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(key[i]))) return false;
    order = parse_int(key, key.substr(1));
    return true;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void set_defaults(RunConfig& cfg) {
    if (cfg.command == "solve-sourced" || cfg.command == "certify") {
        cfg.d = 2;
        cfg.n = 6;
        cfg.max_iter = 200;
    } else if (cfg.command == "solve-phi3") {
        cfg.max_iter = 50;
    } else if (cfg.command == "wightman") {
        cfg.signature = "minkowski";
    } else if (cfg.command == "reconstruct") {
        cfg.tol = 1e-8;
    } else if (cfg.command == "intertwine-check") {
        cfg.tol = 1e-12;
    } else if (cfg.command == "qcd-residual") {
        cfg.d = 4;
        cfg.n = 2;
    }
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "d") cfg.d = parse_int(key, value);
    else if (key == "n") cfg.n = parse_int(key, value);
    else if (key == "mass") cfg.mass = parse_double(key, value);
    else if (key == "lambda") cfg.coupling = parse_double(key, value);
    else if (key == "alpha") cfg.alpha = parse_double(key, value);
    else if (key == "beta") cfg.beta = parse_double(key, value);
    else if (key == "radius") cfg.radius = parse_double(key, value);
    else if (key == "tol") cfg.tol = parse_double(key, value);
    else if (key == "max_iter") cfg.max_iter = parse_int(key, value);
    else if (key == "shell_floor") cfg.shell_floor = parse_double(key, value);
    else if (key == "start_scale") cfg.start_scale = parse_double(key, value);
    else if (key == "field_scale") cfg.field_scale = parse_double(key, value);
    else if (key == "gs") cfg.gs = parse_double(key, value);
    else if (key == "ridge") cfg.ridge = parse_double(key, value);
    else if (key == "colors") cfg.colors = parse_int(key, value);
    else if (key == "k") cfg.k = parse_int(key, value);
    else if (key == "samples") cfg.samples = parse_int(key, value);
    else if (key == "points") cfg.points = parse_int(key, value);
    else if (key == "level") cfg.level = parse_int(key, value);
    else if (key == "levels") cfg.levels = parse_int(key, value);
    else if (key == "trials") cfg.trials = parse_int(key, value);
    else if (key == "signature") cfg.signature = value;
    else if (key == "manifest") cfg.manifest = value;
    else throw ConfigError("unknown key '" + key + "'");
}

void validate(const RunConfig& cfg) {
    const auto& allowed = command_keys().at(cfg.command);
    const auto uses = [&](const char* key) {
        return std::find(allowed.begin(), allowed.end(), key) != allowed.end();
    };
    if (uses("d")) require(cfg.d >= 1, "d must be at least 1");
    if (uses("n")) require(cfg.n >= 1, "n must be at least 1");
    if (uses("mass")) {
        if (cfg.command == "qcd-residual") require(cfg.mass >= 0.0, "mass must be nonnegative");
        else require(cfg.mass > 0.0, "mass must be positive");
    }
    if (uses("radius")) require(cfg.radius > 0.0, "radius must be positive");
    if (uses("tol")) require(cfg.tol > 0.0, "tol must be positive");
    if (uses("max_iter")) require(cfg.max_iter >= 1, "max_iter must be at least 1");
    if (uses("shell_floor")) require(cfg.shell_floor > 0.0, "shell_floor must be positive");
    if (uses("start_scale")) require(cfg.start_scale >= 0.0, "start_scale must be nonnegative");
    if (uses("field_scale")) require(cfg.field_scale >= 0.0, "field_scale must be nonnegative");
    if (uses("ridge")) require(cfg.ridge >= 0.0, "ridge must be nonnegative");
    if (uses("colors")) require(cfg.colors >= 2, "colors must be at least 2");
    if (uses("k")) require(cfg.k >= 1, "k must be at least 1");
    if (uses("samples")) require(cfg.samples >= 1, "samples must be at least 1");
    if (uses("points")) require(cfg.points >= 1, "points must be at least 1");
    if (uses("level")) require(cfg.level >= 1, "level must be at least 1");
    if (uses("levels")) require(cfg.levels >= 1, "levels must be at least 1");
    if (uses("trials")) require(cfg.trials >= 1, "trials must be at least 1");
    if (uses("signature"))
        require(cfg.signature == "euclidean" || cfg.signature == "minkowski",
                "signature must be euclidean or minkowski");
}

}  // namespace

std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in,
                                                                 const std::string& origin) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::set<std::string> seen;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const auto where = [&] { return origin + ":" + std::to_string(lineno) + ": "; };
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where() + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where() + "empty key");
        if (value.empty()) throw ConfigError(where() + "empty value for key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where() + "duplicate key '" + key + "'");
        pairs.emplace_back(key, value);
    }
    return pairs;
}

RunConfig parse_config(const std::string& command,
                       const std::vector<std::pair<std::string, std::string>>& pairs) {
    const auto& keys = command_keys();
    const auto it = keys.find(command);
    if (it == keys.end()) throw ConfigError("unknown command '" + command + "'");
    const auto& allowed = it->second;
    const bool takes_coeffs = std::find(allowed.begin(), allowed.end(), "c*") != allowed.end();

    RunConfig cfg;
    cfg.command = command;
    set_defaults(cfg);

    bool have_seed = false;
    for (const auto& [key, value] : pairs) {
        if (key == "command") {
            if (value != command)
                throw ConfigError("config names command '" + value + "' but '" + command +
                                  "' was requested");
            continue;
        }
        if (key == "seed") {
            cfg.seed = parse_u64(key, value);
            have_seed = true;
            continue;
        }
        int order = 0;
        if (coefficient_key(key, order)) {
            if (!takes_coeffs)
                throw ConfigError("unknown key '" + key + "' for command '" + command + "'");
            if (order < 2) throw ConfigError("coefficient keys start at c2, got '" + key + "'");
            cfg.coeffs[order] = Complex(parse_double(key, value));
            continue;
        }
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' for command '" + command + "'");
        assign(cfg, key, value);
    }
    if (!have_seed) throw ConfigError("missing required key 'seed'");
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    const auto pairs = read_key_values(in, path.filename().string());
    for (const auto& [key, value] : pairs)
        if (key == "command") return parse_config(value, pairs);
    throw ConfigError("missing required key 'command'");
}

RunConfig load_config(const std::filesystem::path& path, const std::string& command,
                      const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    auto pairs = read_key_values(in, path.filename().string());

    std::set<std::string> seen;
    for (const auto& entry : overrides) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + entry + "' is not of the form key=value");
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("override '" + entry + "' is not of the form key=value");
        if (!seen.insert(key).second) throw ConfigError("duplicate override key '" + key + "'");
        // Later sources win: drop the file's value before appending.
        std::erase_if(pairs, [&](const auto& p) { return p.first == key; });
        pairs.emplace_back(key, value);
    }
    return parse_config(command, pairs);
}

std::vector<std::pair<std::string, std::string>> effective_entries(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("command", cfg.command);
    out.emplace_back("seed", std::to_string(cfg.seed));
    const auto put_int = [&](const char* key, int v) { out.emplace_back(key, std::to_string(v)); };
    const auto put = [&](const char* key, double v) { out.emplace_back(key, format_g17(v)); };
    for (const auto& key : command_keys().at(cfg.command)) {
        if (key == "d") put_int("d", cfg.d);
        else if (key == "n") put_int("n", cfg.n);
        else if (key == "mass") put("mass", cfg.mass);
        else if (key == "lambda") put("lambda", cfg.coupling);
        else if (key == "alpha") put("alpha", cfg.alpha);
        else if (key == "beta") put("beta", cfg.beta);
        else if (key == "radius") put("radius", cfg.radius);
        else if (key == "tol") put("tol", cfg.tol);
        else if (key == "max_iter") put_int("max_iter", cfg.max_iter);
        else if (key == "shell_floor") put("shell_floor", cfg.shell_floor);
        else if (key == "start_scale") put("start_scale", cfg.start_scale);
        else if (key == "field_scale") put("field_scale", cfg.field_scale);
        else if (key == "gs") put("gs", cfg.gs);
        else if (key == "ridge") put("ridge", cfg.ridge);
        else if (key == "colors") put_int("colors", cfg.colors);
        else if (key == "k") put_int("k", cfg.k);
        else if (key == "samples") put_int("samples", cfg.samples);
        else if (key == "points") put_int("points", cfg.points);
        else if (key == "level") put_int("level", cfg.level);
        else if (key == "levels") put_int("levels", cfg.levels);
        else if (key == "trials") put_int("trials", cfg.trials);
        else if (key == "signature") out.emplace_back("signature", cfg.signature);
        else if (key == "manifest") out.emplace_back("manifest", cfg.manifest);
        else if (key == "c*")
            for (const auto& [order, value] : cfg.coeffs)
                out.emplace_back("c" + std::to_string(order), format_g17(value.real()));
    }
    return out;
}

}  // namespace opfield::cli
