#include "speclab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "speclab/bounds.hpp"
#include "speclab/errors.hpp"
#include "speclab/fourier.hpp"
#include "speclab/gabor.hpp"
#include "speclab/version.hpp"

namespace speclab {

namespace {

using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& field, std::vector<std::string>& errs) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        errs.push_back(field + ": not a number: '" + s + "'");
        return 0.0;
    }
}

long parse_long(const std::string& s, const std::string& field, std::vector<std::string>& errs) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        errs.push_back(field + ": not an integer: '" + s + "'");
        return 0;
    }
}

std::string strip_at(const std::string& s) { return !s.empty() && s[0] == '@' ? s.substr(1) : s; }

double to_double(const std::string& s, const std::string& field) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw ValidationError(field + ": not a number: '" + s + "'");
    }
}

long to_long(const std::string& s, const std::string& field) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw ValidationError(field + ": not an integer: '" + s + "'");
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Spectrum: return "spectrum";
        case ExperimentKind::Refine: return "refine";
        case ExperimentKind::Dilate: return "dilate";
        case ExperimentKind::Mixed: return "mixed";
        case ExperimentKind::Prolate: return "prolate";
        case ExperimentKind::ProlateStudy: return "prolate-study";
        case ExperimentKind::Bounds: return "bounds";
    }
    return "spectrum";
}

ExperimentKind kind_from_name(const std::string& name) {
    if (name == "spectrum") return ExperimentKind::Spectrum;
    if (name == "refine") return ExperimentKind::Refine;
    if (name == "dilate") return ExperimentKind::Dilate;
    if (name == "mixed") return ExperimentKind::Mixed;
    if (name == "prolate") return ExperimentKind::Prolate;
    if (name == "prolate-study") return ExperimentKind::ProlateStudy;
    if (name == "bounds") return ExperimentKind::Bounds;
    throw ValidationError("kind: unknown experiment kind '" + name + "'");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::map<std::string, std::string> config_kv(const ExperimentConfig& c) {
    std::map<std::string, std::string> kv;
    kv["kind"] = kind_name(c.kind);
    if (c.length > 0) kv["length"] = std::to_string(c.length);
    if (c.kind == ExperimentKind::Spectrum || c.kind == ExperimentKind::Bounds ||
        c.kind == ExperimentKind::Dilate) {
        if (c.frame_file.empty()) {
            kv["shift"] = std::to_string(c.time_step);
            kv["mod"] = std::to_string(c.freq_step);
        }
    }
    const bool uses_window = c.kind == ExperimentKind::Spectrum || c.kind == ExperimentKind::Bounds ||
                             c.kind == ExperimentKind::Refine || c.kind == ExperimentKind::Dilate;
    if (uses_window && c.frame_file.empty()) kv["window"] = c.window_spec;
    if (!c.domain_spec.empty()) kv["domain"] = c.domain_spec;
    if (!c.frame_file.empty()) kv["frame"] = c.frame_file;
    if (!c.ladder.empty()) {
        std::string s;
        for (std::size_t i = 0; i < c.ladder.size(); ++i) {
            if (i) s += ";";
            s += std::to_string(c.ladder[i].first) + "," + std::to_string(c.ladder[i].second);
        }
        kv["ladder"] = s;
    }
    if (!c.factors.empty()) {
        std::string s;
        for (std::size_t i = 0; i < c.factors.size(); ++i) {
            if (i) s += ",";
            s += format_double(c.factors[i]);
        }
        kv["factors"] = s;
    }
    if (!c.windows_file.empty()) kv["windows"] = c.windows_file;
    if (!c.weights_file.empty()) kv["weights"] = c.weights_file;
    if (c.have_freq) kv["freq"] = std::to_string(c.freq_first) + "," + std::to_string(c.freq_last);
    if (c.have_time) kv["time"] = std::to_string(c.time_first) + "," + std::to_string(c.time_last);
    if (!c.lengths.empty()) {
        std::string s;
        for (std::size_t i = 0; i < c.lengths.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(c.lengths[i]);
        }
        kv["lengths"] = s;
    }
    if (!c.sizes.empty()) {
        std::string s;
        for (std::size_t i = 0; i < c.sizes.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(c.sizes[i]);
        }
        kv["sizes"] = s;
    }
    if (c.kind == ExperimentKind::Prolate || c.kind == ExperimentKind::ProlateStudy) {
        kv["delta"] = format_double(c.delta_single);
    }
    if (!c.deltas.empty()) {
        std::string s;
        for (std::size_t i = 0; i < c.deltas.size(); ++i) {
            if (i) s += ",";
            s += format_double(c.deltas[i]);
        }
        kv["deltas"] = s;
    }
    if (!c.s_grid.empty()) {
        std::string s;
        for (std::size_t i = 0; i < c.s_grid.size(); ++i) {
            if (i) s += ",";
            s += format_double(c.s_grid[i]);
        }
        kv["s_grid"] = s;
    }
    if (c.gamma > 0.0) kv["gamma"] = format_double(c.gamma);
    if (c.alpha > 0.0) kv["alpha"] = format_double(c.alpha);
    if (c.beta > 0.0) kv["beta"] = format_double(c.beta);
    kv["seed"] = std::to_string(c.seed);
    if (!c.out_prefix.empty()) kv["out"] = c.out_prefix;
    if (c.force) kv["force"] = "true";
    return kv;
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value,
               std::vector<std::string>& errs) {
    if (key == "kind") {
        try {
            c.kind = kind_from_name(value);
        } catch (const ValidationError& e) {
            errs.push_back(e.what());
        }
    } else if (key == "length") {
        const long v = parse_long(value, key, errs);
        if (v <= 0) errs.push_back("length: must be positive");
        else c.length = static_cast<std::size_t>(v);
    } else if (key == "shift") {
        const long v = parse_long(value, key, errs);
        if (v <= 0) errs.push_back("shift: must be positive");
        else c.time_step = static_cast<std::size_t>(v);
    } else if (key == "mod") {
        const long v = parse_long(value, key, errs);
        if (v <= 0) errs.push_back("mod: must be positive");
        else c.freq_step = static_cast<std::size_t>(v);
    } else if (key == "window") {
        c.window_spec = value;
    } else if (key == "domain") {
        c.domain_spec = value;
    } else if (key == "frame") {
        c.frame_file = value;
    } else if (key == "ladder") {
        for (const std::string& rung : split(value, ';')) {
            const auto parts = split(rung, ',');
            if (parts.size() != 2) {
                errs.push_back("ladder: rung must be 'a,b': '" + rung + "'");
                continue;
            }
            const long a = parse_long(trim(parts[0]), "ladder", errs);
            const long b = parse_long(trim(parts[1]), "ladder", errs);
            if (a > 0 && b > 0)
                c.ladder.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
            else
                errs.push_back("ladder: steps must be positive");
        }
    } else if (key == "factors") {
        for (const std::string& f : split(value, ',')) {
            const double v = parse_double(trim(f), "factors", errs);
            if (v > 0.0) c.factors.push_back(v);
            else errs.push_back("factors: must be positive");
        }
    } else if (key == "windows") {
        c.windows_file = value;
    } else if (key == "weights") {
        c.weights_file = value;
    } else if (key == "freq" || key == "time") {
        const auto parts = split(value, ',');
        if (parts.size() != 2) {
            errs.push_back(key + ": expected 'first,last'");
            return;
        }
        const long a = parse_long(trim(parts[0]), key, errs);
        const long b = parse_long(trim(parts[1]), key, errs);
        if (key == "freq") {
            c.freq_first = a;
            c.freq_last = b;
            c.have_freq = true;
        } else {
            c.time_first = a;
            c.time_last = b;
            c.have_time = true;
        }
    } else if (key == "lengths" || key == "sizes") {
        auto& target = key == "lengths" ? c.lengths : c.sizes;
        for (const std::string& f : split(value, ',')) {
            const long v = parse_long(trim(f), key, errs);
            if (v > 0) target.push_back(static_cast<std::size_t>(v));
            else errs.push_back(key + ": entries must be positive");
        }
    } else if (key == "delta") {
        c.delta_single = parse_double(value, key, errs);
    } else if (key == "deltas") {
        for (const std::string& f : split(value, ',')) {
            c.deltas.push_back(parse_double(trim(f), "deltas", errs));
        }
    } else if (key == "s_grid") {
        for (const std::string& f : split(value, ',')) {
            c.s_grid.push_back(parse_double(trim(f), "s_grid", errs));
        }
    } else if (key == "gamma") {
        c.gamma = parse_double(value, key, errs);
    } else if (key == "alpha") {
        c.alpha = parse_double(value, key, errs);
    } else if (key == "beta") {
        c.beta = parse_double(value, key, errs);
    } else if (key == "seed") {
        c.seed = static_cast<unsigned long>(parse_long(value, key, errs));
    } else if (key == "out") {
        c.out_prefix = value;
    } else if (key == "force") {
        if (value == "true" || value == "1") c.force = true;
        else if (value == "false" || value == "0") c.force = false;
        else errs.push_back("force: expected true/false");
    } else {
        errs.push_back("unknown key '" + key + "'");
    }
}

void validate(ExperimentConfig& c, std::vector<std::string>& errs) {
    // Deltas: strictly inside (0,1), deduplicated and sorted.
    for (double d : c.deltas) {
        if (!(d > 0.0 && d < 1.0)) {
            errs.push_back("deltas: value " + format_double(d) + " outside (0,1)");
        }
    }
    std::sort(c.deltas.begin(), c.deltas.end());
    c.deltas.erase(std::unique(c.deltas.begin(), c.deltas.end()), c.deltas.end());

    if (c.out_prefix.empty()) errs.push_back("out: output prefix is required");

    const bool gaborish = c.kind == ExperimentKind::Spectrum || c.kind == ExperimentKind::Bounds ||
                          c.kind == ExperimentKind::Refine || c.kind == ExperimentKind::Dilate ||
                          c.kind == ExperimentKind::Mixed || c.kind == ExperimentKind::Prolate;
    if (gaborish && c.frame_file.empty() && c.length == 0) errs.push_back("length: required");

    switch (c.kind) {
        case ExperimentKind::Spectrum:
        case ExperimentKind::Bounds:
            if (c.domain_spec.empty()) errs.push_back("domain: required");
            break;
        case ExperimentKind::Refine:
            if (c.domain_spec.empty()) errs.push_back("domain: required");
            if (c.ladder.empty()) errs.push_back("ladder: required");
            if (!c.domain_spec.empty() && c.domain_spec[0] == '@')
                errs.push_back("domain: refinement needs a shape, not a point mask");
            break;
        case ExperimentKind::Dilate:
            if (c.domain_spec.empty()) errs.push_back("domain: required");
            if (c.factors.empty()) errs.push_back("factors: required");
            if (!c.domain_spec.empty() && c.domain_spec[0] == '@')
                errs.push_back("domain: dilation needs a shape, not a point mask");
            break;
        case ExperimentKind::Mixed:
            if (c.windows_file.empty()) errs.push_back("windows: required");
            if (c.weights_file.empty()) errs.push_back("weights: required");
            if (c.domain_spec.empty()) errs.push_back("domain: required");
            break;
        case ExperimentKind::Prolate:
            if (!c.have_freq) errs.push_back("freq: required");
            if (!c.have_time) errs.push_back("time: required");
            if (!(c.delta_single > 0.0 && c.delta_single < 0.5))
                errs.push_back("delta: must lie in (0, 1/2)");
            break;
        case ExperimentKind::ProlateStudy:
            if (c.lengths.empty()) errs.push_back("lengths: required");
            if (c.sizes.empty()) errs.push_back("sizes: required");
            if (!(c.delta_single > 0.0 && c.delta_single < 0.5))
                errs.push_back("delta: must lie in (0, 1/2)");
            break;
    }

    // Referenced files must exist at parse time.
    auto check_file = [&](const std::string& spec, const std::string& field) {
        if (spec.empty()) return;
        std::string path;
        if (spec[0] == '@') path = spec.substr(1);
        else if (spec.rfind("file:@", 0) == 0) path = spec.substr(6);
        else if (spec.rfind("poly:@", 0) == 0) path = spec.substr(6);
        else return;
        if (!std::filesystem::exists(path)) {
            errs.push_back(field + ": referenced file does not exist: " + path);
        }
    };
    check_file(c.window_spec, "window");
    check_file(c.domain_spec, "domain");
    check_file(c.frame_file, "frame");
    check_file(c.windows_file, "windows");
    check_file(c.weights_file, "weights");

    for (double s : c.s_grid) {
        if (!(s > 0.0)) errs.push_back("s_grid: entries must be positive");
    }
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::vector<std::string> parse_errs;
    std::vector<std::string> errs;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            parse_errs.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            parse_errs.push_back("line " + std::to_string(lineno) + ": empty key");
            continue;
        }
        apply_key(c, key, value, errs);
    }
    if (!parse_errs.empty()) {
        std::string msg = "config parse failed:";
        for (const auto& e : parse_errs) msg += "\n  " + e;
        throw ParseError(msg);
    }
    validate(c, errs);
    if (!errs.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    return c;
}

std::string serialize_config(const ExperimentConfig& config) {
    std::string out;
    for (const auto& [k, v] : config_kv(config)) {
        out += k + " = " + v + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// input file loaders

namespace {

Vec parse_window_spec(const std::string& spec, std::size_t length) {
    if (spec == "gauss") return make_gauss_window(length);
    if (spec.rfind("boxcar:", 0) == 0) {
        const long w = to_long(spec.substr(7), "window");
        if (w <= 0) throw ValidationError("boxcar width must be positive");
        return make_boxcar_window(length, static_cast<std::size_t>(w));
    }
    if (spec.rfind("file:@", 0) == 0) {
        const std::string text = read_text_file(spec.substr(6));
        Vec g;
        std::istringstream in(text);
        double re, im;
        while (in >> re >> im) g.emplace_back(re, im);
        if (g.size() != length) {
            throw ValidationError("window file has " + std::to_string(g.size()) +
                                  " samples, expected " + std::to_string(length));
        }
        return normalized_window(std::move(g));
    }
    throw ValidationError("window: unrecognized spec '" + spec + "'");
}

ContinuousDomain parse_shape_spec(const std::string& spec) {
    if (spec.rfind("rect:", 0) == 0) {
        const auto parts = split(spec.substr(5), ',');
        if (parts.size() != 4) throw ValidationError("rect: expected x0,y0,x1,y1");
        const double x0 = to_double(trim(parts[0]), "rect");
        const double y0 = to_double(trim(parts[1]), "rect");
        const double x1 = to_double(trim(parts[2]), "rect");
        const double y1 = to_double(trim(parts[3]), "rect");
        return ContinuousDomain::rect({std::min(x0, x1), std::min(y0, y1)},
                                      {std::max(x0, x1), std::max(y0, y1)});
    }
    if (spec.rfind("disk:", 0) == 0) {
        const auto parts = split(spec.substr(5), ',');
        if (parts.size() != 3) throw ValidationError("disk: expected cx,cy,r");
        return ContinuousDomain::disk(
            {to_double(trim(parts[0]), "disk"), to_double(trim(parts[1]), "disk")},
            to_double(trim(parts[2]), "disk"));
    }
    if (spec.rfind("poly:@", 0) == 0) {
        const std::string text = read_text_file(spec.substr(6));
        std::vector<std::array<double, 2>> verts;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty()) continue;
            const auto parts = split(line, ',');
            if (parts.size() != 2) throw ValidationError("polygon file: expected 'x,y' per line");
            verts.push_back({to_double(trim(parts[0]), "poly"), to_double(trim(parts[1]), "poly")});
        }
        return ContinuousDomain::polygon(std::move(verts));
    }
    throw ValidationError("domain: unrecognized shape spec '" + spec + "'");
}

// Mask file: "d extents..." header, then one integer coordinate tuple per line.
std::vector<std::vector<int>> parse_mask_file(const std::string& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    int d = 0;
    if (!(in >> d) || d <= 0) throw ValidationError("mask file: bad dimension header");
    std::vector<long> extents(d);
    for (int i = 0; i < d; ++i) {
        if (!(in >> extents[i]) || extents[i] <= 0) {
            throw ValidationError("mask file: bad extent header");
        }
    }
    std::vector<std::vector<int>> pts;
    long v;
    std::vector<int> cur;
    while (in >> v) {
        cur.push_back(static_cast<int>(v));
        if (static_cast<int>(cur.size()) == d) {
            for (int i = 0; i < d; ++i) {
                if (cur[i] < 0 || cur[i] >= extents[i]) {
                    throw ValidationError("mask file: point outside the declared extents");
                }
            }
            pts.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) throw ValidationError("mask file: trailing coordinates");
    return pts;
}

// Frame file: "M n" header, then one line per vector with the integer index
// coordinates followed by M re/im pairs.
FrameSystem parse_frame_file(const std::string& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::size_t m = 0, n = 0;
    if (!(in >> m >> n) || m == 0 || n == 0) throw ValidationError("frame file: bad header");
    std::string rest;
    std::getline(in, rest);

    std::vector<std::vector<int>> coords;
    std::vector<Vec> vectors;
    int d = -1;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<double> tokens;
        double t;
        while (ls >> t) tokens.push_back(t);
        if (d < 0) {
            const long dd = static_cast<long>(tokens.size()) - 2 * static_cast<long>(m);
            if (dd <= 0) throw ValidationError("frame file: vector line too short");
            d = static_cast<int>(dd);
        }
        if (tokens.size() != static_cast<std::size_t>(d) + 2 * m) {
            throw ValidationError("frame file: inconsistent vector line length");
        }
        std::vector<int> k(d);
        for (int i = 0; i < d; ++i) k[i] = static_cast<int>(std::llround(tokens[i]));
        Vec v(m);
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = cplx(tokens[d + 2 * i], tokens[d + 2 * i + 1]);
        }
        coords.push_back(std::move(k));
        vectors.push_back(std::move(v));
    }
    if (vectors.size() != n) throw ValidationError("frame file: vector count mismatch");

    // Sort into the canonical row-major index order.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return coords[a] < coords[b]; });
    std::vector<std::vector<int>> sorted_coords;
    std::vector<Vec> sorted_vectors;
    for (std::size_t i : order) {
        sorted_coords.push_back(coords[i]);
        sorted_vectors.push_back(std::move(vectors[i]));
    }
    const DiscreteDomain dom = make_domain(LatticeSpec::integer(d), std::move(sorted_coords));
    return build_frame(m, dom, std::move(sorted_vectors));
}

std::vector<Vec> parse_windows_file(const std::string& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::size_t l = 0, n = 0;
    if (!(in >> l >> n) || l == 0 || n == 0) throw ValidationError("windows file: bad header");
    std::vector<Vec> windows(n, Vec(l));
    for (std::size_t w = 0; w < n; ++w) {
        for (std::size_t t = 0; t < l; ++t) {
            double re, im;
            if (!(in >> re >> im)) throw ValidationError("windows file: truncated");
            windows[w][t] = cplx(re, im);
        }
    }
    return windows;
}

std::vector<cplx> parse_weights_file(const std::string& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::vector<cplx> weights;
    double re, im;
    while (in >> re >> im) weights.emplace_back(re, im);
    if (weights.empty()) throw ValidationError("weights file: empty");
    return weights;
}

} // namespace

// ---------------------------------------------------------------------------
// summary assembly

namespace {

json json_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

json profile_block(const SpectralProfile& prof, const std::vector<double>& deltas, double mu) {
    json b;
    b["counts"] = json::array();
    b["plunges"] = json::array();
    b["deviations"] = json::array();
    for (double d : deltas) {
        b["counts"].push_back(count_above(prof, d));
        if (d < 0.5) {
            b["plunges"].push_back(plunge_count(prof, d));
        } else {
            b["plunges"].push_back(nullptr);
        }
        b["deviations"].push_back(spectral_deviation(prof, d, mu));
    }
    b["hankel"] = {{"s2", hankel_schatten(prof, 2.0)},
                   {"s1", hankel_schatten(prof, 1.0)},
                   {"s_half", hankel_schatten(prof, 0.5)}};
    return b;
}

json geometry_block(const DiscreteDomain& mask, double gamma) {
    json g;
    g["gamma"] = gamma;
    g["inflation"] = inflation_constant(mask, gamma);
    g["iota"] = isotropic_fineness(mask.lattice);
    g["lattice_perimeter"] = lattice_perimeter(mask);
    g["mask_points"] = mask.size();
    return g;
}

// The bound report is evaluated at the most demanding threshold on the
// delta grid (largest tau).
json bounds_block(const std::vector<double>& s_grid, const std::vector<double>& n_of_s,
                  double gamma, double inflation, double perimeter, double boundary,
                  const std::vector<double>& deltas, double alpha, double beta,
                  double exp_d) {
    double tau = 2.0;
    for (double d : deltas) tau = std::max(tau, tau_of_delta(d));
    json b;
    b["s_grid"] = s_grid;
    b["N_of_s"] = json::array();
    for (double v : n_of_s) b["N_of_s"].push_back(json_or_null(v));
    try {
        const BoundEntry main_entry = rhs_theorem_main(inflation, gamma, tau, s_grid, n_of_s);
        b["s_star"] = main_entry.s_star;
        b["rhs_main"] = main_entry.value;
    } catch (const AllInfinite&) {
        b["s_star"] = nullptr;
        b["rhs_main"] = nullptr;
    }
    try {
        std::vector<double> grid1;
        std::vector<double> n1;
        for (std::size_t i = 0; i < s_grid.size(); ++i) {
            if (s_grid[i] >= 1.0 - 1e-12) {
                grid1.push_back(s_grid[i]);
                n1.push_back(n_of_s[i]);
            }
        }
        if (grid1.empty()) throw AllInfinite("empty doubling grid");
        const double maxgeom = std::max(inflation, perimeter);
        const BoundEntry dbl = rhs_theorem_doubling(maxgeom, gamma, tau, grid1, n1);
        b["rhs_doubling"] = dbl.value;
    } catch (const AllInfinite&) {
        b["rhs_doubling"] = nullptr;
    }
    if (alpha > 0.0 && beta > 0.0 && std::isfinite(exp_d)) {
        b["rhs_exponential"] = rhs_exponential(inflation, gamma, beta, tau, exp_d);
    } else {
        b["rhs_exponential"] = nullptr;
    }
    b["boundary_interaction"] = boundary;
    b["slack_factors"] = {{"nonlocal_perimeter", 8.0}, {"sandwich", 10.0}};
    return b;
}

json base_summary(const ExperimentConfig& cfg) {
    json s;
    s["version"] = kVersion;
    s["kind"] = kind_name(cfg.kind);
    json echo = json::object();
    for (const auto& [k, v] : config_kv(cfg)) echo[k] = v;
    s["config"] = echo;
    s["trace"] = nullptr;
    s["mu_omega"] = nullptr;
    s["deltas"] = cfg.deltas;
    s["counts"] = nullptr;
    s["plunges"] = nullptr;
    s["deviations"] = nullptr;
    s["hankel"] = nullptr;
    s["frame_bounds"] = nullptr;
    s["wexler_raz"] = nullptr;
    s["geometry"] = nullptr;
    s["bounds"] = nullptr;
    s["extra"] = nullptr;
    return s;
}

void merge_profile(json& s, const SpectralProfile& prof, const std::vector<double>& deltas,
                   double mu) {
    const json b = profile_block(prof, deltas, mu);
    s["trace"] = prof.source_trace;
    s["mu_omega"] = mu;
    s["counts"] = b["counts"];
    s["plunges"] = b["plunges"];
    s["deviations"] = b["deviations"];
    s["hankel"] = b["hankel"];
}

std::string eigs_csv(const SpectralProfile& prof) {
    std::string out = "index,eigenvalue\n";
    for (std::size_t i = 0; i < prof.eigenvalues.size(); ++i) {
        out += std::to_string(i) + "," + format_double(prof.eigenvalues[i]) + "\n";
    }
    return out;
}

unsigned env_threads(std::size_t item_count) {
    const char* env = std::getenv("SPECLAB_THREADS");
    if (env != nullptr) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::max<std::size_t>(1, item_count));
}

// ---------------------------------------------------------------------------
// per-kind runners

RunOutput run_gabor_spectrum(const ExperimentConfig& cfg) {
    const Vec window = parse_window_spec(cfg.window_spec, cfg.length);
    const GaborSystem sys = build_gabor_frame(cfg.length, cfg.time_step, cfg.freq_step, window);

    DiscreteDomain mask;
    if (!cfg.domain_spec.empty() && cfg.domain_spec[0] == '@') {
        mask = tf_mask_from_points(sys, parse_mask_file(strip_at(cfg.domain_spec)));
    } else {
        mask = tf_mask_from_shape(sys, parse_shape_spec(cfg.domain_spec));
    }

    const SpectralProfile prof = hermitian_eigenvalues(gabor_multiplier_hermitian(sys, mask));
    const double mu = mu_weighted(sys.frame, mask);

    TorusKernel kernel;
    kernel.lattice = sys.frame.index_set.lattice;
    kernel.period = static_cast<double>(cfg.length);
    kernel.sizes = {static_cast<int>(cfg.length / cfg.time_step),
                    static_cast<int>(cfg.length / cfg.freq_step)};
    kernel.q2 = gabor_kernel_q2(sys);
    kernel.mass = sys.frame.index_set.mass;

    const double gamma = cfg.gamma > 0.0 ? cfg.gamma : 2.0;
    const std::vector<double> s_grid = cfg.s_grid.empty() ? default_s_grid(gamma) : cfg.s_grid;
    std::vector<double> n_of_s;
    for (double s : s_grid) n_of_s.push_back(dyadic_decay(kernel, s));
    const double boundary = boundary_interaction(kernel, mask);
    const double exp_d = cfg.alpha > 0.0 && cfg.beta > 0.0
                             ? exp_decay_constant(kernel, cfg.alpha, cfg.beta)
                             : std::numeric_limits<double>::quiet_NaN();

    RunOutput out;
    out.summary = base_summary(cfg);
    merge_profile(out.summary, prof, cfg.deltas, mu);
    out.summary["frame_bounds"] = {sys.frame.bound_lower, sys.frame.bound_upper};
    out.summary["wexler_raz"] = sys.wexler_raz;
    out.summary["geometry"] = geometry_block(mask, gamma);
    out.summary["bounds"] =
        bounds_block(s_grid, n_of_s, gamma, inflation_constant(mask, gamma),
                     lattice_perimeter(mask), boundary, cfg.deltas, cfg.alpha, cfg.beta, exp_d);
    out.files[".eigs.csv"] = eigs_csv(prof);
    out.mu_omega = mu;
    out.trace = prof.source_trace;
    return out;
}

RunOutput run_frame_spectrum(const ExperimentConfig& cfg) {
    const FrameSystem frame = parse_frame_file(strip_at(cfg.frame_file));

    DiscreteDomain mask;
    if (!cfg.domain_spec.empty() && cfg.domain_spec[0] == '@') {
        mask = make_domain(frame.index_set.lattice, parse_mask_file(strip_at(cfg.domain_spec)),
                           frame.index_set.mass);
    } else {
        mask = discretize(parse_shape_spec(cfg.domain_spec), frame.index_set.lattice);
    }

    const SpectralProfile prof = hermitian_eigenvalues(multiplier_hermitian(frame, mask));
    const double mu = mu_weighted(frame, mask);

    const KernelOnDomain kernel = kernel_from_frame(frame);
    const double gamma = cfg.gamma > 0.0 ? cfg.gamma : static_cast<double>(frame.index_set.lattice.dim);
    const std::vector<double> s_grid = cfg.s_grid.empty() ? default_s_grid(gamma) : cfg.s_grid;
    std::vector<double> n_of_s;
    for (double s : s_grid) n_of_s.push_back(dyadic_decay(kernel, s));
    const double boundary = boundary_interaction(kernel, mask_positions(frame, mask));
    const double exp_d = cfg.alpha > 0.0 && cfg.beta > 0.0
                             ? exp_decay_constant(kernel, cfg.alpha, cfg.beta)
                             : std::numeric_limits<double>::quiet_NaN();

    RunOutput out;
    out.summary = base_summary(cfg);
    merge_profile(out.summary, prof, cfg.deltas, mu);
    out.summary["frame_bounds"] = {frame.bound_lower, frame.bound_upper};
    out.summary["geometry"] = geometry_block(mask, gamma);
    out.summary["bounds"] =
        bounds_block(s_grid, n_of_s, gamma, inflation_constant(mask, gamma),
                     lattice_perimeter(mask), boundary, cfg.deltas, cfg.alpha, cfg.beta, exp_d);
    out.files[".eigs.csv"] = eigs_csv(prof);
    out.mu_omega = mu;
    out.trace = prof.source_trace;
    return out;
}

RunOutput run_refine(const ExperimentConfig& cfg) {
    const Vec window = parse_window_spec(cfg.window_spec, cfg.length);
    const ContinuousDomain shape = parse_shape_spec(cfg.domain_spec);
    const double gamma = cfg.gamma > 0.0 ? cfg.gamma : 2.0;
    const std::vector<double> s_grid = cfg.s_grid.empty() ? default_s_grid(gamma) : cfg.s_grid;

    const RefinementResult res = refinement_study(cfg.length, window, shape, cfg.ladder,
                                                  cfg.deltas, s_grid,
                                                  env_threads(cfg.ladder.size()));

    RunOutput out;
    out.summary = base_summary(cfg);

    std::string rows_csv = "L,a,b,delta,count,mu_omega,deviation,plunge,n_gamma,rhs_main\n";
    for (const RefinementRow& row : res.rows) {
        rows_csv += std::to_string(cfg.length) + "," + std::to_string(row.time_step) + "," +
                    std::to_string(row.freq_step) + "," + format_double(row.delta) + "," +
                    std::to_string(row.count) + "," + format_double(row.mu) + "," +
                    format_double(row.deviation) + "," +
                    (row.plunge ? std::to_string(*row.plunge) : std::string("")) + "," +
                    format_double(row.n_gamma) + "," + format_double(row.rhs_main) + "\n";
    }
    out.files[".refine.csv"] = rows_csv;

    std::string stacked = "a,b,index,eigenvalue\n";
    json rungs = json::array();
    const RefinementRung* finest = nullptr;
    for (const RefinementRung& rung : res.rungs) {
        json r;
        r["a"] = rung.time_step;
        r["b"] = rung.freq_step;
        r["frame_ok"] = rung.frame_ok;
        if (rung.frame_ok) {
            const json b = profile_block(rung.profile, cfg.deltas, rung.mu);
            r["trace"] = rung.profile.source_trace;
            r["mu_omega"] = rung.mu;
            r["counts"] = b["counts"];
            r["plunges"] = b["plunges"];
            r["deviations"] = b["deviations"];
            r["hankel"] = b["hankel"];
            r["wexler_raz"] = rung.wexler_raz;
            r["n_of_s"] = rung.n_of_s;
            r["n_gamma"] = rung.n_gamma;
            r["inflation"] = rung.inflation;
            r["lattice_perimeter"] = rung.mask_perimeter;
            r["iota"] = rung.iota;
            r["mask_points"] = rung.mask_points;
            r["boundary_interaction"] = rung.boundary_interaction;
            r["rhs_main"] = rung.rhs_main;
            r["rhs_doubling"] = rung.rhs_doubling;
            r["s_star"] = rung.rhs_s_star;
            for (std::size_t i = 0; i < rung.profile.eigenvalues.size(); ++i) {
                stacked += std::to_string(rung.time_step) + "," + std::to_string(rung.freq_step) +
                           "," + std::to_string(i) + "," +
                           format_double(rung.profile.eigenvalues[i]) + "\n";
            }
            finest = &rung;
        }
        rungs.push_back(r);
    }
    out.files[".eigs.csv"] = stacked;
    out.summary["extra"] = {{"rungs", rungs}};

    if (finest != nullptr) {
        merge_profile(out.summary, finest->profile, cfg.deltas, finest->mu);
        out.summary["wexler_raz"] = finest->wexler_raz;
        json geo;
        geo["gamma"] = gamma;
        geo["inflation"] = finest->inflation;
        geo["iota"] = finest->iota;
        geo["lattice_perimeter"] = finest->mask_perimeter;
        geo["mask_points"] = finest->mask_points;
        out.summary["geometry"] = geo;
        json b;
        b["s_grid"] = s_grid;
        b["N_of_s"] = json::array();
        for (double v : finest->n_of_s) b["N_of_s"].push_back(json_or_null(v));
        b["s_star"] = finest->rhs_s_star;
        b["rhs_main"] = finest->rhs_main;
        b["rhs_doubling"] = finest->rhs_doubling;
        b["rhs_exponential"] = nullptr;
        b["boundary_interaction"] = finest->boundary_interaction;
        b["slack_factors"] = {{"nonlocal_perimeter", 8.0}, {"sandwich", 10.0}};
        out.summary["bounds"] = b;
        out.mu_omega = finest->mu;
        out.trace = finest->profile.source_trace;
    }
    return out;
}

RunOutput run_dilate(const ExperimentConfig& cfg) {
    const ContinuousDomain base = parse_shape_spec(cfg.domain_spec);

    RunOutput out;
    out.summary = base_summary(cfg);
    json factors = json::array();
    std::string combined = "factor,perimeter,delta,count,mu_omega,deviation\n";

    ExperimentConfig sub = cfg;
    sub.kind = ExperimentKind::Spectrum;
    RunOutput last;
    for (std::size_t fi = 0; fi < cfg.factors.size(); ++fi) {
        const double r = cfg.factors[fi];
        ContinuousDomain scaled = base;
        // Scale around the shape's own center so the mask stays on the torus.
        switch (base.shape) {
            case ContinuousDomain::Shape::Disk:
                scaled.radius = base.radius * r;
                break;
            case ContinuousDomain::Shape::Rect: {
                for (int i = 0; i < base.dim; ++i) {
                    const double c = 0.5 * (base.lo[i] + base.hi[i]);
                    scaled.lo[i] = c + (base.lo[i] - c) * r;
                    scaled.hi[i] = c + (base.hi[i] - c) * r;
                }
                break;
            }
            case ContinuousDomain::Shape::Polygon: {
                double cx = 0.0, cy = 0.0;
                for (const auto& v : base.vertices) {
                    cx += v[0];
                    cy += v[1];
                }
                cx /= static_cast<double>(base.vertices.size());
                cy /= static_cast<double>(base.vertices.size());
                for (auto& v : scaled.vertices) {
                    v[0] = cx + (v[0] - cx) * r;
                    v[1] = cy + (v[1] - cy) * r;
                }
                break;
            }
        }
        const double perimeter = continuous_perimeter(scaled);

        // Re-encode the scaled shape for the sub-run.
        std::string spec;
        if (scaled.shape == ContinuousDomain::Shape::Disk) {
            spec = "disk:" + format_double(scaled.center[0]) + "," +
                   format_double(scaled.center[1]) + "," + format_double(scaled.radius);
        } else if (scaled.shape == ContinuousDomain::Shape::Rect) {
            spec = "rect:" + format_double(scaled.lo[0]) + "," + format_double(scaled.lo[1]) + "," +
                   format_double(scaled.hi[0]) + "," + format_double(scaled.hi[1]);
        } else {
            throw ValidationError("dilate: polygon masks are not supported");
        }
        sub.domain_spec = spec;
        RunOutput step = run_gabor_spectrum(sub);

        json f;
        f["factor"] = r;
        f["perimeter"] = perimeter;
        f["trace"] = step.summary["trace"];
        f["mu_omega"] = step.summary["mu_omega"];
        f["counts"] = step.summary["counts"];
        f["deviations"] = step.summary["deviations"];
        factors.push_back(f);

        for (std::size_t di = 0; di < cfg.deltas.size(); ++di) {
            combined += format_double(r) + "," + format_double(perimeter) + "," +
                        format_double(cfg.deltas[di]) + "," +
                        step.summary["counts"][di].dump() + "," +
                        format_double(step.summary["mu_omega"].get<double>()) + "," +
                        format_double(step.summary["deviations"][di].get<double>()) + "\n";
        }
        out.files[".f" + std::to_string(fi + 1) + ".eigs.csv"] = step.files[".eigs.csv"];
        last = std::move(step);
    }
    out.files[".dilate.csv"] = combined;
    out.summary["extra"] = {{"factors", factors}};

    // Top-level spectral fields mirror the largest factor.
    out.summary["trace"] = last.summary["trace"];
    out.summary["mu_omega"] = last.summary["mu_omega"];
    out.summary["counts"] = last.summary["counts"];
    out.summary["plunges"] = last.summary["plunges"];
    out.summary["deviations"] = last.summary["deviations"];
    out.summary["hankel"] = last.summary["hankel"];
    out.summary["frame_bounds"] = last.summary["frame_bounds"];
    out.summary["wexler_raz"] = last.summary["wexler_raz"];
    out.summary["geometry"] = last.summary["geometry"];
    out.summary["bounds"] = last.summary["bounds"];
    out.mu_omega = last.mu_omega;
    out.trace = last.trace;
    return out;
}

RunOutput run_mixed(const ExperimentConfig& cfg) {
    const std::vector<Vec> windows = parse_windows_file(strip_at(cfg.windows_file));
    const std::vector<cplx> weights = parse_weights_file(strip_at(cfg.weights_file));
    const std::size_t L = cfg.length;
    for (const Vec& w : windows) {
        if (w.size() != L) throw ValidationError("mixed windows must have length L");
    }

    // Mask over the full torus Z_L x Z_L.
    std::vector<std::vector<int>> mask_pts;
    if (!cfg.domain_spec.empty() && cfg.domain_spec[0] == '@') {
        mask_pts = parse_mask_file(strip_at(cfg.domain_spec));
    } else {
        const ContinuousDomain shape = parse_shape_spec(cfg.domain_spec);
        const double dL = static_cast<double>(L);
        for (std::size_t x = 0; x < L; ++x) {
            for (std::size_t y = 0; y < L; ++y) {
                bool inside;
                if (shape.shape == ContinuousDomain::Shape::Disk) {
                    double dx = std::fmod(std::abs(static_cast<double>(x) - shape.center[0]), dL);
                    double dy = std::fmod(std::abs(static_cast<double>(y) - shape.center[1]), dL);
                    dx = std::min(dx, dL - dx);
                    dy = std::min(dy, dL - dy);
                    inside = dx * dx + dy * dy <= shape.radius * shape.radius;
                } else {
                    inside = shape.contains({static_cast<double>(x), static_cast<double>(y)});
                }
                if (inside) mask_pts.push_back({static_cast<int>(x), static_cast<int>(y)});
            }
        }
    }

    const Mat op = mixed_state_multiplier(windows, weights, mask_pts, L);
    const SpectralProfile prof = hermitian_eigenvalues(op);

    const LatticeSpec lat = LatticeSpec::integer(2);
    const DiscreteDomain mask =
        make_domain(lat, mask_pts, 1.0 / static_cast<double>(L), static_cast<double>(L));
    const double mu = mask.measure();

    // Translation-invariant kernel magnitudes on the torus.
    TorusKernel kernel;
    kernel.lattice = lat;
    kernel.period = static_cast<double>(L);
    kernel.sizes = {static_cast<int>(L), static_cast<int>(L)};
    kernel.mass = 1.0 / static_cast<double>(L);
    kernel.q2.assign(L * L, 0.0);
    for (std::size_t x = 0; x < L; ++x) {
        for (std::size_t y = 0; y < L; ++y) {
            double acc = 0.0;
            for (std::size_t wm = 0; wm < windows.size(); ++wm) {
                const Vec shifted =
                    tf_shift(static_cast<long>(x), static_cast<long>(y), windows[wm]);
                for (std::size_t wn = 0; wn < windows.size(); ++wn) {
                    acc += std::norm(weights[wn]) * std::norm(weights[wm]) *
                           std::norm(inner(windows[wn], shifted));
                }
            }
            kernel.q2[x * L + y] = acc;
        }
    }

    const double gamma = cfg.gamma > 0.0 ? cfg.gamma : 2.0;
    const std::vector<double> s_grid = cfg.s_grid.empty() ? default_s_grid(gamma) : cfg.s_grid;
    std::vector<double> n_of_s;
    for (double s : s_grid) n_of_s.push_back(dyadic_decay(kernel, s));
    const double boundary = boundary_interaction(kernel, mask);
    const double exp_d = cfg.alpha > 0.0 && cfg.beta > 0.0
                             ? exp_decay_constant(kernel, cfg.alpha, cfg.beta)
                             : std::numeric_limits<double>::quiet_NaN();

    RunOutput out;
    out.summary = base_summary(cfg);
    merge_profile(out.summary, prof, cfg.deltas, mu);
    out.summary["geometry"] = geometry_block(mask, gamma);
    out.summary["bounds"] =
        bounds_block(s_grid, n_of_s, gamma, inflation_constant(mask, gamma),
                     lattice_perimeter(mask), boundary, cfg.deltas, cfg.alpha, cfg.beta, exp_d);
    out.files[".eigs.csv"] = eigs_csv(prof);
    out.mu_omega = mu;
    out.trace = prof.source_trace;
    return out;
}

RunOutput run_prolate(const ExperimentConfig& cfg) {
    const CyclicInterval freq = make_interval(cfg.freq_first, cfg.freq_last, cfg.length);
    const CyclicInterval time = make_interval(cfg.time_first, cfg.time_last, cfg.length);
    const ProlateInstance inst = prolate_operator(cfg.length, freq, time);
    const SpectralProfile prof = hermitian_eigenvalues(inst.op);

    const double m2 = static_cast<double>(freq.size) / static_cast<double>(cfg.length);
    std::vector<std::vector<int>> mask_pts;
    for (std::size_t idx : interval_indices(time, cfg.length)) {
        mask_pts.push_back({static_cast<int>(idx)});
    }
    const DiscreteDomain mask = make_domain(LatticeSpec::integer(1), std::move(mask_pts), m2,
                                            static_cast<double>(cfg.length));
    const double mu = mask.measure();

    const TorusKernel kernel = prolate_kernel(cfg.length, freq);
    const double gamma = cfg.gamma > 0.0 ? cfg.gamma : 1.0;
    const std::vector<double> s_grid = cfg.s_grid.empty() ? default_s_grid(gamma) : cfg.s_grid;
    std::vector<double> n_of_s;
    for (double s : s_grid) n_of_s.push_back(dyadic_decay(kernel, s));
    const double boundary = boundary_interaction(kernel, mask);
    const double exp_d = cfg.alpha > 0.0 && cfg.beta > 0.0
                             ? exp_decay_constant(kernel, cfg.alpha, cfg.beta)
                             : std::numeric_limits<double>::quiet_NaN();

    std::vector<double> deltas = cfg.deltas;
    if (deltas.empty()) deltas = {cfg.delta_single};

    RunOutput out;
    out.summary = base_summary(cfg);
    out.summary["deltas"] = deltas;
    merge_profile(out.summary, prof, deltas, mu);
    out.summary["geometry"] = geometry_block(mask, gamma);
    out.summary["bounds"] =
        bounds_block(s_grid, n_of_s, gamma, inflation_constant(mask, gamma),
                     lattice_perimeter(mask), boundary, deltas, cfg.alpha, cfg.beta, exp_d);
    out.files[".eigs.csv"] = eigs_csv(prof);
    out.mu_omega = mu;
    out.trace = prof.source_trace;
    return out;
}

RunOutput run_prolate_study(const ExperimentConfig& cfg) {
    const std::size_t items =
        cfg.lengths.size() == cfg.sizes.size() ? cfg.lengths.size()
                                               : cfg.lengths.size() * cfg.sizes.size();
    const PlungeStudy study =
        plunge_study(cfg.lengths, cfg.sizes, cfg.delta_single, env_threads(items));

    RunOutput out;
    out.summary = base_summary(cfg);

    std::string rows_csv = "L,size_I,size_J,trace,count_half,plunge,log_regressor\n";
    json rows = json::array();
    for (const PlungeRow& r : study.rows) {
        rows_csv += std::to_string(r.length) + "," + std::to_string(r.size_freq) + "," +
                    std::to_string(r.size_time) + "," + format_double(r.trace) + "," +
                    std::to_string(r.count_half) + "," + std::to_string(r.plunge) + "," +
                    format_double(r.log_regressor) + "\n";
        json jr;
        jr["L"] = r.length;
        jr["size_I"] = r.size_freq;
        jr["size_J"] = r.size_time;
        jr["trace"] = r.trace;
        jr["count_half"] = r.count_half;
        jr["plunge"] = r.plunge;
        jr["log_regressor"] = r.log_regressor;
        rows.push_back(jr);
    }
    out.files[".study.csv"] = rows_csv;

    std::string stacked = "L,size,index,eigenvalue\n";
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const auto& prof = study.profiles[i];
        for (std::size_t j = 0; j < prof.eigenvalues.size(); ++j) {
            stacked += std::to_string(study.rows[i].length) + "," +
                       std::to_string(study.rows[i].size_freq) + "," + std::to_string(j) + "," +
                       format_double(prof.eigenvalues[j]) + "\n";
        }
    }
    out.files[".eigs.csv"] = stacked;

    out.summary["extra"] = {{"rows", rows},
                            {"fit_slope", study.fit_slope},
                            {"fit_intercept", study.fit_intercept},
                            {"fit_r2", study.fit_r2}};
    return out;
}

} // namespace

RunOutput run_experiment(const ExperimentConfig& config) {
    switch (config.kind) {
        case ExperimentKind::Spectrum:
        case ExperimentKind::Bounds:
            if (!config.frame_file.empty()) return run_frame_spectrum(config);
            return run_gabor_spectrum(config);
        case ExperimentKind::Refine: return run_refine(config);
        case ExperimentKind::Dilate: return run_dilate(config);
        case ExperimentKind::Mixed: return run_mixed(config);
        case ExperimentKind::Prolate: return run_prolate(config);
        case ExperimentKind::ProlateStudy: return run_prolate_study(config);
    }
    throw ValidationError("unknown experiment kind");
}

int run_and_write(const ExperimentConfig& config) {
    using clock = std::chrono::steady_clock;
    try {
        const auto t0 = clock::now();
        RunOutput out = run_experiment(config);
        const auto t1 = clock::now();

        std::vector<std::pair<std::string, std::string>> artifacts;
        for (const auto& [suffix, content] : out.files) {
            artifacts.emplace_back(config.out_prefix + suffix, content);
        }
        artifacts.emplace_back(config.out_prefix + ".summary.json", out.summary.dump(2) + "\n");

        if (!config.force) {
            for (const auto& [path, content] : artifacts) {
                (void)content;
                if (std::filesystem::exists(path)) {
                    throw ValidationError("refusing to overwrite " + path + " (use --force)");
                }
            }
        }
        for (const auto& [path, content] : artifacts) {
            std::ofstream f(path, std::ios::binary);
            if (!f) throw Error("cannot write " + path);
            f << content;
        }
        const double secs = std::chrono::duration<double>(t1 - t0).count();
        json timing;
        timing["wall_seconds"] = secs;
        std::ofstream tf(config.out_prefix + ".timing.json", std::ios::binary);
        tf << timing.dump(2) << "\n";
        return 0;
    } catch (const NotAFrame& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        const bool input_error =
            dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
            dynamic_cast<const BadDivisor*>(&e) || dynamic_cast<const MaskNotSubset*>(&e) ||
            dynamic_cast<const EmptyInterval*>(&e) || dynamic_cast<const DeltaOutOfRange*>(&e) ||
            dynamic_cast<const POutOfRange*>(&e) || dynamic_cast<const NonPositiveInput*>(&e) ||
            dynamic_cast<const NotOrthonormal*>(&e) ||
            dynamic_cast<const WeightsNotNormalized*>(&e) ||
            dynamic_cast<const SingularGenerator*>(&e);
        return input_error ? 3 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int run_many(const std::vector<ExperimentConfig>& configs) {
    if (configs.empty()) return 0;
    const unsigned workers =
        std::min<unsigned>(env_threads(configs.size()), static_cast<unsigned>(configs.size()));
    std::vector<int> codes(configs.size(), 0);
    if (workers <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) codes[i] = run_and_write(configs[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= configs.size()) return;
                    codes[i] = run_and_write(configs[i]);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    int rc = 0;
    for (int c : codes) rc = std::max(rc, c);
    return rc;
}

} // namespace speclab
