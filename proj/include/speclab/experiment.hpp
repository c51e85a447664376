#ifndef SPECLAB_EXPERIMENT_HPP
#define SPECLAB_EXPERIMENT_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace speclab {

enum class ExperimentKind { Spectrum, Refine, Dilate, Mixed, Prolate, ProlateStudy, Bounds };

std::string kind_name(ExperimentKind kind);
ExperimentKind kind_from_name(const std::string& name);

// Declarative description of one run; mirrors the CLI flags.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Spectrum;
    std::size_t length = 0;
    std::size_t time_step = 1;  // --shift
    std::size_t freq_step = 1;  // --mod
    std::string window_spec = "gauss";
    std::string domain_spec;
    std::string frame_file;   // generic frame import, "@path"
    std::vector<std::pair<std::size_t, std::size_t>> ladder;
    std::vector<double> factors;
    std::string windows_file;
    std::string weights_file;
    long freq_first = 0, freq_last = 0;
    long time_first = 0, time_last = 0;
    bool have_freq = false, have_time = false;
    std::vector<std::size_t> lengths;
    std::vector<std::size_t> sizes;
    double delta_single = 0.1;
    std::vector<double> deltas;  // sorted, deduplicated, strictly inside (0,1)
    std::vector<double> s_grid;  // empty = default geometric grid
    double gamma = 0.0;          // 0 = per-kind default
    double alpha = 0.0, beta = 0.0;
    unsigned long seed = 0;
    std::string out_prefix;
    bool force = false;
};

// Line-oriented `key = value` text with `#` comments. Collects every parse
// and validation problem before throwing (ParseError / ValidationError with
// one line per offense).
ExperimentConfig parse_config(const std::string& text);

// Canonical sorted-key emission; parse(serialize(c)) round-trips.
std::string serialize_config(const ExperimentConfig& config);

struct RunOutput {
    nlohmann::ordered_json summary;              // deterministic field order
    std::map<std::string, std::string> files;    // file suffix -> contents (CSV artifacts)
    double mu_omega = 0.0;
    double trace = 0.0;
};

// Executes one configuration. Reads referenced input files; performs no
// output writes. Deterministic for a fixed config.
RunOutput run_experiment(const ExperimentConfig& config);

// Runs and writes <prefix>.eigs.csv / .summary.json / .timing.json plus any
// kind-specific CSVs; refuses to overwrite unless config.force.
// Returns the process exit code (0 ok, 2 NotAFrame, 3 input error).
int run_and_write(const ExperimentConfig& config);

// Runs several configs, capped by SPECLAB_THREADS (default: all at once).
int run_many(const std::vector<ExperimentConfig>& configs);

std::string format_double(double v);  // 17 significant digits, round-trip safe

} // namespace speclab

#endif
