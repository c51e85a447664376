#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "speclab/errors.hpp"
#include "speclab/experiment.hpp"
#include "speclab/version.hpp"

namespace {

using speclab::ExperimentConfig;
using speclab::ExperimentKind;

struct CommonFlags {
    std::string deltas;
    std::string out;
    std::string s_grid;
    double gamma = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    unsigned long seed = 0;
    bool force = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_deltas = true) {
    if (with_deltas) cmd->add_option("--deltas", flags.deltas, "comma separated thresholds in (0,1)");
    cmd->add_option("--out", flags.out, "output prefix")->required();
    cmd->add_option("--s-grid", flags.s_grid, "comma separated s values for the bound infimum");
    cmd->add_option("--gamma", flags.gamma, "inflation rate override");
    cmd->add_option("--alpha", flags.alpha, "exponential decay rate");
    cmd->add_option("--beta", flags.beta, "exponential decay stretching");
    cmd->add_option("--seed", flags.seed, "random seed echoed into the summary");
    cmd->add_flag("--force", flags.force, "overwrite existing outputs");
}

// Reuse the config-file pipeline so flags and files validate identically.
ExperimentConfig config_from_lines(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string text;
    for (const auto& [k, v] : kv) {
        if (!v.empty()) text += k + " = " + v + "\n";
    }
    return speclab::parse_config(text);
}

void append_common(std::vector<std::pair<std::string, std::string>>& kv, const CommonFlags& f) {
    if (!f.deltas.empty()) kv.emplace_back("deltas", f.deltas);
    kv.emplace_back("out", f.out);
    if (!f.s_grid.empty()) kv.emplace_back("s_grid", f.s_grid);
    if (f.gamma > 0.0) kv.emplace_back("gamma", speclab::format_double(f.gamma));
    if (f.alpha > 0.0) kv.emplace_back("alpha", speclab::format_double(f.alpha));
    if (f.beta > 0.0) kv.emplace_back("beta", speclab::format_double(f.beta));
    kv.emplace_back("seed", std::to_string(f.seed));
    if (f.force) kv.emplace_back("force", "true");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite models of concentration operators: spectra, plunge counts and bound ingredients"};
    app.set_version_flag("--version", std::string(speclab::kVersion));
    app.require_subcommand(0, 1);

    // spectrum -----------------------------------------------------------
    struct SpectrumArgs {
        std::size_t length = 0, shift = 1, mod = 1;
        std::string window = "gauss", domain, frame;
    };
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalue profile of one multiplier");
    SpectrumArgs sp;
    CommonFlags sp_common;
    spectrum->add_option("--length", sp.length, "signal length L");
    spectrum->add_option("--shift", sp.shift, "time step a");
    spectrum->add_option("--mod", sp.mod, "frequency step b");
    spectrum->add_option("--window", sp.window, "gauss | boxcar:w | file:@path");
    spectrum->add_option("--domain", sp.domain, "shape spec or @maskfile")->required();
    spectrum->add_option("--frame", sp.frame, "generic frame import (@file)");
    add_common(spectrum, sp_common);

    // bounds ------------------------------------------------------------
    auto* bounds = app.add_subcommand("bounds", "bound ingredients for one multiplier");
    SpectrumArgs bo;
    CommonFlags bo_common;
    bounds->add_option("--length", bo.length, "signal length L");
    bounds->add_option("--shift", bo.shift, "time step a");
    bounds->add_option("--mod", bo.mod, "frequency step b");
    bounds->add_option("--window", bo.window, "gauss | boxcar:w | file:@path");
    bounds->add_option("--domain", bo.domain, "shape spec or @maskfile")->required();
    bounds->add_option("--frame", bo.frame, "generic frame import (@file)");
    add_common(bounds, bo_common);

    // refine --------------------------------------------------------------
    auto* refine = app.add_subcommand("refine", "lattice refinement stability study");
    struct {
        std::size_t length = 0;
        std::string window = "gauss", domain, ladder;
    } rf;
    CommonFlags rf_common;
    refine->add_option("--length", rf.length, "signal length L")->required();
    refine->add_option("--window", rf.window, "gauss | boxcar:w | file:@path");
    refine->add_option("--domain", rf.domain, "shape spec")->required();
    refine->add_option("--ladder", rf.ladder, "semicolon separated a,b rungs")->required();
    add_common(refine, rf_common);

    // dilate --------------------------------------------------------------
    auto* dilate = app.add_subcommand("dilate", "isotropic dilation study");
    struct {
        std::size_t length = 0, shift = 1, mod = 1;
        std::string window = "gauss", domain, factors;
    } dl;
    CommonFlags dl_common;
    dilate->add_option("--length", dl.length, "signal length L")->required();
    dilate->add_option("--shift", dl.shift, "time step a");
    dilate->add_option("--mod", dl.mod, "frequency step b");
    dilate->add_option("--window", dl.window, "gauss | boxcar:w | file:@path");
    dilate->add_option("--domain", dl.domain, "shape spec")->required();
    dilate->add_option("--factors", dl.factors, "comma separated scale factors")->required();
    add_common(dilate, dl_common);

    // mixed ---------------------------------------------------------------
    auto* mixed = app.add_subcommand("mixed", "mixed-state localization operator");
    struct {
        std::size_t length = 0;
        std::string windows, weights, domain;
    } mx;
    CommonFlags mx_common;
    mixed->add_option("--length", mx.length, "signal length L")->required();
    mixed->add_option("--windows", mx.windows, "@file with the orthonormal family")->required();
    mixed->add_option("--weights", mx.weights, "@file with the weight amplitudes")->required();
    mixed->add_option("--domain", mx.domain, "shape spec or @maskfile")->required();
    add_common(mixed, mx_common);

    // prolate ---------------------------------------------------------------
    auto* prolate = app.add_subcommand("prolate", "Fourier concentration operator");
    struct {
        std::size_t length = 0;
        std::string freq, time;
        double delta = 0.1;
    } pr;
    CommonFlags pr_common;
    prolate->add_option("--length", pr.length, "signal length L")->required();
    prolate->add_option("--freq", pr.freq, "frequency interval k0,k1")->required();
    prolate->add_option("--time", pr.time, "time interval t0,t1")->required();
    prolate->add_option("--delta", pr.delta, "plunge threshold in (0,1/2)");
    add_common(prolate, pr_common);

    // prolate-study -----------------------------------------------------------
    auto* study = app.add_subcommand("prolate-study", "plunge growth across lengths");
    struct {
        std::string lengths, sizes;
        double delta = 0.1;
    } st;
    CommonFlags st_common;
    study->add_option("--lengths", st.lengths, "comma separated signal lengths")->required();
    study->add_option("--sizes", st.sizes, "comma separated interval sizes")->required();
    study->add_option("--delta", st.delta, "plunge threshold in (0,1/2)");
    add_common(study, st_common, false);

    // run ---------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "run configuration files");
    std::vector<std::string> config_files;
    run->add_option("--config", config_files, "config file (repeatable)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        std::vector<std::pair<std::string, std::string>> kv;
        if (spectrum->parsed() || bounds->parsed()) {
            const auto& s = spectrum->parsed() ? sp : bo;
            const auto& common = spectrum->parsed() ? sp_common : bo_common;
            kv.emplace_back("kind", spectrum->parsed() ? "spectrum" : "bounds");
            if (s.length > 0) kv.emplace_back("length", std::to_string(s.length));
            kv.emplace_back("shift", std::to_string(s.shift));
            kv.emplace_back("mod", std::to_string(s.mod));
            kv.emplace_back("window", s.window);
            kv.emplace_back("domain", s.domain);
            if (!s.frame.empty()) kv.emplace_back("frame", s.frame);
            append_common(kv, common);
            return speclab::run_and_write(config_from_lines(kv));
        }
        if (refine->parsed()) {
            kv.emplace_back("kind", "refine");
            kv.emplace_back("length", std::to_string(rf.length));
            kv.emplace_back("window", rf.window);
            kv.emplace_back("domain", rf.domain);
            kv.emplace_back("ladder", rf.ladder);
            append_common(kv, rf_common);
            return speclab::run_and_write(config_from_lines(kv));
        }
        if (dilate->parsed()) {
            kv.emplace_back("kind", "dilate");
            kv.emplace_back("length", std::to_string(dl.length));
            kv.emplace_back("shift", std::to_string(dl.shift));
            kv.emplace_back("mod", std::to_string(dl.mod));
            kv.emplace_back("window", dl.window);
            kv.emplace_back("domain", dl.domain);
            kv.emplace_back("factors", dl.factors);
            append_common(kv, dl_common);
            return speclab::run_and_write(config_from_lines(kv));
        }
        if (mixed->parsed()) {
            kv.emplace_back("kind", "mixed");
            kv.emplace_back("length", std::to_string(mx.length));
            kv.emplace_back("windows", mx.windows);
            kv.emplace_back("weights", mx.weights);
            kv.emplace_back("domain", mx.domain);
            append_common(kv, mx_common);
            return speclab::run_and_write(config_from_lines(kv));
        }
        if (prolate->parsed()) {
            kv.emplace_back("kind", "prolate");
            kv.emplace_back("length", std::to_string(pr.length));
            kv.emplace_back("freq", pr.freq);
            kv.emplace_back("time", pr.time);
            kv.emplace_back("delta", speclab::format_double(pr.delta));
            append_common(kv, pr_common);
            return speclab::run_and_write(config_from_lines(kv));
        }
        if (study->parsed()) {
            kv.emplace_back("kind", "prolate-study");
            kv.emplace_back("lengths", st.lengths);
            kv.emplace_back("sizes", st.sizes);
            kv.emplace_back("delta", speclab::format_double(st.delta));
            append_common(kv, st_common);
            return speclab::run_and_write(config_from_lines(kv));
        }
        if (run->parsed()) {
            std::vector<ExperimentConfig> configs;
            for (const std::string& path : config_files) {
                std::ifstream in(path);
                if (!in) {
                    std::fprintf(stderr, "error: cannot open config %s\n", path.c_str());
                    return 3;
                }
                std::ostringstream ss;
                ss << in.rdbuf();
                configs.push_back(speclab::parse_config(ss.str()));
            }
            return speclab::run_many(configs);
        }
        std::fprintf(stderr, "%s\n", app.help().c_str());
        return 3;
    } catch (const speclab::NotAFrame& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const speclab::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const speclab::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const speclab::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
