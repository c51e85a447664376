#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "speclab/errors.hpp"
#include "speclab/experiment.hpp"

using namespace speclab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("speclab_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

} // namespace

TEST_CASE("minimal spectrum config parses with defaults") {
    const auto cfg = parse_config(
        "kind = spectrum\n"
        "length = 16\n"
        "shift = 2\n"
        "mod = 2\n"
        "domain = disk:8,8,4\n"
        "deltas = 0.5,0.1,0.5\n"
        "out = /tmp/x\n");
    CHECK(cfg.kind == ExperimentKind::Spectrum);
    CHECK(cfg.length == 16);
    CHECK(cfg.window_spec == "gauss");
    CHECK(cfg.seed == 0);
    // deltas deduplicated and sorted
    REQUIRE(cfg.deltas.size() == 2);
    CHECK(cfg.deltas[0] == doctest::Approx(0.1));
    CHECK(cfg.deltas[1] == doctest::Approx(0.5));
}

TEST_CASE("validation errors are aggregated and name the fields") {
    try {
        parse_config("kind = spectrum\nlength = 16\ndomain = disk:0,0,2\ndeltas = 1.5,0.2\n");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("deltas") != std::string::npos);
        CHECK(msg.find("out") != std::string::npos);  // missing prefix reported too
    }
}

TEST_CASE("parse errors carry line numbers") {
    try {
        parse_config("kind = spectrum\nthis line has no equals\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("unknown keys and kinds are rejected") {
    CHECK_THROWS_AS(parse_config("kind = spectrum\nbogus = 1\nout = /tmp/x\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("kind = warp\nout = /tmp/x\n"), ValidationError);
}

TEST_CASE("serialize / parse round-trip is idempotent with sorted keys") {
    const std::string text =
        "kind = spectrum\n"
        "out = /tmp/prefix\n"
        "length = 16\n"
        "domain = disk:8,8,4\n"
        "shift = 2\n"
        "mod = 2\n"
        "deltas = 0.5,0.1\n"
        "# trailing comment\n";
    const auto cfg = parse_config(text);
    const std::string ser = serialize_config(cfg);
    const auto cfg2 = parse_config(ser);
    CHECK(serialize_config(cfg2) == ser);

    // keys are emitted sorted
    std::istringstream in(ser);
    std::string line, prev;
    while (std::getline(in, line)) {
        const std::string key = line.substr(0, line.find(' '));
        CHECK(prev <= key);
        prev = key;
    }
}

TEST_CASE("missing referenced files fail at parse time") {
    CHECK_THROWS_AS(parse_config("kind = spectrum\nlength = 16\n"
                                 "domain = @/no/such/mask.txt\nout = /tmp/x\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config("kind = spectrum\nlength = 16\nwindow = file:@/no/such.win\n"
                                 "domain = disk:0,0,2\nout = /tmp/x\n"),
                    ValidationError);
}

TEST_CASE("spectrum run emits deterministic files with the documented schema") {
    TempDir tmp;
    ExperimentConfig cfg = parse_config(
        "kind = spectrum\nlength = 16\nshift = 2\nmod = 2\nwindow = gauss\n"
        "domain = disk:8,8,4\ndeltas = 0.1,0.5,0.9\nout = " + (tmp / "run1") + "\n");

    REQUIRE(run_and_write(cfg) == 0);
    const std::string eigs1 = slurp(tmp / "run1.eigs.csv");
    const std::string summary1 = slurp(tmp / "run1.summary.json");

    // Second run with a fresh prefix: byte-identical artifacts.
    ExperimentConfig cfg2 = cfg;
    cfg2.out_prefix = tmp / "run2";
    REQUIRE(run_and_write(cfg2) == 0);
    CHECK(slurp(tmp / "run2.eigs.csv") == eigs1);
    const std::string summary2 = slurp(tmp / "run2.summary.json");
    auto strip_prefix = [](std::string s) {
        // the config echo contains the output prefix; normalize it away
        std::size_t pos;
        while ((pos = s.find("run1")) != std::string::npos) s.replace(pos, 4, "runX");
        while ((pos = s.find("run2")) != std::string::npos) s.replace(pos, 4, "runX");
        return s;
    };
    CHECK(strip_prefix(summary1) == strip_prefix(summary2));

    // Documented field list, no extras.
    const auto j = nlohmann::json::parse(summary1);
    const std::vector<std::string> keys = {"version", "kind",       "config",  "trace",
                                           "mu_omega", "deltas",     "counts",  "plunges",
                                           "deviations", "hankel",   "frame_bounds",
                                           "wexler_raz", "geometry", "bounds",  "extra"};
    CHECK(j.size() == keys.size());
    for (const auto& k : keys) CHECK(j.contains(k));
    CHECK(j["bounds"].contains("s_grid"));
    CHECK(j["bounds"].contains("N_of_s"));
    CHECK(j["bounds"].contains("s_star"));
    CHECK(j["bounds"].contains("rhs_main"));
    CHECK(j["bounds"].contains("rhs_doubling"));
    CHECK(j["bounds"].contains("rhs_exponential"));
    CHECK(j["bounds"].contains("boundary_interaction"));
    CHECK(j["bounds"].contains("slack_factors"));
    CHECK(j["geometry"].contains("inflation"));
    CHECK(j["geometry"].contains("iota"));
    CHECK(j["geometry"].contains("lattice_perimeter"));

    // plunges: null at delta >= 1/2
    CHECK(j["plunges"][0].is_number());
    CHECK(j["plunges"][1].is_null());
    CHECK(j["plunges"][2].is_null());

    // trace equals mu within 1e-9 relative on this Gabor run
    const double trace = j["trace"].get<double>();
    const double mu = j["mu_omega"].get<double>();
    CHECK(std::abs(trace - mu) <= 1e-9 * std::max(1.0, std::abs(mu)));

    // Overwrite policy
    CHECK(run_and_write(cfg) == 3);
    cfg.force = true;
    CHECK(run_and_write(cfg) == 0);
}

TEST_CASE("eigenvalue CSV round-trips doubles through 17 significant digits") {
    TempDir tmp;
    const ExperimentConfig cfg = parse_config(
        "kind = prolate\nlength = 16\nfreq = 0,7\ntime = 0,7\ndelta = 0.1\n"
        "deltas = 0.5\nout = " + (tmp / "pr") + "\n");
    REQUIRE(run_and_write(cfg) == 0);
    std::ifstream in(tmp / "pr.eigs.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "index,eigenvalue");
    std::string line;
    double sum = 0.0;
    int rows = 0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const double v = std::stod(line.substr(comma + 1));
        const std::string re_emitted = format_double(v);
        CHECK(re_emitted == line.substr(comma + 1));
        sum += v;
        ++rows;
    }
    CHECK(rows == 16);
    CHECK(sum == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("NotAFrame run exits 2, unknown kind exits 3") {
    TempDir tmp;
    const ExperimentConfig bad = parse_config(
        "kind = spectrum\nlength = 16\nshift = 4\nmod = 4\nwindow = gauss\n"
        "domain = disk:8,8,4\ndeltas = 0.5\nout = " + (tmp / "bad") + "\n");
    CHECK(run_and_write(bad) == 2);
    CHECK_THROWS_AS(parse_config("kind = nonsense\nout = /tmp/x\n"), ValidationError);
}

TEST_CASE("refine run produces per-rung artifacts") {
    TempDir tmp;
    const ExperimentConfig cfg = parse_config(
        "kind = refine\nlength = 32\nwindow = gauss\ndomain = disk:16,16,6\n"
        "ladder = 4,4;2,2\ndeltas = 0.5\nout = " + (tmp / "rf") + "\n");
    REQUIRE(run_and_write(cfg) == 0);
    const std::string rows = slurp(tmp / "rf.refine.csv");
    CHECK(rows.find("L,a,b,delta,count,mu_omega,deviation,plunge,n_gamma,rhs_main") == 0);
    // one row per (rung, delta)
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 3);

    const auto j = nlohmann::json::parse(slurp(tmp / "rf.summary.json"));
    REQUIRE(j["extra"]["rungs"].size() == 2);
    CHECK(j["extra"]["rungs"][0]["frame_ok"].get<bool>());
    CHECK(j["trace"].is_number());  // finest rung lifted to the top level
}

TEST_CASE("mixed run with window files") {
    TempDir tmp;
    const std::string wfile = tmp / "windows.txt";
    {
        std::ofstream w(wfile);
        w << "8 2\n";
        // e0 and e1
        for (int t = 0; t < 8; ++t) w << (t == 0 ? 1 : 0) << " 0\n";
        for (int t = 0; t < 8; ++t) w << (t == 1 ? 1 : 0) << " 0\n";
    }
    const std::string vfile = tmp / "weights.txt";
    {
        std::ofstream v(vfile);
        const std::string w = format_double(1.0 / std::sqrt(2.0));
        v << w << " 0\n" << w << " 0\n";
    }
    const ExperimentConfig cfg = parse_config(
        "kind = mixed\nlength = 8\nwindows = @" + wfile + "\nweights = @" + vfile +
        "\ndomain = rect:0,0,3.5,7\ndeltas = 0.5\nout = " + (tmp / "mx") + "\n");
    REQUIRE(run_and_write(cfg) == 0);
    const auto j = nlohmann::json::parse(slurp(tmp / "mx.summary.json"));
    // half-plane: 4x8 = 32 points of mass 1/8
    CHECK(j["trace"].get<double>() == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(j["mu_omega"].get<double>() == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("prolate-study emits the documented csv columns") {
    TempDir tmp;
    const ExperimentConfig cfg = parse_config(
        "kind = prolate-study\nlengths = 32,64\nsizes = 8,16\ndelta = 0.1\nout = " +
        (tmp / "st") + "\n");
    REQUIRE(run_and_write(cfg) == 0);
    const std::string rows = slurp(tmp / "st.study.csv");
    CHECK(rows.find("L,size_I,size_J,trace,count_half,plunge,log_regressor") == 0);
    const auto j = nlohmann::json::parse(slurp(tmp / "st.summary.json"));
    CHECK(j["extra"].contains("fit_slope"));
    CHECK(j["extra"].contains("fit_r2"));
    CHECK(j["extra"]["rows"].size() == 2);
}

TEST_CASE("dilate run emits per-factor profiles plus the combined csv") {
    TempDir tmp;
    const ExperimentConfig cfg = parse_config(
        "kind = dilate\nlength = 16\nshift = 2\nmod = 2\nwindow = gauss\n"
        "domain = disk:8,8,2\nfactors = 1,2,3\ndeltas = 0.5\nout = " + (tmp / "dl") + "\n");
    REQUIRE(run_and_write(cfg) == 0);
    CHECK(fs::exists(tmp / "dl.f1.eigs.csv"));
    CHECK(fs::exists(tmp / "dl.f2.eigs.csv"));
    CHECK(fs::exists(tmp / "dl.f3.eigs.csv"));
    const std::string combined = slurp(tmp / "dl.dilate.csv");
    CHECK(combined.find("factor,perimeter,delta,count,mu_omega,deviation") == 0);
    CHECK(std::count(combined.begin(), combined.end(), '\n') == 4);
}

TEST_CASE("malformed shape and window specs exit as input errors") {
    TempDir tmp;
    for (const std::string& domain : {std::string("disk:a,b,c"), std::string("rect:1,2,x,4"),
                                      std::string("disk:1,2"), std::string("blob:1,2,3")}) {
        const ExperimentConfig cfg = parse_config(
            "kind = spectrum\nlength = 16\nshift = 2\nmod = 2\ndomain = " + domain +
            "\ndeltas = 0.5\nout = " + (tmp / "z") + "\n");
        CHECK(run_and_write(cfg) == 3);
    }
    const ExperimentConfig cfg = parse_config(
        "kind = spectrum\nlength = 16\nshift = 2\nmod = 2\nwindow = boxcar:wide\n"
        "domain = disk:8,8,3\ndeltas = 0.5\nout = " + (tmp / "z") + "\n");
    CHECK(run_and_write(cfg) == 3);
}

TEST_CASE("run_many executes several configs and reports the worst exit code") {
    TempDir tmp;
    std::vector<ExperimentConfig> configs;
    configs.push_back(parse_config(
        "kind = prolate\nlength = 16\nfreq = 0,3\ntime = 0,7\ndelta = 0.1\ndeltas = 0.5\n"
        "out = " + (tmp / "m1") + "\n"));
    configs.push_back(parse_config(
        "kind = spectrum\nlength = 16\nshift = 2\nmod = 2\ndomain = disk:8,8,4\n"
        "deltas = 0.5\nout = " + (tmp / "m2") + "\n"));
    CHECK(run_many(configs) == 0);
    CHECK(fs::exists(tmp / "m1.summary.json"));
    CHECK(fs::exists(tmp / "m2.summary.json"));

    // A NotAFrame config dominates the exit code.
    configs.push_back(parse_config(
        "kind = spectrum\nlength = 16\nshift = 4\nmod = 4\ndomain = disk:8,8,4\n"
        "deltas = 0.5\nout = " + (tmp / "m3") + "\n"));
    for (auto& c : configs) c.force = true;
    CHECK(run_many(configs) == 2);
}

TEST_CASE("timing sidecar is the only file allowed to differ between reruns") {
    TempDir tmp;
    ExperimentConfig cfg = parse_config(
        "kind = prolate\nlength = 16\nfreq = 0,3\ntime = 0,7\ndelta = 0.1\n"
        "deltas = 0.3\nforce = true\nout = " + (tmp / "t1") + "\n");
    REQUIRE(run_and_write(cfg) == 0);
    const std::string before_sum = slurp(tmp / "t1.summary.json");
    const std::string before_eigs = slurp(tmp / "t1.eigs.csv");
    REQUIRE(run_and_write(cfg) == 0);
    CHECK(slurp(tmp / "t1.summary.json") == before_sum);
    CHECK(slurp(tmp / "t1.eigs.csv") == before_eigs);
    CHECK(fs::exists(tmp / "t1.timing.json"));
}
