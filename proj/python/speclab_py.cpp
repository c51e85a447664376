#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "speclab/bounds.hpp"
#include "speclab/errors.hpp"
#include "speclab/experiment.hpp"
#include "speclab/fourier.hpp"
#include "speclab/gabor.hpp"
#include "speclab/lattice.hpp"
#include "speclab/spectral.hpp"
#include "speclab/version.hpp"

namespace py = pybind11;
using namespace speclab;

namespace {

std::vector<double> eig_of(const Mat& m) { return hermitian_eigenvalues(m).eigenvalues; }

// Thin result-oriented wrappers: python callers get plain lists and dicts.

py::dict gabor_spectrum_py(std::size_t length, std::size_t shift, std::size_t mod,
                           const std::string& window_spec, double cx, double cy, double r,
                           const std::vector<double>& deltas) {
    Vec window;
    if (window_spec == "gauss") {
        window = make_gauss_window(length);
    } else if (window_spec.rfind("boxcar:", 0) == 0) {
        std::size_t pos = 0;
        unsigned long width = 0;
        try {
            width = std::stoul(window_spec.substr(7), &pos);
        } catch (...) {
            throw ValidationError("boxcar width must be an integer");
        }
        if (pos != window_spec.size() - 7) throw ValidationError("boxcar width must be an integer");
        window = make_boxcar_window(length, width);
    } else {
        throw ValidationError("window must be gauss or boxcar:w");
    }
    const GaborSystem sys = build_gabor_frame(length, shift, mod, window);
    const DiscreteDomain mask = tf_mask_from_shape(sys, ContinuousDomain::disk({cx, cy}, r));
    const SpectralProfile prof = hermitian_eigenvalues(gabor_multiplier_hermitian(sys, mask));
    const double mu = mu_weighted(sys.frame, mask);

    py::dict out;
    out["eigenvalues"] = prof.eigenvalues;
    out["trace"] = prof.source_trace;
    out["mu_omega"] = mu;
    out["wexler_raz"] = sys.wexler_raz;
    py::list counts, plunges;
    for (double d : deltas) {
        counts.append(count_above(prof, d));
        if (d < 0.5) plunges.append(plunge_count(prof, d));
        else plunges.append(py::none());
    }
    out["counts"] = counts;
    out["plunges"] = plunges;
    out["hankel_s2"] = hankel_schatten(prof, 2.0);
    return out;
}

py::dict prolate_spectrum_py(std::size_t length, long k0, long k1, long t0, long t1) {
    const ProlateInstance inst = prolate_operator(length, make_interval(k0, k1, length),
                                                  make_interval(t0, t1, length));
    const SpectralProfile prof = hermitian_eigenvalues(inst.op);
    py::dict out;
    out["eigenvalues"] = prof.eigenvalues;
    out["trace"] = prof.source_trace;
    out["count_half"] = count_above(prof, 0.5);
    return out;
}

py::dict lattice_info_py(int dim, const std::vector<double>& gen) {
    const LatticeSpec lat = LatticeSpec::from_generator(dim, gen);
    py::dict out;
    out["sigma"] = lat.sigma;
    out["covolume"] = lat.covolume;
    out["condition"] = lat.condition;
    out["iota"] = lat.iota;
    return out;
}

py::dict geometry_py(int dim, const std::vector<std::vector<int>>& points, double gamma) {
    const DiscreteDomain dom = make_domain(LatticeSpec::integer(dim), points);
    py::dict out;
    out["inflation"] = inflation_constant(dom, gamma);
    out["lattice_perimeter"] = lattice_perimeter(dom);
    out["boundary_size"] = discrete_boundary(dom).size();
    return out;
}

} // namespace

PYBIND11_MODULE(_speclab, m) {
    m.doc() = "finite concentration-operator models: spectra, plunge counts, bound ingredients";
    m.attr("__version__") = kVersion;

    m.def("gabor_spectrum", &gabor_spectrum_py, py::arg("length"), py::arg("shift"),
          py::arg("mod"), py::arg("window"), py::arg("cx"), py::arg("cy"), py::arg("r"),
          py::arg("deltas"));
    m.def("prolate_spectrum", &prolate_spectrum_py, py::arg("length"), py::arg("k0"),
          py::arg("k1"), py::arg("t0"), py::arg("t1"));
    m.def("lattice_info", &lattice_info_py, py::arg("dim"), py::arg("generator"));
    m.def("geometry", &geometry_py, py::arg("dim"), py::arg("points"), py::arg("gamma"));
    m.def("log_star", &log_star, py::arg("x"));
    m.def(
        "stft_matrix",
        [](const Vec& g, const Vec& f) {
            const Mat v = stft(g, f);
            std::vector<std::vector<cplx>> rows(v.rows(), std::vector<cplx>(v.cols()));
            for (std::size_t i = 0; i < v.rows(); ++i)
                for (std::size_t j = 0; j < v.cols(); ++j) rows[i][j] = v(i, j);
            return rows;
        },
        py::arg("window"), py::arg("signal"));
    m.def(
        "hermitian_eigenvalues",
        [](const std::vector<std::vector<cplx>>& rows) {
            Mat a(rows.size(), rows.empty() ? 0 : rows[0].size());
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = 0; j < rows[i].size(); ++j) a(i, j) = rows[i][j];
            return eig_of(a);
        },
        py::arg("matrix"));
    m.def("run_config", [](const std::string& text) {
        const ExperimentConfig cfg = parse_config(text);
        return run_and_write(cfg);
    });
}
