#include "speclab/fourier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include "speclab/errors.hpp"

namespace speclab {

CyclicInterval make_interval(long first, long last, std::size_t length) {
    const long L = static_cast<long>(length);
    const long f = ((first % L) + L) % L;
    const long l = ((last % L) + L) % L;
    CyclicInterval iv;
    iv.first = f;
    iv.size = static_cast<std::size_t>(((l - f) % L + L) % L) + 1;
    return iv;
}

std::vector<std::size_t> interval_indices(const CyclicInterval& iv, std::size_t length) {
    std::vector<std::size_t> idx;
    idx.reserve(iv.size);
    for (std::size_t k = 0; k < iv.size; ++k) {
        idx.push_back((static_cast<std::size_t>(iv.first) + k) % length);
    }
    return idx;
}

namespace {

// Time-domain kernel of P_I: p[t - t' mod L] = (1/L) sum_{k in I} e^{2 pi i k (t-t')/L}.
Vec projection_kernel(std::size_t length, const CyclicInterval& freq) {
    Vec p(length, cplx(0.0, 0.0));
    const double L = static_cast<double>(length);
    for (std::size_t d = 0; d < length; ++d) {
        cplx acc(0.0, 0.0);
        for (std::size_t k = 0; k < freq.size; ++k) {
            const std::size_t kk = (static_cast<std::size_t>(freq.first) + k) % length;
            acc += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(kk) *
                                       static_cast<double>(d) / L);
        }
        p[d] = acc / L;
    }
    return p;
}

} // namespace

ProlateInstance prolate_operator(std::size_t length, CyclicInterval freq, CyclicInterval time) {
    if (freq.size == 0 || time.size == 0) throw EmptyInterval("index intervals must be nonempty");
    if (freq.size > length || time.size > length) {
        throw ValidationError("interval longer than the signal length");
    }
    ProlateInstance inst;
    inst.length = length;
    inst.freq = freq;
    inst.time = time;

    const Vec p = projection_kernel(length, freq);
    const auto times = interval_indices(time, length);

    // T[t,t'] = sum_{s in J} p[t-s] p[s-t']
    inst.op = Mat(length, length);
    for (std::size_t t = 0; t < length; ++t) {
        for (std::size_t u = 0; u < length; ++u) {
            cplx acc(0.0, 0.0);
            for (std::size_t s : times) {
                acc += p[(t + length - s) % length] * p[(s + length - u) % length];
            }
            inst.op(t, u) = acc;
        }
    }
    if (hermiticity_defect(inst.op) > 1e-10 * std::max(1.0, max_abs(inst.op))) {
        throw NotHermitian("assembled concentration operator is not Hermitian");
    }
    hermitize(inst.op);
    return inst;
}

TorusKernel prolate_kernel(std::size_t length, CyclicInterval freq) {
    const Vec p = projection_kernel(length, freq);
    const double m2 = static_cast<double>(freq.size) / static_cast<double>(length);
    TorusKernel kern;
    kern.lattice = LatticeSpec::integer(1);
    kern.period = static_cast<double>(length);
    kern.sizes = {static_cast<int>(length)};
    kern.mass = m2;
    kern.q2.resize(length);
    for (std::size_t d = 0; d < length; ++d) kern.q2[d] = std::norm(p[d]) / (m2 * m2);
    return kern;
}

PlungeStudy plunge_study(const std::vector<std::size_t>& lengths,
                         const std::vector<std::size_t>& sizes, double delta,
                         unsigned max_threads) {
    if (!(delta > 0.0 && delta < 0.5)) throw DeltaOutOfRange("plunge delta must lie in (0, 1/2)");
    std::vector<std::pair<std::size_t, std::size_t>> configs;
    if (lengths.size() == sizes.size()) {
        for (std::size_t i = 0; i < lengths.size(); ++i) configs.emplace_back(lengths[i], sizes[i]);
    } else {
        for (std::size_t l : lengths)
            for (std::size_t s : sizes) configs.emplace_back(l, s);
    }

    PlungeStudy study;
    study.rows.resize(configs.size());
    study.profiles.resize(configs.size());

    auto run_one = [&](std::size_t i) {
        const auto [L, size] = configs[i];
        if (size == 0 || size > L) throw ValidationError("interval size must be in [1, L]");
        const CyclicInterval freq{0, size};
        const CyclicInterval time{0, size};
        const ProlateInstance inst = prolate_operator(L, freq, time);
        const SpectralProfile prof = hermitian_eigenvalues(inst.op);
        PlungeRow row;
        row.length = L;
        row.size_freq = size;
        row.size_time = size;
        row.trace = prof.source_trace;
        row.count_half = count_above(prof, 0.5);
        row.plunge = plunge_count(prof, delta);
        row.log_regressor = std::log(row.trace / delta);
        study.rows[i] = row;
        study.profiles[i] = prof;
    };

    const unsigned workers =
        std::min<unsigned>(std::max(1u, max_threads), static_cast<unsigned>(configs.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= configs.size()) return;
                    try {
                        run_one(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    // Least-squares fit of the plunge count against log(trace).
    const std::size_t n = study.rows.size();
    if (n >= 2) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (const PlungeRow& r : study.rows) {
            const double x = std::log(r.trace);
            const double y = static_cast<double>(r.plunge);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            syy += y * y;
        }
        const double nn = static_cast<double>(n);
        const double vxx = sxx - sx * sx / nn;
        const double vxy = sxy - sx * sy / nn;
        const double vyy = syy - sy * sy / nn;
        if (vxx > 0.0) {
            study.fit_slope = vxy / vxx;
            study.fit_intercept = (sy - study.fit_slope * sx) / nn;
            study.fit_r2 = vyy > 0.0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
        }
    }
    return study;
}

} // namespace speclab
