#include "mziforge/mc_runner.hpp"

#include <cmath>
#include <exception>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mziforge {

std::vector<double> run_indexed_serial(std::size_t n, const std::function<double(std::size_t)>& f) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
}

std::vector<double> run_indexed_parallel(std::size_t n, const std::function<double(std::size_t)>& f,
                                         int threads) {
#ifdef _OPENMP
    std::vector<double> out(n);
    if (threads <= 0) threads = omp_get_max_threads();
    std::exception_ptr failure = nullptr;

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical
            {
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
#else
    (void)threads;
    return run_indexed_serial(n, f);
#endif
}

std::vector<double> run_indexed(std::size_t n, const std::function<double(std::size_t)>& f,
                                const McOptions& opt) {
    if (opt.force_serial || n < 2) return run_indexed_serial(n, f);
    return run_indexed_parallel(n, f, opt.threads);
}

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

} // namespace mziforge
