#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mziforge {

/// Execution knobs for index-parallel work. threads == 0 picks the
/// available parallelism; force_serial runs the plain reference loop.
struct McOptions {
    int threads = 0;
    bool force_serial = false;
};

/// Plain sequential reference: out[i] = f(i).
std::vector<double> run_indexed_serial(std::size_t n, const std::function<double(std::size_t)>& f);

/// OpenMP version of the same contract. Every index owns its own random
/// stream, so the result vector is identical to the serial one whatever
/// the schedule or thread count.
std::vector<double> run_indexed_parallel(std::size_t n, const std::function<double(std::size_t)>& f,
                                         int threads);

std::vector<double> run_indexed(std::size_t n, const std::function<double(std::size_t)>& f,
                                const McOptions& opt);

/// Mean and sample standard deviation accumulated in index order.
struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};
MeanStd mean_std(const std::vector<double>& values);

} // namespace mziforge
