// Benchmark: serial reference loop vs the OpenMP Monte-Carlo runner on a
// representative accuracy-loss workload, with a result-equality check.

#include "mziforge/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace mziforge;

namespace {

double time_run(const IpnnModel& model, const Dataset& data, const ImperfectionParameterSet& p,
                std::size_t n_mc, const McOptions& opt, std::vector<double>& out) {
    const auto start = std::chrono::steady_clock::now();
    out = simulated_accuracy_loss(model, data, p, n_mc, 42, opt).per_run_accuracy;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t n_mc = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2000;
    const std::size_t classes = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 8;

    auto [model, data] = build_toy_classifier(classes);
    ImperfectionParameterSet p;
    p.sigma_phs = 0.03;
    p.sigma_bes = 0.03;
    p.corr_len = 4;
    p.sigma_il = 0.5;

    std::printf("workload: %zu-class toy, %zu Monte-Carlo iterations\n", classes, n_mc);

    McOptions serial;
    serial.force_serial = true;
    std::vector<double> ref, par;
    const double t_serial = time_run(model, data, p, n_mc, serial, ref);
    std::printf("serial reference: %8.3f s\n", t_serial);

#ifdef _OPENMP
    for (int threads : {2, 4, omp_get_max_threads()}) {
        McOptions opt;
        opt.threads = threads;
        const double t = time_run(model, data, p, n_mc, opt, par);
        const bool same = par == ref;
        std::printf("openmp x%-2d      : %8.3f s  speedup %5.2f  results %s\n", threads, t,
                    t_serial / t, same ? "identical" : "DIFFER");
        if (!same) return 1;
    }
#else
    std::printf("built without OpenMP; parallel path equals the serial one\n");
#endif
    return 0;
}
