// Times the serial reference sweep against the OpenMP sweep on a few
// representative workloads and prints a comparison table. The two paths must
// agree on every count; this doubles as an end-to-end consistency run.

#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "efg/strategy.hpp"
#include "efg/sweep.hpp"

using namespace efg;

namespace {

struct Workload {
    std::string name;
    int s, k, m;
    std::uint64_t random_lines; // 0: exhaustive
};

int run(const Workload& w) {
    Tree t1 = build_construction(Role::T1, w.s, w.k, w.m);
    Tree t2 = build_construction(Role::T2, w.s, w.k, w.m);
    GameInstance g{BoardView::whole(t1), BoardView::whole(t2), FixedBatches{w.s, w.k}, {}};
    auto strat = PaperStrategy::make(g);

    SweepLimits limits;
    limits.max_lines = 200'000'000;
    SweepReport serial, parallel;
    if (w.random_lines == 0) {
        serial = exhaustive_sweep_serial(g, *strat, limits);
        parallel = exhaustive_sweep_parallel(g, *strat, limits);
    } else {
        serial = random_sweep_serial(g, *strat, w.random_lines, 20240915);
        parallel = random_sweep_parallel(g, *strat, w.random_lines, 20240915);
    }

    const bool same = serial.lines == parallel.lines && serial.losses == parallel.losses;
    std::printf("%-28s %10llu %8llu %10.3fs %10.3fs %7.2fx %3d  %s\n", w.name.c_str(),
                static_cast<unsigned long long>(serial.lines),
                static_cast<unsigned long long>(serial.losses), serial.wall_seconds,
                parallel.wall_seconds,
                parallel.wall_seconds > 0 ? serial.wall_seconds / parallel.wall_seconds : 0.0,
                parallel.threads, same ? "ok" : "MISMATCH");
    return same ? 0 : 1;
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not available; both columns run serially.\n");
#endif
    std::printf("%-28s %10s %8s %11s %11s %8s %4s\n", "workload", "lines", "losses", "serial",
                "parallel", "speedup", "thr");

    int rc = 0;
    rc |= run({"exhaustive (1,2,2) batches", 1, 2, 2, 0});
    rc |= run({"exhaustive (2,1,2) batches", 2, 1, 2, 0});
    rc |= run({"exhaustive (3,1,3) batches", 3, 1, 3, 0}); // ~2.7e7 lines
    rc |= run({"random 1e5 (2,2,4)", 2, 2, 4, 100'000});
    rc |= run({"random 1e5 (3,1,3)", 3, 1, 3, 100'000});
    return rc;
}
