// Wall-clock comparison of the parallel kernels against their serial references.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "bohr/engine.hpp"
#include "bohr/rng.hpp"

using namespace bohr;

namespace {

double time_best(const std::function<void()>& fn, int reps) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-28s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  %s\n", name, serial,
              parallel, serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  const LqBall ball(3, QExponent(2.0));
  const TestBattery battery = default_battery(ball, 10, 1);
  const PreparedBattery prepared(battery, {1.5});

  {
    ClassSup a, b;
    const double s = time_best([&] { a = class_sup_serial(prepared, 0.3, ball); }, 3);
    const double p = time_best([&] { b = class_sup(prepared, 0.3, ball); }, 3);
    report("class_sup", s, p, a.value == b.value && a.argmax == b.argmax);
  }
  {
    SupOptions serial;
    serial.exec = Execution::serial;
    const Posynomial& g = prepared.members.back().majorant();
    SupResult a, b;
    const double s = time_best([&] { a = posynomial_sup(g, ball, serial); }, 3);
    const double p = time_best([&] { b = posynomial_sup(g, ball); }, 3);
    report("posynomial_sup", s, p, a.value == b.value);
  }
  {
    const LqBall small(2, QExponent(2.0));
    const TestBattery b2 = default_battery(small, 10, 1);
    ArithOptions serial;
    serial.exec = Execution::serial;
    ArithEstimate a, b;
    const double s = time_best([&] { a = arith_bohr_estimate(b2, {1.0}, serial); }, 1);
    const double p = time_best([&] { b = arith_bohr_estimate(b2, {1.0}); }, 1);
    report("arith_bohr_estimate", s, p, a.value == b.value && a.r_vec == b.r_vec);
  }
  return 0;
}
