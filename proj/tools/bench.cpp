// bench: timing of the parallel kernels against their serial reference
// implementations, verifying agreement on each run. Not part of ctest.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <vector>

#include "modl/count.hpp"
#include "modl/level1.hpp"
#include "modl/qexp.hpp"

using namespace modl;

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_once(F&& f) {
  auto t0 = Clock::now();
  f();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void row(const char* what, long long size, double serial, double parallel, bool agree) {
  std::printf("%-34s %9lld %12.4fs %12.4fs %8.2fx  %s\n", what, size, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0, agree ? "ok" : "MISMATCH");
}

int bench_qexp_mul(bool full) {
  int bad = 0;
  for (long long B : {400LL, 800LL, full ? 1600LL : 0LL}) {
    if (B == 0) continue;
    QExpansion d = delta(B);
    QExpansion ref, par;
    double ts = time_once([&] { ref = d.mul_serial(d); });
    double tp = time_once([&] { par = d * d; });
    bool agree = true;
    for (long long n = 0; n <= B && agree; ++n) agree = ref.a(n) == par.a(n);
    row("q-expansion product (exact)", B, ts, tp, agree);
    bad += !agree;
  }
  return bad;
}

int bench_residue_mul(bool full) {
  int bad = 0;
  auto r = primes_above(NumberRing::rationals(), 101)[0];
  for (long long B : {4096LL, 16384LL, full ? 65536LL : 0LL}) {
    if (B == 0) continue;
    ResidueSeries d = delta_reduced(B, r);
    ResidueSeries ref, par;
    double ts = time_once([&] { ref = d.mul_schoolbook(d); });
    double tp = time_once([&] { par = d * d; });
    bool agree = ref.equal_upto(par, B);
    row("residue series product", B, ts, tp, agree);
    bad += !agree;
  }
  return bad;
}

int bench_pi_count(bool full) {
  int bad = 0;
  auto r = primes_above(NumberRing::rationals(), 7)[0];
  long long B = full ? 400000 : 150000;
  ResidueSeries d = delta_reduced(B, r);
  std::vector<long long> grid = default_grid(B);
  CountSeries fast;
  double tp = time_once([&] { fast = pi_count(d, grid, FilterSpec::squarefree(), "delta"); });

  // serial reference: one linear scan with a sieve of smallest prime factors
  std::vector<long long> counts;
  double ts = time_once([&] {
    std::vector<int> spf(B + 1, 0);
    for (long long i = 2; i <= B; ++i)
      if (spf[i] == 0)
        for (long long j = i; j <= B; j += i)
          if (spf[j] == 0) spf[j] = (int)i;
    FilterSpec fs = FilterSpec::squarefree();
    long long c = 0;
    size_t gi = 0;
    std::vector<int> fac;
    for (long long n = 1; n <= B && gi < grid.size(); ++n) {
      fac.clear();
      long long m = n;
      while (m > 1) {
        fac.push_back(spf[m]);
        long long p = spf[m];
        while (m % p == 0) m /= p;
      }
      if (fs.admits(n, fac) && !d.a(n).is_zero()) ++c;
      if (n == grid[gi]) {
        counts.push_back(c);
        ++gi;
      }
    }
  });
  bool agree = counts == fast.counts;
  row("nonvanishing counter", B, ts, tp, agree);
  return !agree;
}

}  // namespace

int main(int argc, char** argv) {
  bool full = argc > 1 && std::strcmp(argv[1], "--full") == 0;
  std::printf("%-34s %9s %13s %13s %9s\n", "kernel", "size", "serial", "parallel", "speedup");
  int bad = 0;
  bad += bench_qexp_mul(full);
  bad += bench_residue_mul(full);
  bad += bench_pi_count(full);
  if (bad) std::printf("%d kernel(s) disagreed with the reference\n", bad);
  return bad;
}
