// Serial vs parallel kernels on a refined disk. Run with SYMCOMP_THREADS=N.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "symcomp/fem.hpp"
#include "symcomp/kernels.hpp"
#include "symcomp/parallel.hpp"
#include "symcomp/rearrange.hpp"

using namespace symcomp;

namespace {

struct Fixture {
  MeshPtr mesh;
  std::vector<double> beta, f, levels;
  CsrMatrix a;

  explicit Fixture(double h) : mesh(build_mesh(shape::Disk{1.0, {}}, Manifold::plane(), h)) {
    beta.assign(mesh->boundary().size(), 1.0);
    f.resize(mesh->vertex_count());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Vec3 p = mesh->vertices()[i];
      f[i] = 1.0 - p.x * p.x - p.y * p.y + 0.1 * std::sin(5 * p.x);
    }
    levels = default_level_grid(ScalarField(mesh, f));
    a = kernels::serial::assemble_operator(*mesh, beta);
  }
};

const Fixture& fixture(int k) {
  static const Fixture coarse(0.02), fine(0.01);
  return k == 0 ? coarse : fine;
}

template <bool Parallel>
void assemble_operator(benchmark::State& st) {
  const Fixture& fx = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    CsrMatrix a = Parallel ? kernels::parallel::assemble_operator(*fx.mesh, fx.beta)
                           : kernels::serial::assemble_operator(*fx.mesh, fx.beta);
    benchmark::DoNotOptimize(a.val.data());
  }
  st.counters["vertices"] = static_cast<double>(fx.mesh->vertex_count());
}

template <bool Parallel>
void assemble_load(benchmark::State& st) {
  const Fixture& fx = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    auto b = Parallel ? kernels::parallel::assemble_load(*fx.mesh, fx.f) : kernels::serial::assemble_load(*fx.mesh, fx.f);
    benchmark::DoNotOptimize(b.data());
  }
}

template <bool Parallel>
void spmv(benchmark::State& st) {
  const Fixture& fx = fixture(static_cast<int>(st.range(0)));
  std::vector<double> y(fx.f.size());
  for (auto _ : st) {
    if (Parallel)
      kernels::parallel::spmv(fx.a, fx.f, y);
    else
      kernels::serial::spmv(fx.a, fx.f, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void superlevel(benchmark::State& st) {
  const Fixture& fx = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    auto mu = Parallel ? kernels::parallel::superlevel_measure(*fx.mesh, fx.f, fx.levels)
                       : kernels::serial::superlevel_measure(*fx.mesh, fx.f, fx.levels);
    benchmark::DoNotOptimize(mu.data());
  }
  st.counters["levels"] = static_cast<double>(fx.levels.size());
}

}  // namespace

BENCHMARK(assemble_operator<false>)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(assemble_operator<true>)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(assemble_load<false>)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(assemble_load<true>)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(spmv<false>)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(spmv<true>)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(superlevel<false>)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(superlevel<true>)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  parallel::configure_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
