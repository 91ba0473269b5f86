#include <benchmark/benchmark.h>

#include "spanwalk/estimator.hpp"
#include "spanwalk/gate_catalog.hpp"
#include "spanwalk/witness.hpp"

using namespace spanwalk;

namespace {

const SpanProgram& depthTwoProgram() {
    static const SpanProgram p =
        formulaProgram(parseFormula("MAJ(MAJ(x1,x2,x3),MAJ(x4,x5,x6),MAJ(x7,x8,x9))"));
    return p;
}

const PreparedFormula& depthOne() {
    static const PreparedFormula p = prepareFormula(parseFormula("MAJ(x1,x2,x3)"), loadDefaultConfig());
    return p;
}

PhaseSpectrum wideSpectrum() {
    PhaseSpectrum s;
    s.theta = VectorXd::LinSpaced(400, -3.1, 3.1);
    s.weight = VectorXd::Constant(400, 1.0 / 400);
    return s;
}

}  // namespace

static void BM_WitnessExtremes(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(witnessExtremes(depthTwoProgram()));
}
static void BM_WitnessExtremesSerial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(witnessExtremesSerial(depthTwoProgram()));
}

static void BM_EvaluateAll(benchmark::State& st) {
    const auto cfg = loadDefaultConfig();
    for (auto _ : st) benchmark::DoNotOptimize(evaluateAll(depthOne(), cfg));
}
static void BM_EvaluateAllSerial(benchmark::State& st) {
    const auto cfg = loadDefaultConfig();
    for (auto _ : st) benchmark::DoNotOptimize(evaluateAllSerial(depthOne(), cfg));
}

static void BM_Acceptance(benchmark::State& st) {
    const PhaseSpectrum s = wideSpectrum();
    PhaseEstimationConfig pe;
    pe.deltaP = 0.01;
    pe.padding = int(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(acceptanceProbability(s, pe));
}
static void BM_AcceptanceSerial(benchmark::State& st) {
    const PhaseSpectrum s = wideSpectrum();
    PhaseEstimationConfig pe;
    pe.deltaP = 0.01;
    pe.padding = int(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(acceptanceProbabilitySerial(s, pe));
}

BENCHMARK(BM_WitnessExtremes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WitnessExtremesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateAll)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateAllSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Acceptance)->Arg(0)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AcceptanceSerial)->Arg(0)->Arg(4)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
