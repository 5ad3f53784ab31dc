#include <benchmark/benchmark.h>

#include "des/contracts.hpp"
#include "des/ledger.hpp"
#include "des/petrinet.hpp"

using namespace des;

static void BM_Sha256HashWriter(benchmark::State& state) {
    std::string payload(static_cast<std::size_t>(state.range(0)), 'x');
    for (auto _ : state) {
        HashWriter w;
        w.field(payload);
        w.field_u64(42);
        benchmark::DoNotOptimize(w.digest());
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sha256HashWriter)->Arg(64)->Arg(1024)->Arg(16384);

static void BM_SealBlock(benchmark::State& state) {
    const std::int64_t txs = state.range(0);
    for (auto _ : state) {
        state.PauseTiming();
        auto led = ledger::Ledger::create({{"a", 1u << 30}, {"b", 0}}, nullptr).value();
        Address a = Address::from_seed("a");
        Address b = Address::from_seed("b");
        for (std::int64_t i = 1; i <= txs; ++i) {
            led.submit_transaction(ledger::make_transaction(a, b, 1, "", i));
        }
        state.ResumeTiming();
        benchmark::DoNotOptimize(led.seal_block());
    }
    state.SetItemsProcessed(state.iterations() * txs);
}
BENCHMARK(BM_SealBlock)->Arg(10)->Arg(100)->Arg(1000);

static void BM_FarmingReachability(benchmark::State& state) {
    petrinet::FarmingParams params{static_cast<std::uint64_t>(state.range(0)),
                                   static_cast<std::uint64_t>(state.range(1))};
    auto fn = petrinet::build_farming_net(params).value();
    for (auto _ : state) {
        auto graph = petrinet::reachability(fn.net, fn.initial);
        benchmark::DoNotOptimize(graph);
    }
}
BENCHMARK(BM_FarmingReachability)->Args({2, 1})->Args({10, 1})->Args({10, 3})->Args({20, 4});

static void BM_ValidateChain(benchmark::State& state) {
    auto led = ledger::Ledger::create({{"a", 1u << 30}, {"b", 0}}, nullptr).value();
    Address a = Address::from_seed("a");
    Address b = Address::from_seed("b");
    std::uint64_t nonce = 0;
    for (int block = 0; block < state.range(0); ++block) {
        for (int i = 0; i < 10; ++i) {
            led.submit_transaction(ledger::make_transaction(a, b, 1, "payload", ++nonce));
        }
        led.seal_block();
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(led.validate_chain());
    }
}
BENCHMARK(BM_ValidateChain)->Arg(10)->Arg(100);

BENCHMARK_MAIN();
