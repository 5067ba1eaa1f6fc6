//! Event-engine throughput: full runs at fixed horizons, so one iteration
//! processes a known expected number of events (total rate (n+1)λ times the
//! horizon for baseline/capture layouts).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use aoi_gossip::{build_for, run, AdversarySpec, SimConfig, SimMode};

fn engine_runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("engine");
    for (name, n, adversary, mode) in [
        ("baseline", 10usize, AdversarySpec::None, SimMode::ExplicitCoin),
        ("baseline", 100, AdversarySpec::None, SimMode::ExplicitCoin),
        ("capture-coin", 100, AdversarySpec::node_capture(0.5), SimMode::ExplicitCoin),
        ("capture-thinned", 100, AdversarySpec::node_capture(0.5), SimMode::Thinned),
        ("mitm", 100, AdversarySpec::Mitm, SimMode::ExplicitCoin),
    ] {
        let mut cfg = SimConfig::new(n);
        cfg.adversary = adversary;
        cfg.mode = mode;
        cfg.horizon = 100.0;
        cfg.seed = 7;
        let channels = build_for(&cfg).unwrap();
        let expected_events = (channels.total_rate() * cfg.horizon) as u64;
        group.throughput(Throughput::Elements(expected_events));
        group.bench_with_input(
            BenchmarkId::new(name, n),
            &(cfg, channels),
            |b, (cfg, channels)| b.iter(|| run(cfg.clone(), channels).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, engine_runs);
criterion_main!(benches);
