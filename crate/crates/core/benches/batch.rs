use corrloss::circuit::build_memory_circuit;
use corrloss::decoder::{DecoderKind, DecodingContext};
use corrloss::experiment::{run_point, Execution, NoisePoint, PointSpec};
use corrloss::sim::{run_batch, simulate_shot};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const SHOTS: u64 = 256;

fn spec(d: usize, decoders: Vec<DecoderKind>) -> PointSpec {
    PointSpec {
        distance: d,
        rounds: d,
        noise: NoisePoint { p_l: 0.01, p_c: 0.5, p_d: 0.001 },
        decoders,
        min_shots: SHOTS,
        max_shots: SHOTS,
        target_errors: None,
        seed: 1,
    }
}

fn simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    group.throughput(Throughput::Elements(SHOTS));
    for d in [3, 5] {
        let circuit = build_memory_circuit(d, d).unwrap();
        let params = spec(d, Vec::new()).noise.params().unwrap();
        group.bench_with_input(BenchmarkId::new("sequential", d), &d, |b, _| {
            b.iter(|| (0..SHOTS).map(|s| simulate_shot(&circuit, &params, 1, s)).collect::<Vec<_>>().len())
        });
        group.bench_with_input(BenchmarkId::new("parallel", d), &d, |b, _| b.iter(|| run_batch(&circuit, &params, SHOTS as usize, 1).len()));
    }
    group.finish();
}

fn decode(c: &mut Criterion) {
    let mut group = c.benchmark_group("point");
    group.sample_size(10);
    group.throughput(Throughput::Elements(SHOTS));
    for d in [3, 5] {
        let s = spec(d, vec![DecoderKind::Fast, DecoderKind::Independent]);
        let ctx = DecodingContext::new(build_memory_circuit(d, d).unwrap(), s.noise.params().unwrap()).unwrap();
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, d), &d, |b, _| b.iter(|| run_point(&ctx, &s, exec).results.len()));
        }
    }
    group.finish();
}

criterion_group!(benches, simulate, decode);
criterion_main!(benches);
