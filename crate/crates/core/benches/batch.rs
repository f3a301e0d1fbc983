use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use idxqa::codec::decode_batch;
use idxqa::metrics::evaluate_corpus_with;
use idxqa::trim::corpus_trim_stats_with;
use idxqa::{
    encode, mask_to_spans, Aggregation, AnswerSet, DisplayOffset, Exec, Granularity, IndexSequence, QaInstance, Regime,
    Representation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIZES: [usize; 2] = [1_000, 20_000];

fn strategies() -> Vec<(&'static str, Exec)> {
    let mut v = vec![("sequential", Exec::Sequential)];
    if cfg!(feature = "parallel") {
        v.push(("parallel", Exec::Parallel));
    }
    v
}

fn random_answer(r: &mut ChaCha8Rng, n: usize) -> AnswerSet {
    mask_to_spans(&(0..n).map(|_| r.gen_bool(0.1)).collect::<Vec<_>>())
}

fn corpus(size: usize, seed: u64) -> Vec<QaInstance> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|i| {
            let n = r.gen_range(50..2_000);
            let units = (0..n).map(|u| format!("t{u}")).collect();
            let gold = random_answer(&mut r, n);
            QaInstance::new(format!("q{i}"), vec![], units, Granularity::Token, Some(gold)).unwrap()
        })
        .collect()
}

fn bench_decode(c: &mut Criterion) {
    let mut g = c.benchmark_group("decode_batch");
    for size in SIZES {
        let mut r = ChaCha8Rng::seed_from_u64(7);
        let seqs: Vec<IndexSequence> = (0..size)
            .map(|i| {
                let n = r.gen_range(50..2_000);
                let mut seq = encode(
                    &random_answer(&mut r, n),
                    Representation::SpanIndex,
                    DisplayOffset::ZERO,
                );
                // a little noise so repair work is exercised
                if i % 3 == 0 {
                    seq.values.push(r.gen_range(-5..n as i64 + 5));
                    seq.values.reverse();
                }
                seq
            })
            .collect();
        for (name, exec) in strategies() {
            g.bench_with_input(BenchmarkId::new(name, size), &seqs, |b, s| {
                b.iter(|| decode_batch(black_box(s), exec))
            });
        }
    }
    g.finish();
}

fn bench_eval(c: &mut Criterion) {
    let mut g = c.benchmark_group("evaluate_corpus");
    for size in SIZES {
        let mut r = ChaCha8Rng::seed_from_u64(11);
        let data: Vec<(AnswerSet, AnswerSet, String)> = (0..size)
            .map(|i| {
                let n = r.gen_range(50..2_000);
                (random_answer(&mut r, n), random_answer(&mut r, n), format!("q{i}"))
            })
            .collect();
        let pairs: Vec<_> = data.iter().map(|(p, g, id)| (p, g, id.as_str())).collect();
        for (name, exec) in strategies() {
            g.bench_with_input(BenchmarkId::new(name, size), &pairs, |b, p| {
                b.iter(|| evaluate_corpus_with(black_box(p), Regime::PartialMatch, Aggregation::MicroOverSpans, exec))
            });
        }
    }
    g.finish();
}

fn bench_trim(c: &mut Criterion) {
    let mut g = c.benchmark_group("corpus_trim_stats");
    g.sample_size(20);
    for size in SIZES {
        let insts = corpus(size, 13);
        for (name, exec) in strategies() {
            g.bench_with_input(BenchmarkId::new(name, size), &insts, |b, i| {
                b.iter(|| corpus_trim_stats_with(black_box(i), 512, exec))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, bench_decode, bench_eval, bench_trim);
criterion_main!(benches);
