use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ratsub::rewriting::{saturate_with, MonadicSystem, SaturationOptions};
use ratsub::{compile_str, InvolutiveAlphabet};
use ratsub_bench::fixtures;

fn member(c: &mut Criterion) {
    for f in fixtures() {
        c.bench_function(&format!("member/{}", f.name), |b| {
            b.iter(|| {
                for (r, w) in &f.queries {
                    black_box(f.group.member(r, w).unwrap());
                }
            })
        });
    }
}

fn saturation(c: &mut Criterion) {
    let g = InvolutiveAlphabet::from_generators(["a", "b"]).unwrap();
    let sys = MonadicSystem::free_reduction(&g);
    let m = compile_str("(a b a' | b' b a)* (a a' | b)* b' a'", g.alphabet()).unwrap();
    c.bench_function("saturate/free_reduction", |b| {
        b.iter(|| saturate_with(black_box(&m), &sys, SaturationOptions::default()).unwrap())
    });
}

criterion_group!(benches, member, saturation);
criterion_main!(benches);
