use criterion::{criterion_group, criterion_main, Criterion};
use dpcyl::sample::random_ample;
use dpcyl::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn lattice(c: &mut Criterion) {
    c.bench_function("enumerate (-1)-classes k=6", |b| {
        b.iter(|| enumerate_classes(black_box(6), -1, -1).unwrap())
    });
    c.bench_function("enumerate (-2)-classes k=6", |b| {
        b.iter(|| enumerate_classes(black_box(6), -2, 0).unwrap())
    });
}

fn fibrations(c: &mut Criterion) {
    let s = catalog_surface(3, "A2+2A1", None).unwrap();
    c.bench_function("select_fibration 3/A2+2A1", |b| b.iter(|| select_fibration(black_box(&s)).unwrap()));
    c.bench_function("table regeneration", |b| b.iter(regenerate_table));
}

fn cylinders(c: &mut Criterion) {
    let mut group = c.benchmark_group("cylinder");
    for key in ["3/A2+2A1", "3/4A1", "4/2A1/8lines", "4/smooth"] {
        let (d, t, v) = catalog::parse_key(key).unwrap();
        let s = catalog_surface(d, &t, v.as_deref()).unwrap();
        let planner = Planner::new(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let hs: Vec<ClassOnS> = (0..16).map(|_| random_ample(&s, &mut rng, 6, 100_000).unwrap()).collect();
        let certs: Vec<_> = hs.iter().map(|h| planner.construct(h, &Options::default()).unwrap()).collect();
        group.bench_function(format!("construct {key}"), |b| {
            b.iter(|| {
                for h in &hs {
                    black_box(planner.construct(h, &Options::default()).unwrap());
                }
            })
        });
        group.bench_function(format!("verify {key}"), |b| {
            b.iter(|| {
                for (h, cert) in hs.iter().zip(&certs) {
                    assert!(verify_certificate(&s, h, cert).accepted());
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, lattice, fibrations, cylinders);
criterion_main!(benches);
