use criterion::{criterion_group, criterion_main, Criterion};
use iwasawa_core::arith::max_precision;
use iwasawa_core::characters::find_eisenstein_pairs;
use iwasawa_core::lfun::{kubota_leopoldt, Convention};
use iwasawa_core::modsym::{eisenstein_quotient, Sign, SymbolRing, SymbolSpace, Twist};
use iwasawa_core::series::{diagonalize, Generator, PowerSeries};
use iwasawa_core::ExtRing;
use std::hint::black_box;

fn series(c: &mut Criterion) {
    let f = PowerSeries::from_ints(&ExtRing::zp(5, 6), &[3, 1, 4, 1, 5, 9], 6, 6);
    c.bench_function("diagonalize 5^6 X^6", |b| {
        b.iter(|| diagonalize(black_box(&f)))
    });
}

fn lfun(c: &mut Criterion) {
    let theta = find_eisenstein_pairs(5..=5, 1..=30)[0].character();
    let mp = max_precision(5);
    let g = Generator::simple(5, mp);
    let m = (mp - 4).min(10);
    c.bench_function("kubota_leopoldt p=5 X^6", |b| {
        b.iter(|| kubota_leopoldt(black_box(&theta), Convention::Main, m, 6, &g).unwrap())
    });
}

fn modsym(c: &mut Criterion) {
    c.bench_function("gamma1(37) hecke 2", |b| {
        b.iter(|| {
            let s =
                SymbolSpace::build(37, Twist::Gamma1, SymbolRing::rational(2), Sign::Plus).unwrap();
            s.hecke(2, None).unwrap()
        })
    });
    let f = find_eisenstein_pairs(7..=7, 1..=30)[0].clone();
    let theta = f.character();
    c.bench_function("eisenstein quotient", |b| {
        b.iter(|| eisenstein_quotient(f.p, black_box(&theta), 3, None).unwrap())
    });
}

criterion_group!(benches, series, lfun, modsym);
criterion_main!(benches);
