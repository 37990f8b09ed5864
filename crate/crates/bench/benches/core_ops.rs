use arithdyn_core::beta_core::{expansion_of_one, greedy_expand, Beta, Real};
use arithdyn_core::beta_count::{count_equivalent_words, goldenshift};
use arithdyn_core::digits::DigitSeq;
use arithdyn_core::exactnum::fields;
use arithdyn_core::rotation::{integer_encode1, ostrowski_encode, psi2, ContinuedFraction};
use arithdyn_core::toral::{bac_search, f_form};
use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;
use num_rational::BigRational;

fn field_arithmetic(c: &mut Criterion) {
    let f = fields::tribonacci();
    let b = f.gen_element();
    c.bench_function("field_mul_inverse_tribonacci", |bench| {
        bench.iter(|| {
            let x = black_box(&b).pow(7).add(&b);
            black_box(x.inverse().unwrap().mul(&x))
        })
    });
}

fn greedy_expansion(c: &mut Criterion) {
    let beta = Beta::golden();
    let x = Real::from_rat_in(&beta, BigRational::new(BigInt::from(13), BigInt::from(29)));
    c.bench_function("greedy_expand_golden_200", |bench| {
        bench.iter(|| greedy_expand(black_box(&x), &beta, 200).unwrap())
    });
    c.bench_function("expansion_of_one_plastic", |bench| {
        let b = Beta::plastic();
        bench.iter(|| expansion_of_one(black_box(&b)).unwrap())
    });
}

fn word_counting(c: &mut Criterion) {
    // admissible golden word: no two consecutive ones
    let mut w = Vec::new();
    for i in 0..40 {
        w.push(u32::from(i % 3 == 0));
    }
    c.bench_function("count_equivalent_words_len40", |bench| {
        bench.iter(|| count_equivalent_words(black_box(&w)).unwrap())
    });
    let seq = DigitSeq::eventually_periodic(1, vec![0, 1, 0], vec![0, 0, 1]);
    c.bench_function("goldenshift", |bench| {
        bench.iter(|| goldenshift(black_box(&seq)).unwrap())
    });
}

fn rotational(c: &mut Criterion) {
    let cf = ContinuedFraction::from_quotients(vec![], vec![2]).unwrap();
    let x = Real::Rat(BigRational::new(BigInt::from(355), BigInt::from(1130)));
    c.bench_function("ostrowski_encode_depth40", |bench| {
        bench.iter(|| {
            let d = ostrowski_encode(black_box(&cf), &x, 40).unwrap();
            psi2(&cf, &d).unwrap()
        })
    });
    let n = BigInt::from(987_654_321i64);
    c.bench_function("integer_encode1_large", |bench| {
        bench.iter(|| integer_encode1(black_box(&cf), &n).unwrap())
    });
}

fn toral_forms(c: &mut Criterion) {
    let m: Vec<Vec<BigInt>> = vec![
        vec![BigInt::from(2), BigInt::from(1), BigInt::from(1)],
        vec![BigInt::from(1), BigInt::from(1), BigInt::from(0)],
        vec![BigInt::from(1), BigInt::from(0), BigInt::from(1)],
    ];
    let n = vec![BigInt::from(3), BigInt::from(-2), BigInt::from(1)];
    c.bench_function("f_form_3x3", |bench| {
        bench.iter(|| f_form(black_box(&m), &n).unwrap())
    });
    let fib: Vec<Vec<BigInt>> = vec![
        vec![BigInt::from(1), BigInt::from(1)],
        vec![BigInt::from(1), BigInt::from(0)],
    ];
    c.bench_function("bac_search_fib_bound4", |bench| {
        bench.iter(|| bac_search(black_box(&fib), 4).unwrap())
    });
}

criterion_group!(
    benches,
    field_arithmetic,
    greedy_expansion,
    word_counting,
    rotational,
    toral_forms
);
criterion_main!(benches);
