use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;

fn xring() -> Arc<Ring> {
    Ring::new(&X_VARS).unwrap()
}

fn x(r: &Arc<Ring>, i: usize) -> Polynomial {
    Polynomial::var_at(r, i)
}

fn c(r: &Arc<Ring>, n: i64) -> Polynomial {
    Polynomial::constant(r, Rational::from_int(n))
}

// Written out by hand from the two displayed formulas.
fn hand_i(r: &Arc<Ring>) -> Polynomial {
    &(&(&x(r, 0) * &x(r, 4)) - &(&c(r, 4) * &(&x(r, 1) * &x(r, 3)))) + &(&c(r, 3) * &x(r, 2).pow(2))
}

fn hand_j(r: &Arc<Ring>) -> Polynomial {
    // cofactor expansion along the first row
    let m = |a: usize, b: usize, cc: usize, d: usize| &(&x(r, a) * &x(r, b)) - &(&x(r, cc) * &x(r, d));
    &(&(&x(r, 0) * &m(2, 4, 3, 3)) - &(&x(r, 1) * &m(1, 4, 2, 3))) + &(&x(r, 2) * &m(1, 3, 2, 2))
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| Rational::new(rng.gen_range(-20..=20), rng.gen_range(1..=9)))
        .collect()
}

fn pt(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&k| Rational::from_int(k)).collect()
}

#[test]
fn add_examples() {
    let r = xring();
    assert!((&x(&r, 0) + &(-&x(&r, 0))).is_zero());
    let s = &(&x(&r, 0) * &x(&r, 4)) + &(&c(&r, 3) * &x(&r, 2).pow(2));
    assert_eq!(s.num_terms(), 2);
    assert_eq!(s.total_degree(), Some(2));

    let sum = &hand_i(&r) + &hand_j(&r);
    let parts = sum.homogeneous_components(&[0, 1, 2, 3, 4]);
    assert_eq!(sum.total_degree(), Some(3));
    assert_eq!(parts[&2].num_terms(), 3);
    assert_eq!(parts[&3].num_terms(), 5);
}

#[test]
fn ring_mismatch_is_an_error() {
    let a = Polynomial::var(&Ring::new(&["a"]).unwrap(), "a").unwrap();
    let b = Polynomial::var(&Ring::new(&["b"]).unwrap(), "b").unwrap();
    assert!(matches!(a.checked_add(&b), Err(PolyError::RingMismatch { .. })));
    assert!(matches!(a.checked_mul(&b), Err(PolyError::RingMismatch { .. })));
}

#[test]
fn mul_and_pow_against_pointwise_oracle() {
    let r = xring();
    let j = hand_j(&r);
    assert_eq!(&x(&r, 0) * &x(&r, 4), Polynomial::from_terms(&r, [(vec![1, 0, 0, 0, 1], Rational::one())]).unwrap());
    assert!((&j * &Polynomial::zero(&r)).is_zero());

    let j2 = &j * &j;
    let j4 = j.pow(4);
    assert_eq!(j2.total_degree(), Some(6));
    assert_eq!(j4.total_degree(), Some(12));
    assert!(j4.is_homogeneous_in(&[0, 1, 2, 3, 4]));
    assert!(j.pow(0).is_one());
    assert_eq!(x(&r, 0).pow(13).num_terms(), 1);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let p = random_point(&mut rng, 5);
        let jv = j.evaluate(&p).unwrap();
        assert_eq!(j2.evaluate(&p).unwrap(), jv.pow(2));
        assert_eq!(j4.evaluate(&p).unwrap(), jv.pow(4));
    }
}

#[test]
fn substitute_examples() {
    let r = xring();
    let f = &x(&r, 0) * &x(&r, 4);
    let swap: HashMap<String, Polynomial> =
        [("x0".to_string(), x(&r, 4)), ("x4".to_string(), x(&r, 0))].into();
    assert_eq!(f.substitute(&swap, &r).unwrap(), f);

    let ur = Ring::new(&["u"]).unwrap();
    let u = Polynomial::var(&ur, "u").unwrap();
    let quartic: HashMap<String, Polynomial> =
        (0..5).map(|k| (format!("x{k}"), u.pow(k as u32))).collect();
    assert!(hand_i(&r).substitute(&quartic, &ur).unwrap().is_zero());
    assert!(hand_j(&r).substitute(&quartic, &ur).unwrap().is_zero());

    // unbound variables must exist in the target ring
    let partial: HashMap<String, Polynomial> = [("x0".to_string(), u.clone())].into();
    assert!(matches!(
        f.substitute(&partial, &ur),
        Err(PolyError::UnknownVariable(_))
    ));
}

#[test]
fn evaluate_examples() {
    let r = xring();
    assert_eq!(hand_i(&r).evaluate(&pt(&[1, 0, 0, 0, 1])).unwrap(), Rational::one());
    assert_eq!(hand_j(&r).evaluate(&pt(&[0, 0, 1, 0, 0])).unwrap(), Rational::from_int(-1));
    assert!(x(&r, 0).evaluate(&pt(&[0, 3, 1, 4, 1])).unwrap().is_zero());

    let named: HashMap<String, Rational> = [("x0".to_string(), Rational::one())].into();
    assert!(matches!(
        hand_i(&r).evaluate_named(&named),
        Err(PolyError::UnboundVariable(_))
    ));
}

#[test]
fn derivative_examples() {
    let r = xring();
    assert_eq!((&x(&r, 0) * &x(&r, 4)).partial_derivative("x0").unwrap(), x(&r, 4));
    assert_eq!(hand_i(&r).partial_derivative("x2").unwrap(), &c(&r, 6) * &x(&r, 2));
    assert!(c(&r, 5).partial_derivative("x3").unwrap().is_zero());
    assert!(matches!(
        c(&r, 5).partial_derivative("y"),
        Err(PolyError::UnknownVariable(_))
    ));
}

#[test]
fn exact_divide_examples() {
    let r = xring();
    let j = hand_j(&r);
    let j4 = j.pow(4);
    assert_eq!((&x(&r, 0) * &j4).exact_divide(&j4).unwrap(), Some(x(&r, 0)));
    // J carries -x2^3, which has no x0
    assert!(j.terms().iter().any(|(e, k)| e.get(0) == 0 && e.get(2) == 3 && *k == Rational::from_int(-1)));
    assert_eq!(j.exact_divide(&x(&r, 0)).unwrap(), None);
    assert!(Polynomial::zero(&r).exact_divide(&j).unwrap().unwrap().is_zero());
    assert_eq!(j.exact_divide(&Polynomial::zero(&r)), Err(PolyError::DivisionByZero));
    assert_eq!(j4.strip_factor(&j).unwrap(), (4, Polynomial::one(&r)));
}

#[test]
fn homogeneous_components_examples() {
    let r = xring();
    let f = &x(&r, 4) + &(&x(&r, 0) * &x(&r, 4));
    let parts = f.homogeneous_components(&[0]);
    assert_eq!(parts.len(), 2);
    assert_eq!(parts[&0], x(&r, 4));
    assert_eq!(parts[&1], &x(&r, 0) * &x(&r, 4));
    let j = hand_j(&r);
    let jp = j.homogeneous_components(&[0, 1, 2, 3, 4]);
    assert_eq!(jp.len(), 1);
    assert_eq!(jp[&3], j);
}

#[test]
fn reduce_mod_examples() {
    let r = xring();
    let ctx = PrimeContext::random(62, 3).unwrap();
    assert!(reduce_mod(&(&x(&r, 0) - &x(&r, 0)), &ctx).unwrap().is_zero());

    let half = Polynomial::constant(&r, Rational::new(1, 2)) * x(&r, 0);
    let m = reduce_mod(&half, &ctx).unwrap();
    assert_eq!(m.terms()[0].1, (ctx.modulus() + 1) / 2);

    // cross-check: reduce then evaluate == evaluate then reduce
    let i = hand_i(&r);
    let im = reduce_mod(&i, &ctx).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let p = random_point(&mut rng, 5);
        let exact = ctx.reduce_rational(&i.evaluate(&p).unwrap()).unwrap();
        let pm: Vec<u64> = p.iter().map(|v| ctx.reduce_rational(v).unwrap()).collect();
        assert_eq!(im.evaluate(&pm), exact);
    }

    let small = PrimeContext::with_modulus(7, 0).unwrap();
    let bad = Polynomial::constant(&r, Rational::new(1, 14));
    assert!(matches!(
        reduce_mod(&bad, &small),
        Err(PolyError::NonInvertibleDenominator(7))
    ));
}

#[test]
fn zero_degree_is_undefined() {
    let r = xring();
    assert_eq!(Polynomial::zero(&r).total_degree(), None);
    assert_eq!(Polynomial::one(&r).total_degree(), Some(0));
}

#[test]
fn specialize_and_embed() {
    let r = xring();
    let i = hand_i(&r);
    let s = i.specialize(&[(0, Rational::from_int(2)), (4, Rational::from_int(3))]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let mut p = random_point(&mut rng, 5);
        let q = s.evaluate(&p).unwrap();
        p[0] = Rational::from_int(2);
        p[4] = Rational::from_int(3);
        assert_eq!(q, i.evaluate(&p).unwrap());
    }
    let big = r.extended(&["t"]).unwrap();
    let e = i.embed(&big).unwrap();
    assert_eq!(e.ring().len(), 6);
    assert_eq!(e.num_terms(), 3);
}
