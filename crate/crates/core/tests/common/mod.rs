//! Generators and property checks shared by the property and acceptance
//! suites. Every check returns `Err` with a description on violation.

#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;

use quadric_cremona::invariants::{invariant_i, invariant_j, x_ring, BinaryQuartic, Matrix2};
use quadric_cremona::multiplicity::{
    curve_b, curve_c, curve_t, mult_along_curve, mult_at_point, MultiplicityValue,
    ParametrizedCurve, ProjectivePoint,
};
use quadric_cremona::polyring::{serial, Polynomial, Rational, Ring};

pub type Check = Result<(), String>;

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn abc_ring() -> Arc<Ring> {
    Ring::new(&["a", "b", "c"]).unwrap()
}

/// Terms as `(exponents, numerator, denominator)`.
pub fn poly_from(ring: &Arc<Ring>, terms: &[(Vec<u32>, i64, i64)]) -> Polynomial {
    Polynomial::from_terms(
        ring,
        terms.iter().map(|(e, n, d)| (e.clone(), Rational::new(*n, *d))),
    )
    .unwrap()
}

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

pub fn random_poly(rng: &mut impl Rng, ring: &Arc<Ring>, max_terms: usize, max_exp: u32) -> Polynomial {
    let n = rng.gen_range(0..=max_terms);
    let terms: Vec<(Vec<u32>, i64, i64)> = (0..n)
        .map(|_| {
            let e = (0..ring.len()).map(|_| rng.gen_range(0..=max_exp)).collect();
            (e, rng.gen_range(-9..=9), rng.gen_range(1..=3))
        })
        .collect();
    poly_from(ring, &terms)
}

pub fn random_nonzero_poly(rng: &mut impl Rng, ring: &Arc<Ring>, max_terms: usize, max_exp: u32) -> Polynomial {
    loop {
        let p = random_poly(rng, ring, max_terms, max_exp);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A point of P^4 with at least two nonzero coordinates.
pub fn random_point(rng: &mut impl Rng) -> [Rational; 5] {
    loop {
        let p: [Rational; 5] = std::array::from_fn(|_| {
            if rng.gen_bool(0.3) {
                Rational::zero()
            } else {
                random_rational(rng)
            }
        });
        if p.iter().filter(|c| !c.is_zero()).count() >= 2 {
            return p;
        }
    }
}

fn x(i: usize) -> Polynomial {
    Polynomial::var_at(&x_ring(), i)
}

/// A random linear form, vanishing at `p` when `through` is set and
/// missing it otherwise.
pub fn linear_form(rng: &mut impl Rng, p: &[Rational; 5], through: bool) -> Polynomial {
    let r = x_ring();
    loop {
        let mut l = Polynomial::zero(&r);
        for i in 0..5 {
            let a = Rational::from_int(rng.gen_range(-5..=5));
            l = &l + &(&Polynomial::constant(&r, a) * &x(i));
        }
        let val = l.evaluate(p).unwrap();
        if through {
            let c = p.iter().position(|v| !v.is_zero()).unwrap();
            l = &l - &(&Polynomial::constant(&r, &val / &p[c]) * &x(c));
        } else if val.is_zero() {
            continue;
        }
        if !l.is_zero() {
            return l;
        }
    }
}

/// A product of `through` forms vanishing at `p` and `generic` forms that
/// miss it, so its multiplicity at `p` is exactly `through`.
pub fn form_at(rng: &mut impl Rng, p: &[Rational; 5], through: usize, generic: usize) -> Polynomial {
    let mut f = Polynomial::one(&x_ring());
    for _ in 0..through {
        f = &f * &linear_form(rng, p, true);
    }
    for _ in 0..generic {
        f = &f * &linear_form(rng, p, false);
    }
    f
}

/// Forms that are interesting along the named curves.
pub fn curve_pool() -> Vec<Polynomial> {
    vec![invariant_i(), invariant_j(), x(0), x(1), x(3), x(4), &x(0) + &x(2)]
}

pub fn named_curves() -> [ParametrizedCurve; 3] {
    [curve_b(), curve_c(), curve_t()]
}

#[allow(clippy::eq_op)]
pub fn check_ring_axioms(a: &Polynomial, b: &Polynomial, c: &Polynomial) -> Check {
    ensure(a + b == b + a, || "addition not commutative".into())?;
    ensure(a * b == b * a, || "multiplication not commutative".into())?;
    ensure(&(a + b) + c == a + &(b + c), || "addition not associative".into())?;
    ensure(&(a * b) * c == a * &(b * c), || "multiplication not associative".into())?;
    ensure(a * &(b + c) == &(a * b) + &(a * c), || "not distributive".into())?;
    ensure((a - a).is_zero(), || "a - a != 0".into())?;
    ensure(a * &Polynomial::one(a.ring()) == *a, || "1 is not neutral".into())?;
    ensure(a.pow(3) == &(a * a) * a, || "pow disagrees with products".into())
}

pub fn check_division_roundtrip(f: &Polynomial, g: &Polynomial) -> Check {
    let prod = f * g;
    let q = prod.exact_divide(g).map_err(|e| e.to_string())?;
    ensure(q.as_ref() == Some(f), || format!("({f})*({g}) / ({g}) gave {q:?}"))?;
    // adding a term of lower degree than g's support breaks divisibility
    // unless g is a constant
    if g.total_degree() > Some(0) {
        let bumped = &prod + &Polynomial::one(f.ring());
        if let Some(q) = bumped.exact_divide(g).map_err(|e| e.to_string())? {
            ensure(&q * g == bumped, || "wrong quotient returned".into())?;
        }
    }
    Ok(())
}

/// `(f o g) o h == f o (g o h)` where `g`, `h` map the ring into itself.
pub fn check_substitution_composition(f: &Polynomial, g: &[Polynomial], h: &[Polynomial]) -> Check {
    let r = f.ring().clone();
    let left = f.compose(g, &r).compose(h, &r);
    let gh: Vec<Polynomial> = g.iter().map(|gi| gi.compose(h, &r)).collect();
    let right = f.compose(&gh, &r);
    ensure(left == right, || "substitution is not associative".into())
}

pub fn check_serial_roundtrip(f: &Polynomial) -> Check {
    let text = serial::to_text(f);
    let back = serial::from_text(&text).map_err(|e| e.to_string())?;
    ensure(&back == f, || format!("text round trip changed {f}"))
}

/// Both charts at nonzero coordinates give the same multiplicity.
pub fn check_chart_independence(f: &Polynomial, p: &[Rational; 5]) -> Check {
    let charts: Vec<usize> = (0..5).filter(|&i| !p[i].is_zero()).collect();
    let values: Vec<MultiplicityValue> = charts
        .iter()
        .map(|&c| mult_at_point(f, &ProjectivePoint::with_chart(p.clone(), c).unwrap()).unwrap())
        .collect();
    ensure(values.windows(2).all(|w| w[0] == w[1]), || {
        format!("chart-dependent multiplicities {values:?} at {p:?}")
    })
}

pub fn check_scaling(f: &Polynomial, p: &[Rational; 5], lambda: &Rational) -> Check {
    let pt = ProjectivePoint::new(p.clone()).unwrap();
    let a = mult_at_point(f, &pt).unwrap();
    let b = mult_at_point(f, &pt.scaled(lambda).unwrap()).unwrap();
    ensure(a == b, || format!("scaling by {lambda} changed {a} to {b}"))
}

pub fn check_point_multiplicativity(f: &Polynomial, g: &Polynomial, p: &[Rational; 5]) -> Check {
    let pt = ProjectivePoint::new(p.clone()).unwrap();
    let m = |h: &Polynomial| mult_at_point(h, &pt).unwrap();
    let (mf, mg, mfg) = (m(f), m(g), m(&(f * g)));
    ensure(mfg == mf + mg, || format!("mult(fg) = {mfg}, mult f + mult g = {mf} + {mg}"))
}

pub fn check_curve_multiplicativity(f: &Polynomial, g: &Polynomial, c: &ParametrizedCurve) -> Check {
    let m = |h: &Polynomial| mult_along_curve(h, c).unwrap();
    let (mf, mg, mfg) = (m(f), m(g), m(&(f * g)));
    ensure(mfg == mf + mg, || {
        format!("along {}: mult(fg) = {mfg}, sum = {mf} + {mg}", c.label())
    })
}

pub fn check_vanishing_iff_positive(f: &Polynomial, p: &[Rational; 5]) -> Check {
    let pt = ProjectivePoint::new(p.clone()).unwrap();
    let m = mult_at_point(f, &pt).unwrap();
    let vanishes = f.evaluate(p).unwrap().is_zero();
    ensure(vanishes == (m >= MultiplicityValue::Finite(1)), || {
        format!("f(P) = 0 is {vanishes} but mult is {m}")
    })
}

/// Known multiplicity of a product of linear forms through a point.
pub fn check_known_multiplicity(rng: &mut impl Rng, p: &[Rational; 5], through: usize, generic: usize) -> Check {
    let f = form_at(rng, p, through, generic);
    let m = mult_at_point(&f, &ProjectivePoint::new(p.clone()).unwrap()).unwrap();
    let want = MultiplicityValue::Finite(through as u32);
    ensure(m == want, || format!("expected {want}, got {m}"))
}

/// Sampled multiplicities along a curve are never below the generic one.
pub fn check_semicontinuity(f: &Polynomial, c: &ParametrizedCurve, u: &Rational) -> Check {
    let generic = mult_along_curve(f, c).unwrap();
    if let Some(p) = c.point_at(u).unwrap() {
        let m = mult_at_point(f, &p).unwrap();
        ensure(m >= generic, || format!("mult {m} at u = {u} below generic {generic} on {}", c.label()))?;
    }
    Ok(())
}

pub fn check_invariant_weights(f: &BinaryQuartic, a: &Matrix2) -> Check {
    let moved = f.act(a).map_err(|e| e.to_string())?;
    let det = a.det();
    ensure(moved.i() == &det.pow(4) * &f.i(), || format!("I weight fails for {a:?}"))?;
    ensure(moved.j() == &det.pow(6) * &f.j(), || format!("J weight fails for {a:?}"))
}

pub fn check_rational_roundtrip(r: &Rational) -> Check {
    let s = r.to_fraction_string();
    let back: Rational = s.parse().map_err(|e| format!("{s}: {e}"))?;
    ensure(&back == r, || format!("{r} round-tripped to {back}"))
}

pub fn random_quartic(rng: &mut impl Rng) -> BinaryQuartic {
    loop {
        let c: [Rational; 5] = std::array::from_fn(|_| random_rational(rng));
        if let Ok(q) = BinaryQuartic::new(c) {
            return q;
        }
    }
}

pub fn random_invertible(rng: &mut impl Rng) -> Matrix2 {
    loop {
        let m = Matrix2::new(random_rational(rng), random_rational(rng), random_rational(rng), random_rational(rng));
        if m.is_invertible() {
            return m;
        }
    }
}
