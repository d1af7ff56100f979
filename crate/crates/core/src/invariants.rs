//! Binary quartics and their two basic invariants.
//!
//! A point of projective 4-space is read as the quartic
//!
//! ```text
//! F(T0, T1) = x0 T0^4 + 4 x1 T0^3 T1 + 6 x2 T0^2 T1^2 + 4 x3 T0 T1^3 + x4 T1^4
//! ```
//!
//! so `x0..x4` are the *binomially normalized* coefficients. The raw
//! coefficient of `T0^(4-k) T1^k` is `C(4,k) * x_k`.
//!
//! `I = x0 x4 - 4 x1 x3 + 3 x2^2` has weight 4 and `J`, the 3x3 Hankel
//! determinant of `x0..x4`, has weight 6.
//!
//! # Action convention
//!
//! A matrix `[[a, b], [c, d]]` acts on a quartic by the row-vector
//! substitution `(T0, T1) -> (T0, T1) * A`, i.e.
//! `T0 -> a T0 + c T1` and `T1 -> b T0 + d T1`. With this convention
//! `act(B, act(A, F)) = act(B * A, F)`. The lower unipotent matrix
//! `[[1, 0], [c, 1]]` sends `T0 -> T0 + c T1`, which is the substitution
//! behind the Cremona family.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use crate::polyring::{PolyError, Polynomial, Rational, Ring, UniPoly, X_VARS};

pub const BINOMIAL4: [i64; 5] = [1, 4, 6, 4, 1];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error("the zero quartic has no projective meaning")]
    ZeroQuartic,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub fn x_ring() -> Arc<Ring> {
    Ring::new(&X_VARS).expect("valid ring")
}

fn xvars(ring: &Arc<Ring>) -> Result<[Polynomial; 5], PolyError> {
    let v = |i: usize| Polynomial::var(ring, X_VARS[i]);
    Ok([v(0)?, v(1)?, v(2)?, v(3)?, v(4)?])
}

/// `x0 x4 - 4 x1 x3 + 3 x2^2` in `Q[x0..x4]`.
pub fn invariant_i() -> Polynomial {
    invariant_i_in(&x_ring()).expect("x ring")
}

/// `I` in any ring that contains `x0..x4`.
pub fn invariant_i_in(ring: &Arc<Ring>) -> Result<Polynomial, PolyError> {
    Ok(eval_i(&xvars(ring)?))
}

/// The Hankel determinant `J` in `Q[x0..x4]`.
pub fn invariant_j() -> Polynomial {
    invariant_j_in(&x_ring()).expect("x ring")
}

pub fn invariant_j_in(ring: &Arc<Ring>) -> Result<Polynomial, PolyError> {
    Ok(HankelMatrix::new(xvars(ring)?).determinant())
}

/// `I` evaluated on five coefficient polynomials.
pub fn eval_i(x: &[Polynomial; 5]) -> Polynomial {
    let ring = x[0].ring();
    let four = Polynomial::constant(ring, Rational::from_int(4));
    let three = Polynomial::constant(ring, Rational::from_int(3));
    &(&(&x[0] * &x[4]) - &(&four * &(&x[1] * &x[3]))) + &(&three * &(&x[2] * &x[2]))
}

/// `J` evaluated on five coefficient polynomials.
pub fn eval_j(x: &[Polynomial; 5]) -> Polynomial {
    HankelMatrix::new(x.clone()).determinant()
}

pub fn eval_i_rational(x: &[Rational; 5]) -> Rational {
    &(&(&x[0] * &x[4]) - &(&Rational::from_int(4) * &(&x[1] * &x[3])))
        + &(&Rational::from_int(3) * &(&x[2] * &x[2]))
}

pub fn eval_j_rational(x: &[Rational; 5]) -> Rational {
    HankelMatrix::new(x.clone()).determinant()
}

/// `[[h0, h1, h2], [h1, h2, h3], [h2, h3, h4]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HankelMatrix<T> {
    entries: [T; 5],
}

impl<T: Clone> HankelMatrix<T> {
    pub fn new(entries: [T; 5]) -> Self {
        HankelMatrix { entries }
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        assert!(row < 3 && col < 3);
        &self.entries[row + col]
    }

    pub fn rows(&self) -> [[T; 3]; 3] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.get(r, c).clone()))
    }
}

impl<T> HankelMatrix<T>
where
    T: Clone,
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    /// Cofactor expansion along the first row.
    pub fn determinant(&self) -> T {
        let m = |r: usize, c: usize| self.get(r, c);
        let minor = |c0: usize, c1: usize| &(m(1, c0) * m(2, c1)) - &(m(1, c1) * m(2, c0));
        let first = m(0, 0) * &minor(1, 2);
        let second = m(0, 1) * &minor(0, 2);
        let third = m(0, 2) * &minor(0, 1);
        &(&first - &second) + &third
    }
}

/// Five normalized coefficients of a binary quartic, not all zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryQuartic {
    coeffs: [Rational; 5],
}

impl BinaryQuartic {
    pub fn new(coeffs: [Rational; 5]) -> Result<Self, InvariantError> {
        if coeffs.iter().all(Rational::is_zero) {
            return Err(InvariantError::ZeroQuartic);
        }
        Ok(BinaryQuartic { coeffs })
    }

    pub fn from_ints(c: [i64; 5]) -> Result<Self, InvariantError> {
        Self::new(c.map(Rational::from_int))
    }

    /// Product of four linear forms `p T0 + q T1`, given as `(p, q)`.
    pub fn from_linear_factors(factors: &[(Rational, Rational); 4]) -> Result<Self, InvariantError> {
        // raw[k] = coefficient of T0^(deg-k) T1^k
        let mut raw = vec![Rational::one()];
        for (p, q) in factors {
            let mut next = vec![Rational::zero(); raw.len() + 1];
            for (k, c) in raw.iter().enumerate() {
                next[k] += &(c * p);
                next[k + 1] += &(c * q);
            }
            raw = next;
        }
        Self::from_raw(std::array::from_fn(|k| raw[k].clone()))
    }

    /// From the plain coefficients of `T0^(4-k) T1^k`.
    pub fn from_raw(raw: [Rational; 5]) -> Result<Self, InvariantError> {
        Self::new(std::array::from_fn(|k| {
            &raw[k] / &Rational::from_int(BINOMIAL4[k])
        }))
    }

    pub fn coeffs(&self) -> &[Rational; 5] {
        &self.coeffs
    }

    pub fn raw(&self) -> [Rational; 5] {
        std::array::from_fn(|k| &self.coeffs[k] * &Rational::from_int(BINOMIAL4[k]))
    }

    pub fn i(&self) -> Rational {
        eval_i_rational(&self.coeffs)
    }

    pub fn j(&self) -> Rational {
        eval_j_rational(&self.coeffs)
    }

    pub fn act(&self, a: &Matrix2) -> Result<Self, InvariantError> {
        if !a.is_invertible() {
            return Err(InvariantError::SingularMatrix);
        }
        let empty = Ring::new::<&str>(&[])?;
        let k = |r: &Rational| Polynomial::constant(&empty, r.clone());
        let entries = [k(&a.a), k(&a.b), k(&a.c), k(&a.d)];
        let coeffs = self.coeffs.clone().map(|c| k(&c));
        let out = gl2_action(&entries, &coeffs);
        Self::new(out.map(|p| p.as_constant().expect("constant")))
    }
}

/// `[[a, b], [c, d]]` with rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix2 {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl Matrix2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Matrix2 { a, b, c, d }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1)
    }

    pub fn det(&self) -> Rational {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }

    pub fn mul(&self, o: &Matrix2) -> Matrix2 {
        Matrix2 {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }
}

/// Normalized coefficients of `F(a T0 + c T1, b T0 + d T1)` for symbolic
/// entries `[a, b, c, d]` and coefficients `x`, all in one ring.
pub fn gl2_action(entries: &[Polynomial; 4], x: &[Polynomial; 5]) -> [Polynomial; 5] {
    let ring = x[0].ring().clone();
    let [a, b, c, d] = entries;
    // binary forms as coefficient vectors indexed by the T1 exponent
    let mul = |p: &[Polynomial], q: &[Polynomial]| {
        let mut out = vec![Polynomial::zero(&ring); p.len() + q.len() - 1];
        for (i, pi) in p.iter().enumerate() {
            for (j, qj) in q.iter().enumerate() {
                out[i + j] = &out[i + j] + &(pi * qj);
            }
        }
        out
    };
    let l0 = vec![a.clone(), c.clone()];
    let l1 = vec![b.clone(), d.clone()];
    let mut pow0 = vec![vec![Polynomial::one(&ring)]];
    let mut pow1 = vec![vec![Polynomial::one(&ring)]];
    for k in 1..=4 {
        pow0.push(mul(&pow0[k - 1], &l0));
        pow1.push(mul(&pow1[k - 1], &l1));
    }
    let mut raw = vec![Polynomial::zero(&ring); 5];
    for k in 0..5 {
        let scale = Polynomial::constant(&ring, Rational::from_int(BINOMIAL4[k]));
        let term = mul(&pow0[4 - k], &pow1[k]);
        let xk = &scale * &x[k];
        for (m, t) in term.iter().enumerate() {
            raw[m] = &raw[m] + &(&xk * t);
        }
    }
    std::array::from_fn(|m| raw[m].scale(&Rational::new(1, BINOMIAL4[m])))
}

/// Checks `I(A.x) = det(A)^4 I(x)` and `J(A.x) = det(A)^6 J(x)` as exact
/// identities. The entries live in a ring that also contains `x0..x4`;
/// they may involve further symbols.
pub fn weight_check(entries: &[Polynomial; 4]) -> Result<(bool, bool), InvariantError> {
    let ring = entries[0].ring().clone();
    let x = xvars(&ring)?;
    let moved = gl2_action(entries, &x);
    let det = &(&entries[0] * &entries[3]) - &(&entries[1] * &entries[2]);
    let i_ok = eval_i(&moved) == &det.pow(4) * &eval_i(&x);
    let j_ok = eval_j(&moved) == &det.pow(6) * &eval_j(&x);
    Ok((i_ok, j_ok))
}

/// Weight check with rational entries.
pub fn weight_check_rational(a: &Matrix2) -> Result<(bool, bool), InvariantError> {
    let ring = x_ring();
    let k = |r: &Rational| Polynomial::constant(&ring, r.clone());
    weight_check(&[k(&a.a), k(&a.b), k(&a.c), k(&a.d)])
}

/// Weight check for the fully generic matrix `[[a, b], [c, d]]`.
pub fn weight_check_generic() -> Result<(bool, bool), InvariantError> {
    let ring = x_ring().extended(&["a", "b", "c", "d"])?;
    let v = |n: &str| Polynomial::var(&ring, n);
    weight_check(&[v("a")?, v("b")?, v("c")?, v("d")?])
}

/// Weight check for `[[1, 0], [c, 1]]` with `c` symbolic.
pub fn weight_check_lower_unipotent() -> Result<(bool, bool), InvariantError> {
    let ring = x_ring().extended(&["c"])?;
    let one = Polynomial::one(&ring);
    let zero = Polynomial::zero(&ring);
    weight_check(&[one.clone(), zero, Polynomial::var(&ring, "c")?, one])
}

/// Outcome of [`nullform_test`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NullformVerdict {
    pub has_triple_factor: bool,
    pub both_invariants_vanish: bool,
}

/// Triple-linear-factor detection and invariant vanishing for one quartic.
///
/// Factors of `T1` are read off the leading normalized coefficients
/// (`x0 = 0` means `T1 | F`, and so on). Otherwise a repeated root of
/// multiplicity three shows up as a nonconstant `gcd(g, g', g'')` where
/// `g(S) = F(S, 1)`.
pub fn nullform_test(q: &BinaryQuartic) -> NullformVerdict {
    let raw = q.raw();
    let t1_power = raw.iter().take_while(|c| c.is_zero()).count();
    let has_triple_factor = t1_power >= 3 || {
        // g(S) = sum raw[k] S^(4-k)
        let g = UniPoly::new((0..5).map(|e| raw[4 - e].clone()).collect());
        let g1 = g.derivative();
        let g2 = g1.derivative();
        g.gcd(&g1).gcd(&g2).degree().is_some_and(|d| d >= 1)
    };
    NullformVerdict {
        has_triple_factor,
        both_invariants_vanish: q.i().is_zero() && q.j().is_zero(),
    }
}

/// `(1, u, u^2, u^3, u^4)`, or `(u^4, u^3, u^2, u, 1)` in the flipped chart.
pub fn twisted_quartic(u: &Rational, flipped: bool) -> [Rational; 5] {
    let mut p: [Rational; 5] = std::array::from_fn(|k| u.pow(k as u32));
    if flipped {
        p.reverse();
    }
    p
}

/// Symbolic twisted quartic in the one-variable ring `Q[param]`.
pub fn twisted_quartic_symbolic(param: &str, flipped: bool) -> Result<[Polynomial; 5], PolyError> {
    let ring = Ring::new(&[param])?;
    let u = Polynomial::var(&ring, param)?;
    let mut p: [Polynomial; 5] = std::array::from_fn(|k| u.pow(k as u32));
    if flipped {
        p.reverse();
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(c: [i64; 5]) -> BinaryQuartic {
        BinaryQuartic::from_ints(c).unwrap()
    }

    fn rand_rat(rng: &mut ChaCha8Rng) -> Rational {
        Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=5))
    }

    fn pts(c: [i64; 5]) -> [Rational; 5] {
        c.map(Rational::from_int)
    }

    #[test]
    fn i_examples() {
        let i = invariant_i();
        assert_eq!(i.num_terms(), 3);
        assert_eq!(i.evaluate(&pts([1, 0, 0, 0, 1])).unwrap(), Rational::one());
        assert!(i.evaluate(&pts([0, 0, 0, 0, 1])).unwrap().is_zero());
    }

    #[test]
    fn j_examples() {
        let j = invariant_j();
        assert_eq!(j.total_degree(), Some(3));
        assert!(j.is_homogeneous_in(&[0, 1, 2, 3, 4]));
        assert_eq!(j.evaluate(&pts([0, 0, 1, 0, 0])).unwrap(), Rational::from_int(-1));
        assert!(j.evaluate(&pts([1, 0, 0, 0, 1])).unwrap().is_zero());
        // hand expansion x0x2x4 - x0x3^2 - x1^2x4 + 2x1x2x3 - x2^3
        let text = "vars x0 x1 x2 x3 x4\n1/1 1 0 1 0 1\n-1/1 1 0 0 2 0\n-1/1 0 2 0 0 1\n2/1 0 1 1 1 0\n-1/1 0 0 3 0 0\n";
        assert_eq!(j, crate::polyring::serial::from_text(text).unwrap());
    }

    #[test]
    fn invariants_vanish_on_twisted_quartic() {
        let t = twisted_quartic_symbolic("u", false).unwrap();
        assert!(eval_i(&t).is_zero());
        assert!(eval_j(&t).is_zero());
        let tf = twisted_quartic_symbolic("u", true).unwrap();
        assert!(eval_i(&tf).is_zero() && eval_j(&tf).is_zero());
        assert_eq!(twisted_quartic(&Rational::zero(), false), pts([1, 0, 0, 0, 0]));
        assert_eq!(twisted_quartic(&Rational::zero(), true), pts([0, 0, 0, 0, 1]));
    }

    #[test]
    fn hankel_structure() {
        let h = HankelMatrix::new(pts([1, 2, 3, 4, 5]));
        let rows = h.rows();
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(rows[r][c], rows[c][r]);
            }
        }
        assert_eq!(rows[0][2], rows[1][1]);
        assert!(h.determinant().is_zero());
    }

    #[test]
    fn action_examples() {
        let f = q([3, -1, 2, 5, 7]);
        assert_eq!(f.act(&Matrix2::identity()).unwrap(), f);
        let diag = f.act(&Matrix2::from_ints(2, 0, 0, 1)).unwrap();
        for k in 0..5 {
            assert_eq!(diag.coeffs()[k], &f.coeffs()[k] * &Rational::from_int(2).pow(4 - k as u32));
        }
        assert_eq!(
            f.act(&Matrix2::from_ints(1, 2, 2, 4)),
            Err(InvariantError::SingularMatrix)
        );
    }

    #[test]
    fn lower_unipotent_matches_binomial_pattern() {
        let ring = x_ring().extended(&["c"]).unwrap();
        let x = xvars(&ring).unwrap();
        let c = Polynomial::var(&ring, "c").unwrap();
        let one = Polynomial::one(&ring);
        let moved = gl2_action(&[one.clone(), Polynomial::zero(&ring), c.clone(), one], &x);
        let k = |n: i64| Polynomial::constant(&ring, Rational::from_int(n));
        let expected4 = &(&(&(&x[4] + &(&k(4) * &(&x[3] * &c))) + &(&k(6) * &(&x[2] * &c.pow(2))))
            + &(&k(4) * &(&x[1] * &c.pow(3))))
            + &(&x[0] * &c.pow(4));
        assert_eq!(moved[4], expected4);
        assert_eq!(moved[0], x[0]);
        assert_eq!(moved[1], &x[1] + &(&x[0] * &c));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight_check_lower_unipotent().unwrap(), (true, true));
        assert_eq!(weight_check_generic().unwrap(), (true, true));
        assert_eq!(weight_check_rational(&Matrix2::identity()).unwrap(), (true, true));
        assert_eq!(weight_check_rational(&Matrix2::from_ints(2, 0, 0, 1)).unwrap(), (true, true));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Matrix2::from_ints(2, 0, 0, 1);
        for _ in 0..10 {
            let f = BinaryQuartic::new(std::array::from_fn(|_| rand_rat(&mut rng))).unwrap();
            let g = f.act(&a).unwrap();
            assert_eq!(g.i(), &f.i() * &Rational::from_int(16));
            assert_eq!(g.j(), &f.j() * &Rational::from_int(64));
        }
    }

    #[test]
    fn action_composition_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        while checked < 25 {
            let m = |rng: &mut ChaCha8Rng| {
                Matrix2::new(rand_rat(rng), rand_rat(rng), rand_rat(rng), rand_rat(rng))
            };
            let (a, b) = (m(&mut rng), m(&mut rng));
            if !a.is_invertible() || !b.is_invertible() {
                continue;
            }
            let f = BinaryQuartic::new(std::array::from_fn(|_| rand_rat(&mut rng))).unwrap();
            let lhs = f.act(&a).unwrap().act(&b).unwrap();
            let rhs = f.act(&b.mul(&a)).unwrap();
            assert_eq!(lhs, rhs);
            checked += 1;
        }
    }

    #[test]
    fn nullform_examples() {
        let v = nullform_test(&q([0, 0, 0, 0, 1]));
        assert!(v.has_triple_factor && v.both_invariants_vanish);
        let v = nullform_test(&q([1, 0, 0, 0, 1]));
        assert!(!v.has_triple_factor && !v.both_invariants_vanish);
        // T1 (T0 + 2 T1)^3
        let one = Rational::one();
        let two = Rational::from_int(2);
        let zero = Rational::zero();
        let b = BinaryQuartic::from_linear_factors(&[
            (zero.clone(), one.clone()),
            (one.clone(), two.clone()),
            (one.clone(), two.clone()),
            (one.clone(), two.clone()),
        ])
        .unwrap();
        assert!(b.coeffs()[0].is_zero());
        let v = nullform_test(&b);
        assert!(v.has_triple_factor && v.both_invariants_vanish);
        // T0^3 T1: a triple factor with no root at infinity in the T1 = 1 chart
        let v = nullform_test(&q([0, 1, 0, 0, 0]));
        assert!(v.has_triple_factor && v.both_invariants_vanish);
        assert_eq!(BinaryQuartic::from_ints([0; 5]), Err(InvariantError::ZeroQuartic));
    }

    #[test]
    fn nullform_directions_agree_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let lin = |rng: &mut ChaCha8Rng| loop {
                let p = (rand_rat(rng), rand_rat(rng));
                if !(p.0.is_zero() && p.1.is_zero()) {
                    return p;
                }
            };
            let a = lin(&mut rng);
            let b = lin(&mut rng);
            let nf = BinaryQuartic::from_linear_factors(&[b, a.clone(), a.clone(), a]).unwrap();
            let v = nullform_test(&nf);
            assert!(v.has_triple_factor && v.both_invariants_vanish, "{nf:?}");

            let f = BinaryQuartic::new(std::array::from_fn(|_| rand_rat(&mut rng))).unwrap();
            let v = nullform_test(&f);
            if !v.both_invariants_vanish {
                assert!(!v.has_triple_factor, "{f:?}");
            }
        }
    }
}
