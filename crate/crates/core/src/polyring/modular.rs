//! Prime-field images of polynomials for probabilistic identity testing.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::monomial::ExponentVector;
use super::poly::Polynomial;
use super::rational::Rational;
use super::PolyError;

pub const DEFAULT_PRIME_BITS: u32 = 62;

/// Required ratio between the modulus and any total degree it is used with.
pub const DEGREE_MARGIN_BITS: u32 = 40;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; these bases are exact for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A prime modulus plus the seed that drives evaluation points for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeContext {
    modulus: u64,
    seed: u64,
}

impl PrimeContext {
    /// Draws a random prime with exactly `bits` bits from `seed`.
    pub fn random(bits: u32, seed: u64) -> Result<Self, PolyError> {
        if !(2..=63).contains(&bits) {
            return Err(PolyError::PrimeBits(bits));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = 1u64 << (bits - 1);
        loop {
            let cand = (rng.gen::<u64>() & (top - 1)) | top | 1;
            if is_prime_u64(cand) {
                return Ok(PrimeContext {
                    modulus: cand,
                    seed,
                });
            }
        }
    }

    pub fn with_modulus(modulus: u64, seed: u64) -> Result<Self, PolyError> {
        if !is_prime_u64(modulus) {
            return Err(PolyError::NotPrime(modulus));
        }
        Ok(PrimeContext { modulus, seed })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ self.modulus.rotate_left(17))
    }

    /// Checks the modulus exceeds `degree` by at least 2^40.
    pub fn ensure_degree_margin(&self, degree: u32) -> Result<(), PolyError> {
        let needed = (degree.max(1) as u128) << DEGREE_MARGIN_BITS;
        if (self.modulus as u128) < needed {
            Err(PolyError::PrimeTooSmall {
                modulus: self.modulus,
                degree,
            })
        } else {
            Ok(())
        }
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.modulus));
        pow_mod(a, self.modulus - 2, self.modulus)
    }

    fn bigint_mod(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.modulus);
        let r = ((n % &p) + &p) % &p;
        r.to_u64().expect("residue fits")
    }

    /// Image of a rational; fails when the denominator vanishes mod p.
    pub fn reduce_rational(&self, r: &Rational) -> Result<u64, PolyError> {
        let den = self.bigint_mod(&r.denom());
        if den == 0 {
            return Err(PolyError::NonInvertibleDenominator(self.modulus));
        }
        let num = self.bigint_mod(&r.numer());
        Ok(mul_mod(num, self.inv(den), self.modulus))
    }

    pub fn random_element(&self, rng: &mut impl Rng) -> u64 {
        rng.gen_range(0..self.modulus)
    }
}

/// Polynomial with coefficients in the prime field of a [`PrimeContext`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPoly {
    modulus: u64,
    nvars: usize,
    terms: Vec<(ExponentVector, u64)>,
}

impl ModPoly {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(ExponentVector, u64)] {
        &self.terms
    }

    pub fn evaluate(&self, point: &[u64]) -> u64 {
        assert_eq!(point.len(), self.nvars, "one value per variable");
        let p = self.modulus;
        let mut powers: Vec<Vec<u64>> = point.iter().map(|&v| vec![1, v % p]).collect();
        let mut sum = 0u64;
        for (e, c) in &self.terms {
            let mut term = *c;
            for (v, pw) in powers.iter_mut().enumerate() {
                let k = e.get(v) as usize;
                if k == 0 {
                    continue;
                }
                while pw.len() <= k {
                    let next = mul_mod(pw[pw.len() - 1], pw[1], p);
                    pw.push(next);
                }
                term = mul_mod(term, pw[k], p);
            }
            sum = add_mod(sum, term, p);
        }
        sum
    }
}

type ModAcc = rustc_hash::FxHashMap<ExponentVector, u64>;

impl ModPoly {
    fn from_acc(modulus: u64, nvars: usize, acc: ModAcc) -> ModPoly {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        ModPoly {
            modulus,
            nvars,
            terms,
        }
    }

    pub fn zero(nvars: usize, modulus: u64) -> ModPoly {
        ModPoly {
            modulus,
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: u64, modulus: u64) -> ModPoly {
        let c = c % modulus;
        ModPoly {
            modulus,
            nvars,
            terms: if c == 0 { Vec::new() } else { vec![(ExponentVector::ONE, c)] },
        }
    }

    pub fn var(nvars: usize, index: usize, modulus: u64) -> ModPoly {
        assert!(index < nvars);
        ModPoly {
            modulus,
            nvars,
            terms: vec![(ExponentVector::unit(index), 1 % modulus)],
        }
    }

    /// The value of a polynomial without variables.
    pub fn as_constant(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_one() => Some(*c),
            _ => None,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add(&self, other: &ModPoly) -> ModPoly {
        assert_eq!((self.modulus, self.nvars), (other.modulus, other.nvars));
        let p = self.modulus;
        let mut acc = ModAcc::default();
        for (e, c) in self.terms.iter().chain(&other.terms) {
            let slot = acc.entry(*e).or_insert(0);
            *slot = add_mod(*slot, *c, p);
        }
        Self::from_acc(p, self.nvars, acc)
    }

    pub fn scale(&self, k: u64) -> ModPoly {
        let p = self.modulus;
        let acc = self
            .terms
            .iter()
            .map(|(e, c)| (*e, mul_mod(*c, k % p, p)))
            .collect();
        Self::from_acc(p, self.nvars, acc)
    }

    pub fn mul(&self, other: &ModPoly) -> ModPoly {
        assert_eq!((self.modulus, self.nvars), (other.modulus, other.nvars));
        let p = self.modulus;
        let mut acc = ModAcc::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let slot = acc.entry(ea.mul(eb)).or_insert(0);
                *slot = add_mod(*slot, mul_mod(*ca, *cb, p), p);
            }
        }
        Self::from_acc(p, self.nvars, acc)
    }

    /// Fixes the listed variables to field values.
    pub fn specialize(&self, values: &[(usize, u64)]) -> ModPoly {
        let p = self.modulus;
        let mut acc = ModAcc::default();
        for (e, c) in &self.terms {
            let mut m = *e;
            let mut k = *c;
            for &(v, val) in values {
                let d = e.get(v);
                if d > 0 {
                    k = mul_mod(k, pow_mod(val, d as u64, p), p);
                    m = m.with(v, 0);
                }
            }
            let slot = acc.entry(m).or_insert(0);
            *slot = add_mod(*slot, k, p);
        }
        Self::from_acc(p, self.nvars, acc)
    }

    /// Substitutes `images[v]` for every variable `v`.
    pub fn compose(&self, images: &[ModPoly]) -> ModPoly {
        assert_eq!(images.len(), self.nvars);
        let p = self.modulus;
        let nv = images.first().map_or(self.nvars, |i| i.nvars);
        let mut powers: Vec<Vec<ModPoly>> = images
            .iter()
            .map(|q| vec![ModPoly::constant(nv, 1, p), q.clone()])
            .collect();
        let mut total = ModPoly::zero(nv, p);
        for (e, c) in &self.terms {
            let mut term = ModPoly::constant(nv, *c, p);
            for (v, pw) in powers.iter_mut().enumerate() {
                let k = e.get(v) as usize;
                if k == 0 {
                    continue;
                }
                while pw.len() <= k {
                    let next = pw[pw.len() - 1].mul(&pw[1]);
                    pw.push(next);
                }
                term = term.mul(&pw[k]);
            }
            total = total.add(&term);
        }
        total
    }
}

/// Coefficientwise image of `f` in the prime field of `ctx`.
pub fn reduce_mod(f: &Polynomial, ctx: &PrimeContext) -> Result<ModPoly, PolyError> {
    let mut terms = Vec::with_capacity(f.num_terms());
    for (e, c) in f.terms() {
        let r = ctx.reduce_rational(c)?;
        if r != 0 {
            terms.push((*e, r));
        }
    }
    Ok(ModPoly {
        modulus: ctx.modulus(),
        nvars: f.ring().len(),
        terms,
    })
}

/// `count` distinct random primes of the given width, derived from `seed`.
pub fn distinct_primes(bits: u32, count: usize, seed: u64) -> Result<Vec<PrimeContext>, PolyError> {
    let mut out: Vec<PrimeContext> = Vec::with_capacity(count);
    let mut s = seed;
    while out.len() < count {
        let ctx = PrimeContext::random(bits, s)?;
        if !out.iter().any(|c| c.modulus() == ctx.modulus()) {
            out.push(ctx);
        }
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miller_rabin_small_and_large() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(small, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime_u64((1u64 << 61) - 1));
        assert!(!is_prime_u64((1u64 << 61) + 1));
        // strong pseudoprime to bases 2..=37 would need > 3.3e24
        assert!(!is_prime_u64(3_215_031_751));
    }

    #[test]
    fn random_prime_width() {
        for seed in 0..5 {
            let ctx = PrimeContext::random(62, seed).unwrap();
            assert_eq!(64 - ctx.modulus().leading_zeros(), 62);
            assert!(is_prime_u64(ctx.modulus()));
        }
        assert!(PrimeContext::random(64, 0).is_err());
    }

    #[test]
    fn half_reduces_to_field_inverse() {
        let ctx = PrimeContext::with_modulus(101, 0).unwrap();
        assert_eq!(ctx.reduce_rational(&Rational::new(1, 2)).unwrap(), 51);
        assert_eq!(ctx.reduce_rational(&Rational::new(-1, 1)).unwrap(), 100);
        assert!(ctx.reduce_rational(&Rational::new(1, 202)).is_err());
    }

    #[test]
    fn degree_margin() {
        let ctx = PrimeContext::random(62, 1).unwrap();
        assert!(ctx.ensure_degree_margin(169).is_ok());
        let small = PrimeContext::random(40, 1).unwrap();
        assert!(small.ensure_degree_margin(169).is_err());
    }

    #[test]
    fn distinct() {
        let ps = distinct_primes(62, 4, 9).unwrap();
        let mut ms: Vec<u64> = ps.iter().map(|c| c.modulus()).collect();
        ms.sort();
        ms.dedup();
        assert_eq!(ms.len(), 4);
    }
}
