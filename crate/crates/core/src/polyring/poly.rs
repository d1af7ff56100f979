use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::monomial::{ExponentVector, Ring};
use super::rational::Rational;
use super::PolyError;

/// Sparse polynomial with exact rational coefficients.
///
/// Terms are kept sorted by decreasing graded-lex order with no zero
/// coefficients, so the first term is the leading term and structural
/// equality is polynomial equality.
#[derive(Clone)]
pub struct Polynomial {
    ring: Arc<Ring>,
    terms: Vec<(ExponentVector, Rational)>,
}

type Acc = FxHashMap<ExponentVector, Rational>;

fn acc_into_terms(acc: Acc) -> Vec<(ExponentVector, Rational)> {
    let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    terms
}

impl Polynomial {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: &Arc<Ring>, c: Rational) -> Self {
        Self::monomial(ring, c, ExponentVector::ONE)
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn monomial(ring: &Arc<Ring>, c: Rational, exps: ExponentVector) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(exps, c)] };
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn var(ring: &Arc<Ring>, name: &str) -> Result<Self, PolyError> {
        let i = ring.require(name)?;
        Ok(Self::var_at(ring, i))
    }

    pub fn var_at(ring: &Arc<Ring>, index: usize) -> Self {
        assert!(index < ring.len());
        Self::monomial(ring, Rational::one(), ExponentVector::unit(index))
    }

    /// Builds a polynomial from arbitrary (possibly repeated or zero) terms.
    pub fn from_terms<I>(ring: &Arc<Ring>, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut acc = Acc::default();
        for (exps, c) in terms {
            if exps.len() != ring.len() {
                return Err(PolyError::ExponentLength {
                    expected: ring.len(),
                    got: exps.len(),
                });
            }
            *acc.entry(ExponentVector::from_slice(&exps)?).or_default() += &c;
        }
        Ok(Polynomial {
            ring: ring.clone(),
            terms: acc_into_terms(acc),
        })
    }

    pub(crate) fn from_sorted_terms(
        ring: &Arc<Ring>,
        terms: Vec<(ExponentVector, Rational)>,
    ) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> &[(ExponentVector, Rational)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(e, _)| e.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// Constant value, if the polynomial has no variables in it.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(e, c)] if e.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<&(ExponentVector, Rational)> {
        self.terms.first()
    }

    /// Total degree; `None` for the zero polynomial, whose degree is undefined.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.first().map(|(e, _)| e.total_degree())
    }

    /// Largest total degree in the given variables; `None` for zero.
    pub fn degree_in(&self, vars: &[usize]) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e.degree_in(vars)).max()
    }

    /// Smallest total degree in the given variables; `None` for zero.
    pub fn min_degree_in(&self, vars: &[usize]) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e.degree_in(vars)).min()
    }

    pub fn is_homogeneous_in(&self, vars: &[usize]) -> bool {
        let mut degs = self.terms.iter().map(|(e, _)| e.degree_in(vars));
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, PolyError> {
        names.iter().map(|n| self.ring.require(n.as_ref())).collect()
    }

    fn check_ring(&self, other: &Polynomial) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(PolyError::RingMismatch {
                left: self.ring.names().join(","),
                right: other.ring.names().join(","),
            })
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &Polynomial, negate: bool) -> Polynomial {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let take_b = |c: &Rational| if negate { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((b[j].0, take_b(&b[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(e, c)| (*e, take_b(c))));
        Polynomial::from_sorted_terms(&self.ring, out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero(&self.ring));
        }
        if self.terms.len() == 1 {
            return Ok(other.mul_term(&self.terms[0].0, &self.terms[0].1));
        }
        if other.terms.len() == 1 {
            return Ok(self.mul_term(&other.terms[0].0, &other.terms[0].1));
        }
        let mut acc = Acc::default();
        acc.reserve(self.terms.len().max(other.terms.len()) * 4);
        add_product_into(&mut acc, self, other);
        Ok(Polynomial {
            ring: self.ring.clone(),
            terms: acc_into_terms(acc),
        })
    }

    /// Multiplies by `c * x^e`; order is preserved because grlex is a monomial order.
    pub fn mul_term(&self, e: &ExponentVector, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, k)| (m.mul(e), k * c))
            .collect();
        Polynomial::from_sorted_terms(&self.ring, terms)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        self.mul_term(&ExponentVector::ONE, c)
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        if n == 0 {
            return Polynomial::one(&self.ring);
        }
        if self.terms.len() == 1 {
            let (e, c) = &self.terms[0];
            return Polynomial::monomial(&self.ring, c.pow(n), e.pow(n));
        }
        let mut base = self.clone();
        let mut acc: Option<Polynomial> = None;
        let mut k = n;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = &base * &base;
        }
        acc.expect("n > 0")
    }

    /// Simultaneous substitution of polynomials (all in `target`) for
    /// variables of this polynomial. Unbound variables are carried over by
    /// name and must exist in `target`.
    pub fn substitute(
        &self,
        bindings: &HashMap<String, Polynomial>,
        target: &Arc<Ring>,
    ) -> Result<Polynomial, PolyError> {
        let mut images = Vec::with_capacity(self.ring.len());
        for name in self.ring.names() {
            let image = match bindings.get(name) {
                Some(p) => {
                    if p.ring.as_ref() != target.as_ref() {
                        return Err(PolyError::RingMismatch {
                            left: p.ring.names().join(","),
                            right: target.names().join(","),
                        });
                    }
                    p.clone()
                }
                None => Polynomial::var(target, name)?,
            };
            images.push(image);
        }
        Ok(self.compose(&images, target))
    }

    /// Substitutes `images[i]` for the i-th variable of this ring.
    pub fn compose(&self, images: &[Polynomial], target: &Arc<Ring>) -> Polynomial {
        assert_eq!(images.len(), self.ring.len(), "one image per variable");
        let nvars = self.ring.len();
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(target), p.clone()])
            .collect();
        let mut acc = Acc::default();
        for (e, c) in &self.terms {
            let mut factors: Vec<&Polynomial> = Vec::new();
            for v in 0..nvars {
                let k = e.get(v) as usize;
                if k == 0 {
                    continue;
                }
                while powers[v].len() <= k {
                    let next = &powers[v][powers[v].len() - 1] * &images[v];
                    powers[v].push(next);
                }
            }
            for v in 0..nvars {
                let k = e.get(v) as usize;
                if k > 0 {
                    factors.push(&powers[v][k]);
                }
            }
            // Multiply the smaller factors first and fold the largest into
            // the accumulator directly.
            factors.sort_by_key(|p| p.num_terms());
            match factors.len() {
                0 => *acc.entry(ExponentVector::ONE).or_default() += c,
                _ => {
                    let last = factors.pop().expect("nonempty");
                    let mut prefix = Polynomial::constant(target, c.clone());
                    for f in factors {
                        prefix = &prefix * f;
                    }
                    add_product_into(&mut acc, &prefix, last);
                }
            }
        }
        Polynomial {
            ring: target.clone(),
            terms: acc_into_terms(acc),
        }
    }

    /// Re-expresses this polynomial in another ring, matching variables by
    /// name. Every variable that actually occurs must exist in `target`.
    pub fn embed(&self, target: &Arc<Ring>) -> Result<Polynomial, PolyError> {
        let used = self.variables_used();
        let map: Vec<Option<usize>> = self
            .ring
            .names()
            .iter()
            .enumerate()
            .map(|(i, n)| match target.index_of(n) {
                Some(j) => Ok(Some(j)),
                None if used.contains(&i) => Err(PolyError::UnknownVariable(n.clone())),
                None => Ok(None),
            })
            .collect::<Result<_, _>>()?;
        let mut acc = Acc::default();
        for (e, c) in &self.terms {
            let mut exps = vec![0u32; target.len()];
            for (i, j) in map.iter().enumerate() {
                if let Some(j) = j {
                    exps[*j] = e.get(i);
                }
            }
            acc.insert(ExponentVector::from_slice(&exps)?, c.clone());
        }
        Ok(Polynomial {
            ring: target.clone(),
            terms: acc_into_terms(acc),
        })
    }

    pub fn evaluate(&self, values: &[Rational]) -> Result<Rational, PolyError> {
        if values.len() != self.ring.len() {
            return Err(PolyError::ExponentLength {
                expected: self.ring.len(),
                got: values.len(),
            });
        }
        let nvars = self.ring.len();
        let mut powers: Vec<Vec<Rational>> = values
            .iter()
            .map(|v| vec![Rational::one(), v.clone()])
            .collect();
        let mut sum = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for v in 0..nvars {
                let k = e.get(v) as usize;
                if k == 0 {
                    continue;
                }
                while powers[v].len() <= k {
                    let next = &powers[v][powers[v].len() - 1] * &values[v];
                    powers[v].push(next);
                }
                term = &term * &powers[v][k];
            }
            sum += &term;
        }
        Ok(sum)
    }

    /// Evaluates at a point given by name; every variable must be bound.
    pub fn evaluate_named(&self, point: &HashMap<String, Rational>) -> Result<Rational, PolyError> {
        let values = self
            .ring
            .names()
            .iter()
            .map(|n| {
                point
                    .get(n)
                    .cloned()
                    .ok_or_else(|| PolyError::UnboundVariable(n.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.evaluate(&values)
    }

    /// Fixes some variables to rational values, keeping the ring.
    pub fn specialize(&self, values: &[(usize, Rational)]) -> Polynomial {
        let mut acc = Acc::default();
        let mut powers: HashMap<(usize, u32), Rational> = HashMap::new();
        for (e, c) in &self.terms {
            let mut m = *e;
            let mut k = c.clone();
            for (v, val) in values {
                let d = e.get(*v);
                if d > 0 {
                    let p = powers.entry((*v, d)).or_insert_with(|| val.pow(d));
                    k = &k * p;
                    m = m.with(*v, 0);
                }
            }
            *acc.entry(m).or_default() += &k;
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: acc_into_terms(acc),
        }
    }

    pub fn partial_derivative(&self, var: &str) -> Result<Polynomial, PolyError> {
        let v = self.ring.require(var)?;
        Ok(self.derivative_at(v))
    }

    pub fn derivative_at(&self, v: usize) -> Polynomial {
        // Lowering the same exponent in every surviving term preserves grlex order.
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.get(v) > 0)
            .map(|(e, c)| {
                let k = e.get(v);
                (e.with(v, k - 1), c * &Rational::from_int(k as i64))
            })
            .collect();
        Polynomial::from_sorted_terms(&self.ring, terms)
    }

    /// Exact division by leading-term reduction under grlex.
    ///
    /// Returns `Ok(None)` when `g` does not divide `self`.
    pub fn exact_divide(&self, g: &Polynomial) -> Result<Option<Polynomial>, PolyError> {
        self.check_ring(g)?;
        let (lead_e, lead_c) = g.leading_term().ok_or(PolyError::DivisionByZero)?.clone();
        if self.is_zero() {
            return Ok(Some(Polynomial::zero(&self.ring)));
        }
        if self.total_degree() < g.total_degree() {
            return Ok(None);
        }
        if g.terms.len() == 1 {
            let inv = lead_c.recip();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (e, c) in &self.terms {
                match e.checked_div(&lead_e) {
                    Some(q) => terms.push((q, c * &inv)),
                    None => return Ok(None),
                }
            }
            return Ok(Some(Polynomial::from_sorted_terms(&self.ring, terms)));
        }
        let inv = lead_c.recip();
        let tail = &g.terms[1..];
        let mut rem: BTreeMap<ExponentVector, Rational> =
            self.terms.iter().cloned().collect();
        let mut quotient = Vec::new();
        while let Some((e, c)) = rem.pop_last() {
            let Some(qe) = e.checked_div(&lead_e) else {
                return Ok(None);
            };
            let qc = &c * &inv;
            for (te, tc) in tail {
                let m = qe.mul(te);
                let delta = &qc * tc;
                match rem.entry(m) {
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() -= &delta;
                        if o.get().is_zero() {
                            o.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(-delta);
                    }
                }
            }
            quotient.push((qe, qc));
        }
        Ok(Some(Polynomial::from_sorted_terms(&self.ring, quotient)))
    }

    /// Largest `k` with `g^k | self`, together with the cofactor.
    /// Zero has no finite valuation and is returned unchanged with `k = 0`.
    pub fn strip_factor(&self, g: &Polynomial) -> Result<(u32, Polynomial), PolyError> {
        let mut k = 0;
        let mut cur = self.clone();
        if cur.is_zero() {
            return Ok((0, cur));
        }
        if g.is_constant() {
            return Err(PolyError::DivisionByZero);
        }
        while let Some(q) = cur.exact_divide(g)? {
            cur = q;
            k += 1;
        }
        Ok((k, cur))
    }

    /// Splits into parts homogeneous in `vars`, keyed by degree in `vars`.
    pub fn homogeneous_components(&self, vars: &[usize]) -> BTreeMap<u32, Polynomial> {
        let mut parts: BTreeMap<u32, Vec<(ExponentVector, Rational)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            parts
                .entry(e.degree_in(vars))
                .or_default()
                .push((*e, c.clone()));
        }
        parts
            .into_iter()
            .map(|(d, terms)| (d, Polynomial::from_sorted_terms(&self.ring, terms)))
            .collect()
    }

    /// Coefficients with respect to one variable: `self = Σ c_k · v^k`.
    pub fn coefficients_in(&self, v: usize) -> BTreeMap<u32, Polynomial> {
        let mut parts: BTreeMap<u32, Vec<(ExponentVector, Rational)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            parts
                .entry(e.get(v))
                .or_default()
                .push((e.with(v, 0), c.clone()));
        }
        parts
            .into_iter()
            .map(|(d, mut terms)| {
                terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                (d, Polynomial::from_sorted_terms(&self.ring, terms))
            })
            .collect()
    }

    /// Componentwise minimum of all exponent vectors (the monomial content).
    pub fn monomial_content(&self) -> ExponentVector {
        let mut it = self.terms.iter().map(|(e, _)| *e);
        match it.next() {
            None => ExponentVector::ONE,
            Some(first) => it.fold(first, |g, e| g.gcd(&e)),
        }
    }

    /// Divides every term by `x^e`; panics unless `e` divides every monomial.
    pub fn div_monomial(&self, e: &ExponentVector) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.checked_div(e).expect("monomial divides"), c.clone()))
            .collect();
        Polynomial::from_sorted_terms(&self.ring, terms)
    }

    pub fn variables_used(&self) -> Vec<usize> {
        (0..self.ring.len())
            .filter(|&v| self.terms.iter().any(|(e, _)| e.get(v) > 0))
            .collect()
    }
}

fn add_product_into(acc: &mut Acc, a: &Polynomial, b: &Polynomial) {
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            acc.entry(ea.mul(eb)).or_default().add_mul(ca, cb);
        }
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut factors = Vec::new();
            for v in 0..self.ring.len() {
                match e.get(v) {
                    0 => {}
                    1 => factors.push(self.ring.names()[v].clone()),
                    k => factors.push(format!("{}^{}", self.ring.names()[v], k)),
                }
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({self})", self.ring.names().join(","))
    }
}

// Operator sugar; these panic on a ring mismatch. Use the `checked_*`
// methods where the rings are not known to agree.
impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("ring mismatch in add")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("ring mismatch in sub")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("ring mismatch in mul")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let terms = self.terms.iter().map(|(e, c)| (*e, -c)).collect();
        Polynomial::from_sorted_terms(&self.ring, terms)
    }
}

macro_rules! forward_poly {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial { (&self).$m(&rhs) }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial { (&self).$m(rhs) }
        }
    )*};
}
forward_poly!(Add add, Sub sub, Mul mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
