//! The degree-13 family `g_t`, its `phi_m` generalization, composition and
//! `J`-power cancellation.
//!
//! Composition convention: `compose(f, g)` applies `g` first, i.e. its
//! coordinates are `f_i(g_0, ..., g_4)`.
//!
//! Every map built here also carries its *J-adic form*: each coordinate as
//! `sum_e c_e * J^e` exactly as the construction produced it. The expanded
//! coordinates are the sum of that form, and the form is what the
//! restriction checks and the factored composition work from.

pub mod factored;
pub mod identities;

use std::collections::HashMap;
use std::sync::Arc;

use crate::invariants::{invariant_j_in, x_ring};
use crate::polyring::{PolyError, Polynomial, Rational, Ring, X_VARS};

pub use factored::{eval_factored, Factored, PowerBase};
pub use identities::{
    verify_group_law, verify_i_identity, verify_inverse, verify_j_identity,
    verify_quadric_invariance, GroupLawMode, IdentityReport, VerificationMode,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CremonaError {
    #[error("phi_m needs m >= 1")]
    DegreeZero,
    #[error("phi_m of degree {m} needs {expected} coefficients, got {got}")]
    CoefficientCount { m: u32, expected: usize, got: usize },
    #[error("phi_m is identically zero")]
    ZeroPhi,
    #[error("phi_m coefficients must not involve x0..x4")]
    CoefficientInX,
    #[error("map has no J-adic form")]
    NoJAdicForm,
    #[error("t = 0 is the degenerate member of the family")]
    DegenerateParameter,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// How the family parameter of a map was given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParameterKind {
    Identity,
    /// `t` is a polynomial in the ring's parameter variables.
    Symbolic(String),
    Rational(Rational),
    Generalized { m: u32 },
    Composite,
}

/// One coordinate as `sum_e coeff_e * J^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JAdic {
    pub parts: Vec<(u32, Polynomial)>,
}

impl JAdic {
    pub fn expand(&self, j: &PowerBase) -> Polynomial {
        let mut total = Polynomial::zero(j.ring());
        for (e, c) in &self.parts {
            total = &total + &(c * &j.pow(*e));
        }
        total
    }

    /// The part free of `J`; congruent to the coordinate modulo `J`.
    pub fn j_free_part(&self, ring: &Arc<Ring>) -> Polynomial {
        self.parts
            .iter()
            .find(|(e, _)| *e == 0)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| Polynomial::zero(ring))
    }
}

/// Five homogeneous coordinate forms defining a rational self-map of P^4.
#[derive(Debug, Clone)]
pub struct CremonaMap {
    coords: [Polynomial; 5],
    j_adic: Option<[JAdic; 5]>,
    declared_degree: u32,
    kind: ParameterKind,
}

impl CremonaMap {
    pub fn coords(&self) -> &[Polynomial; 5] {
        &self.coords
    }

    pub fn j_adic(&self) -> Option<&[JAdic; 5]> {
        self.j_adic.as_ref()
    }

    pub fn declared_degree(&self) -> u32 {
        self.declared_degree
    }

    pub fn kind(&self) -> &ParameterKind {
        &self.kind
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.coords[0].ring()
    }

    pub fn x_indices(&self) -> [usize; 5] {
        x_indices(self.ring()).expect("map ring contains x0..x4")
    }

    pub fn j(&self) -> Polynomial {
        invariant_j_in(self.ring()).expect("map ring contains x0..x4")
    }

    pub fn identity(ring: &Arc<Ring>) -> Result<Self, PolyError> {
        let x = x_indices(ring)?;
        let coords: [Polynomial; 5] = std::array::from_fn(|i| Polynomial::var_at(ring, x[i]));
        let j_adic = coords.clone().map(|c| JAdic { parts: vec![(0, c)] });
        Ok(CremonaMap {
            coords,
            j_adic: Some(j_adic),
            declared_degree: 1,
            kind: ParameterKind::Identity,
        })
    }

    /// A map from explicit forms; the declared degree is taken from them.
    pub fn from_coords(coords: [Polynomial; 5]) -> Result<Self, PolyError> {
        let x = x_indices(coords[0].ring())?;
        let declared_degree = coords
            .iter()
            .filter_map(|c| c.degree_in(&x))
            .max()
            .unwrap_or(0);
        Ok(CremonaMap {
            coords,
            j_adic: None,
            declared_degree,
            kind: ParameterKind::Composite,
        })
    }

    /// Every coordinate is homogeneous of the declared degree in `x0..x4`.
    pub fn is_homogeneous(&self) -> bool {
        let x = self.x_indices();
        self.coords.iter().all(|c| {
            c.is_zero() || (c.is_homogeneous_in(&x) && c.degree_in(&x) == Some(self.declared_degree))
        })
    }

    /// Substitutes values or expressions for parameter variables and moves
    /// the result into `target`.
    pub fn substitute_params(
        &self,
        bindings: &HashMap<String, Polynomial>,
        target: &Arc<Ring>,
    ) -> Result<CremonaMap, PolyError> {
        let sub = |p: &Polynomial| p.substitute(bindings, target);
        let coords = [
            sub(&self.coords[0])?,
            sub(&self.coords[1])?,
            sub(&self.coords[2])?,
            sub(&self.coords[3])?,
            sub(&self.coords[4])?,
        ];
        let j_adic = match &self.j_adic {
            None => None,
            Some(forms) => {
                let mut out = Vec::with_capacity(5);
                for form in forms {
                    let parts = form
                        .parts
                        .iter()
                        .map(|(e, c)| Ok((*e, sub(c)?)))
                        .collect::<Result<Vec<_>, PolyError>>()?;
                    out.push(JAdic { parts });
                }
                Some(out.try_into().expect("five forms"))
            }
        };
        Ok(CremonaMap {
            coords,
            j_adic,
            declared_degree: self.declared_degree,
            kind: self.kind.clone(),
        })
    }

    /// Moves the map into a ring with more (or reordered) variables.
    pub fn embed(&self, target: &Arc<Ring>) -> Result<CremonaMap, PolyError> {
        self.substitute_params(&HashMap::new(), target)
    }

    /// Image of a rational point; `values` follows the ring's variable order.
    pub fn evaluate(&self, values: &[Rational]) -> Result<[Rational; 5], PolyError> {
        let v = |i: usize| self.coords[i].evaluate(values);
        Ok([v(0)?, v(1)?, v(2)?, v(3)?, v(4)?])
    }

    /// Specializes some ring variables to rationals, keeping the ring.
    pub fn specialize(&self, values: &[(usize, Rational)]) -> CremonaMap {
        CremonaMap {
            coords: self.coords.clone().map(|c| c.specialize(values)),
            j_adic: self.j_adic.clone().map(|forms| {
                forms.map(|f| JAdic {
                    parts: f
                        .parts
                        .into_iter()
                        .map(|(e, c)| (e, c.specialize(values)))
                        .collect(),
                })
            }),
            declared_degree: self.declared_degree,
            kind: self.kind.clone(),
        }
    }
}

pub fn x_indices(ring: &Arc<Ring>) -> Result<[usize; 5], PolyError> {
    Ok([
        ring.require(X_VARS[0])?,
        ring.require(X_VARS[1])?,
        ring.require(X_VARS[2])?,
        ring.require(X_VARS[3])?,
        ring.require(X_VARS[4])?,
    ])
}

/// `Q[x0..x4, params...]`.
pub fn family_ring(params: &[&str]) -> Result<Arc<Ring>, PolyError> {
    x_ring().extended(params)
}

fn binom(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// The family member with parameter `t`, given as an expression in `ring`:
///
/// ```text
/// (f_t)_k = sum_{j=0..k} C(k, j) * x_{k-j} * (t x0^3)^j * J^(4-j)
/// ```
pub fn build_gt_in(ring: &Arc<Ring>, t: &Polynomial) -> Result<CremonaMap, CremonaError> {
    let x = x_indices(ring)?;
    if t.degree_in(&x).unwrap_or(0) > 0 {
        return Err(CremonaError::CoefficientInX);
    }
    let j = PowerBase::new(invariant_j_in(ring)?);
    let xv = |i: usize| Polynomial::var_at(ring, x[i]);
    let shift = t * &xv(0).pow(3);
    let mut coords = Vec::with_capacity(5);
    let mut forms = Vec::with_capacity(5);
    for k in 0..5u32 {
        let mut parts = Vec::new();
        for jj in 0..=k {
            let c = Polynomial::constant(ring, Rational::from_int(binom(k, jj)));
            let coeff = &(&c * &xv((k - jj) as usize)) * &shift.pow(jj);
            if !coeff.is_zero() {
                parts.push((4 - jj, coeff));
            }
        }
        let form = JAdic { parts };
        coords.push(form.expand(&j));
        forms.push(form);
    }
    let kind = match t.as_constant() {
        Some(r) => ParameterKind::Rational(r),
        None => ParameterKind::Symbolic(t.to_string()),
    };
    Ok(CremonaMap {
        coords: coords.try_into().expect("five"),
        j_adic: Some(forms.try_into().expect("five")),
        declared_degree: 13,
        kind,
    })
}

/// Parameter of [`build_gt`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TParam {
    /// A fresh symbol with this name, adjoined after `x0..x4`.
    Symbolic(String),
    Value(Rational),
}

/// `g_t` over `Q[x0..x4, t]` for a symbolic `t`, or over `Q[x0..x4]` for a
/// rational one. The rational member is produced by evaluating the symbolic
/// family, so the two always agree.
pub fn build_gt(t: &TParam) -> Result<CremonaMap, CremonaError> {
    match t {
        TParam::Symbolic(name) => {
            let ring = family_ring(&[name.as_str()])?;
            let tv = Polynomial::var(&ring, name)?;
            build_gt_in(&ring, &tv)
        }
        TParam::Value(r) => {
            let sym = build_gt(&TParam::Symbolic("t".into()))?;
            let target = x_ring();
            let bindings: HashMap<String, Polynomial> =
                [("t".to_string(), Polynomial::constant(&target, r.clone()))].into();
            let mut map = sym.substitute_params(&bindings, &target)?;
            map.kind = ParameterKind::Rational(r.clone());
            Ok(map)
        }
    }
}

/// A binary form `phi_m(x, y) = sum_i coeffs[i] x^(m-i) y^i`, applied as
/// `phi = phi_m(x0^3, J)`. Coefficients are constants of the map ring and
/// may involve parameter symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiSpec {
    m: u32,
    coeffs: Vec<Polynomial>,
}

impl PhiSpec {
    pub fn new(m: u32, coeffs: Vec<Polynomial>) -> Result<Self, CremonaError> {
        if m == 0 {
            return Err(CremonaError::DegreeZero);
        }
        if coeffs.len() != m as usize + 1 {
            return Err(CremonaError::CoefficientCount {
                m,
                expected: m as usize + 1,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().all(Polynomial::is_zero) {
            return Err(CremonaError::ZeroPhi);
        }
        let ring = coeffs[0].ring().clone();
        let x = x_indices(&ring)?;
        if coeffs.iter().any(|c| c.degree_in(&x).unwrap_or(0) > 0) {
            return Err(CremonaError::CoefficientInX);
        }
        Ok(PhiSpec { m, coeffs })
    }

    /// Rational coefficients over `Q[x0..x4]`.
    pub fn rational(m: u32, coeffs: &[Rational]) -> Result<Self, CremonaError> {
        let ring = x_ring();
        Self::new(
            m,
            coeffs
                .iter()
                .map(|c| Polynomial::constant(&ring, c.clone()))
                .collect(),
        )
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.coeffs[0].ring()
    }
}

/// The generalized map
///
/// ```text
/// x'_k = sum_{j=0..k} C(k, j) * x_{k-j} * phi^j * J^(m (4-j)),  phi = phi_m(x0^3, J)
/// ```
///
/// built with a placeholder symbol for `J` so that the J-adic form is read
/// off directly.
pub fn build_generalized(spec: &PhiSpec) -> Result<CremonaMap, CremonaError> {
    let ring = spec.ring().clone();
    let placeholder = ring.fresh_name("w");
    let wring = ring.extended(&[placeholder.as_str()])?;
    let w_idx = wring.require(&placeholder)?;
    let x = x_indices(&wring)?;
    let w = Polynomial::var_at(&wring, w_idx);
    let xv = |i: usize| Polynomial::var_at(&wring, x[i]);
    let x03 = xv(0).pow(3);
    let m = spec.m;

    let mut phi = Polynomial::zero(&wring);
    for (i, c) in spec.coeffs.iter().enumerate() {
        let c = c.embed(&wring)?;
        phi = &phi + &(&c * &(&x03.pow(m - i as u32) * &w.pow(i as u32)));
    }

    let j = PowerBase::new(invariant_j_in(&ring)?);
    let mut coords = Vec::with_capacity(5);
    let mut forms = Vec::with_capacity(5);
    for k in 0..5u32 {
        let mut coord = Polynomial::zero(&wring);
        for jj in 0..=k {
            let c = Polynomial::constant(&wring, Rational::from_int(binom(k, jj)));
            let term = &(&(&c * &xv((k - jj) as usize)) * &phi.pow(jj)) * &w.pow(m * (4 - jj));
            coord = &coord + &term;
        }
        let mut parts = Vec::new();
        for (e, c) in coord.coefficients_in(w_idx) {
            parts.push((e, c.embed(&ring)?));
        }
        let form = JAdic { parts };
        coords.push(form.expand(&j));
        forms.push(form);
    }
    Ok(CremonaMap {
        coords: coords.try_into().expect("five"),
        j_adic: Some(forms.try_into().expect("five")),
        declared_degree: 1 + 12 * m,
        kind: ParameterKind::Generalized { m },
    })
}

/// Coordinates of `f` evaluated at the coordinates of `g` (apply `g` first).
/// Variables other than `x0..x4` are carried through and must exist in
/// `g`'s ring.
pub fn compose(f: &CremonaMap, g: &CremonaMap) -> Result<[Polynomial; 5], PolyError> {
    let target = g.ring().clone();
    let bindings: HashMap<String, Polynomial> = X_VARS
        .iter()
        .zip(g.coords.iter())
        .map(|(n, c)| (n.to_string(), c.clone()))
        .collect();
    let sub = |p: &Polynomial| p.substitute(&bindings, &target);
    Ok([
        sub(&f.coords[0])?,
        sub(&f.coords[1])?,
        sub(&f.coords[2])?,
        sub(&f.coords[3])?,
        sub(&f.coords[4])?,
    ])
}

/// Composition kept in `J^e * P` form, normalized coordinatewise.
///
/// `f` must carry a J-adic form and share its ring with `g`; the base `J`
/// is that of the common ring.
pub fn compose_factored(f: &CremonaMap, g: &CremonaMap) -> Result<[Factored; 5], CremonaError> {
    let forms = f.j_adic.as_ref().ok_or(CremonaError::NoJAdicForm)?;
    if f.ring() != g.ring() {
        return Err(PolyError::RingMismatch {
            left: f.ring().names().join(","),
            right: g.ring().names().join(","),
        }
        .into());
    }
    let j = g.j();
    let base = PowerBase::new(j.clone());
    compose_factored_with(forms, &j, g.coords(), &base)
}

/// Core of [`compose_factored`]. `outer_j` is `J` in the variables that get
/// substituted, while `base` is the polynomial results are normalized
/// against; they differ once some input variables have been specialized.
pub(crate) fn compose_factored_with(
    forms: &[JAdic; 5],
    outer_j: &Polynomial,
    g_coords: &[Polynomial; 5],
    base: &PowerBase,
) -> Result<[Factored; 5], CremonaError> {
    let slots = x_indices(outer_j.ring())?;
    let images: Vec<Factored> = g_coords
        .iter()
        .map(|c| Factored::plain(c.clone()).normalized(base))
        .collect::<Result<_, _>>()?;
    let j_of_g = eval_factored(outer_j, &slots, &images, base).normalized(base)?;
    let mut out = Vec::with_capacity(5);
    for form in forms {
        let mut pieces = Vec::with_capacity(form.parts.len());
        for (e, c) in &form.parts {
            let inner = eval_factored(c, &slots, &images, base);
            pieces.push(inner.mul(&j_of_g.pow(*e)));
        }
        out.push(Factored::sum(pieces, base).normalized(base)?);
    }
    Ok(out.try_into().expect("five"))
}

/// Result of [`cancel_j_power`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cancelled {
    pub coords: [Polynomial; 5],
    pub j_exponent: u32,
    /// Common monomial factor removed after the J-powers, as an exponent list
    /// in ring order.
    pub monomial: Vec<u32>,
}

/// Divides all five coordinates by `J` while every division is exact, then
/// removes their common monomial factor.
pub fn cancel_j_power(coords: &[Polynomial; 5]) -> Result<Cancelled, PolyError> {
    let ring = coords[0].ring().clone();
    let j = invariant_j_in(&ring)?;
    let mut cur = coords.clone();
    let mut removed = 0;
    if cur.iter().any(|c| !c.is_zero()) {
        'outer: loop {
            let mut next = Vec::with_capacity(5);
            for c in &cur {
                match c.exact_divide(&j)? {
                    Some(q) => next.push(q),
                    None => break 'outer,
                }
            }
            cur = next.try_into().expect("five");
            removed += 1;
        }
    }
    let content = cur
        .iter()
        .filter(|c| !c.is_zero())
        .map(Polynomial::monomial_content)
        .reduce(|a, b| a.gcd(&b))
        .unwrap_or(crate::polyring::ExponentVector::ONE);
    let coords = cur.map(|c| c.div_monomial(&content));
    Ok(Cancelled {
        coords,
        j_exponent: removed,
        monomial: (0..ring.len()).map(|v| content.get(v)).collect(),
    })
}

/// Factored analogue of [`cancel_j_power`]: pulls out the smallest J-power.
pub fn cancel_j_power_factored(
    coords: &[Factored; 5],
    base: &PowerBase,
) -> ([Polynomial; 5], u32) {
    let min = coords
        .iter()
        .filter(|f| !f.is_zero())
        .map(|f| f.j_exp)
        .min()
        .unwrap_or(0);
    let out = coords.clone().map(|f| {
        if f.is_zero() {
            f.cofactor
        } else {
            &f.cofactor * &base.pow(f.j_exp - min)
        }
    });
    (out, min)
}
