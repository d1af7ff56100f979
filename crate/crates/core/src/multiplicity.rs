//! Order of vanishing of forms on projective 4-space at points and at the
//! generic point of parametrized curves.
//!
//! Both cases use one substitution. For a locus `gamma` (constant for a
//! point, a polynomial in one parameter for a curve) and a chart index `c`
//! with `gamma_c != 0`:
//!
//! ```text
//! x_c -> gamma_c,   x_j -> gamma_j + gamma_c * y_j   (j != c)
//! ```
//!
//! For a form of degree `d` this is `gamma_c^d` times the affine expansion
//! around `gamma / gamma_c`, so the multiplicity is the lowest total degree
//! in the `y` variables. Any variables other than `x0..x4` (the parameter of
//! the curve, or a family parameter `t`) are treated as coefficients: a term
//! counts iff its coefficient polynomial is nonzero, which is exactly the
//! generic-point multiplicity over the rational function field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cremona::x_indices;
use crate::polyring::{PolyError, Polynomial, Rational, Ring, UniPoly, X_VARS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MultError {
    #[error("form is not homogeneous in x0..x4")]
    NotHomogeneous,
    #[error("the zero vector is not a projective point")]
    ZeroPoint,
    #[error("chart coordinate {0} vanishes")]
    ChartCoordinateZero(usize),
    #[error("chart index {0} is out of range")]
    ChartOutOfRange(usize),
    #[error("curve components are all zero")]
    ZeroCurve,
    #[error("curve components must live in a ring with one variable")]
    NotUnivariate,
    #[error("curve components share a nonconstant factor")]
    CommonFactor,
    #[error("no sample parameter gave a point of the curve")]
    NoSamples,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A multiplicity, or `Infinite` for a form vanishing on the whole locus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MultiplicityValue {
    Finite(u32),
    Infinite,
}

impl MultiplicityValue {
    pub fn finite(self) -> Option<u32> {
        match self {
            MultiplicityValue::Finite(n) => Some(n),
            MultiplicityValue::Infinite => None,
        }
    }
}

impl Ord for MultiplicityValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use MultiplicityValue::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => Ordering::Less,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Infinite, Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for MultiplicityValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for MultiplicityValue {
    type Output = MultiplicityValue;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (MultiplicityValue::Finite(a), MultiplicityValue::Finite(b)) => {
                MultiplicityValue::Finite(a + b)
            }
            _ => MultiplicityValue::Infinite,
        }
    }
}

impl fmt::Display for MultiplicityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiplicityValue::Finite(n) => write!(f, "{n}"),
            MultiplicityValue::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectivePoint {
    coords: [Rational; 5],
    chart: usize,
}

impl ProjectivePoint {
    /// Uses the first nonzero coordinate as the chart.
    pub fn new(coords: [Rational; 5]) -> Result<Self, MultError> {
        let chart = coords
            .iter()
            .position(|c| !c.is_zero())
            .ok_or(MultError::ZeroPoint)?;
        Ok(ProjectivePoint { coords, chart })
    }

    pub fn with_chart(coords: [Rational; 5], chart: usize) -> Result<Self, MultError> {
        if chart >= 5 {
            return Err(MultError::ChartOutOfRange(chart));
        }
        if coords[chart].is_zero() {
            return Err(if coords.iter().all(Rational::is_zero) {
                MultError::ZeroPoint
            } else {
                MultError::ChartCoordinateZero(chart)
            });
        }
        Ok(ProjectivePoint { coords, chart })
    }

    pub fn from_ints(c: [i64; 5]) -> Result<Self, MultError> {
        Self::new(c.map(Rational::from_int))
    }

    pub fn coords(&self) -> &[Rational; 5] {
        &self.coords
    }

    pub fn chart(&self) -> usize {
        self.chart
    }

    /// The same point with coordinates multiplied by `lambda != 0`.
    pub fn scaled(&self, lambda: &Rational) -> Result<Self, MultError> {
        Self::with_chart(self.coords.clone().map(|c| &c * lambda), self.chart)
    }

    /// Coordinates divided by the chart coordinate.
    pub fn normalized(&self) -> [Rational; 5] {
        let inv = self.coords[self.chart].recip();
        self.coords.clone().map(|c| &c * &inv)
    }
}

/// Five polynomials in one parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParametrizedCurve {
    components: [Polynomial; 5],
    label: String,
    chart: usize,
}

fn to_unipoly(p: &Polynomial) -> UniPoly {
    let deg = p.total_degree().unwrap_or(0) as usize;
    let mut coeffs = vec![Rational::zero(); deg + 1];
    for (e, c) in p.terms() {
        coeffs[e.total_degree() as usize] = c.clone();
    }
    UniPoly::new(coeffs)
}

impl ParametrizedCurve {
    /// Validates the components; the chart is the first component that is a
    /// nonzero constant, else the first nonzero one.
    pub fn new(components: [Polynomial; 5], label: &str) -> Result<Self, MultError> {
        let ring = components[0].ring().clone();
        if ring.len() != 1 || components.iter().any(|c| c.ring() != &ring) {
            return Err(MultError::NotUnivariate);
        }
        let chart = components
            .iter()
            .position(|c| !c.is_zero() && c.is_constant())
            .or_else(|| components.iter().position(|c| !c.is_zero()))
            .ok_or(MultError::ZeroCurve)?;
        let g = components
            .iter()
            .map(to_unipoly)
            .fold(UniPoly::zero(), |acc, p| acc.gcd(&p));
        if g.degree().is_some_and(|d| d > 0) {
            return Err(MultError::CommonFactor);
        }
        Ok(ParametrizedCurve {
            components,
            label: label.to_string(),
            chart,
        })
    }

    pub fn components(&self) -> &[Polynomial; 5] {
        &self.components
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn chart(&self) -> usize {
        self.chart
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.components[0].ring()
    }

    pub fn param(&self) -> &str {
        &self.ring().names()[0]
    }

    /// The curve point at parameter `u`, or `None` where every component
    /// vanishes.
    pub fn point_at(&self, u: &Rational) -> Result<Option<ProjectivePoint>, MultError> {
        let mut coords = Vec::with_capacity(5);
        for c in &self.components {
            coords.push(c.evaluate(std::slice::from_ref(u))?);
        }
        let coords: [Rational; 5] = coords.try_into().expect("five");
        Ok(ProjectivePoint::new(coords).ok())
    }
}

fn curve_from(param: &str, comps: [Vec<(u32, i64)>; 5], label: &str) -> ParametrizedCurve {
    let ring = Ring::new(&[param]).expect("valid ring");
    let components = comps.map(|terms| {
        Polynomial::from_terms(
            &ring,
            terms.into_iter().map(|(e, c)| (vec![e], Rational::from_int(c))),
        )
        .expect("one variable")
    });
    ParametrizedCurve::new(components, label).expect("named curve is valid")
}

/// `B(v) = (0, 1, 2v, 3v^2, 4v^3)`: quartics `T1 (T0 + v T1)^3`.
pub fn curve_b() -> ParametrizedCurve {
    curve_from(
        "v",
        [vec![], vec![(0, 1)], vec![(1, 2)], vec![(2, 3)], vec![(3, 4)]],
        "B",
    )
}

/// `C(v) = (0, 0, 0, 1, 4v)`: quartics `(T0 + v T1) T1^3`.
pub fn curve_c() -> ParametrizedCurve {
    curve_from(
        "v",
        [vec![], vec![], vec![], vec![(0, 1)], vec![(1, 4)]],
        "C",
    )
}

/// The twisted quartic `T(u) = (1, u, u^2, u^3, u^4)`: fourth powers.
pub fn curve_t() -> ParametrizedCurve {
    curve_from(
        "u",
        [vec![(0, 1)], vec![(1, 1)], vec![(2, 1)], vec![(3, 1)], vec![(4, 1)]],
        "T",
    )
}

/// `q = (0, 0, 0, 0, 1)`: the quartic `T1^4`.
pub fn point_q() -> ProjectivePoint {
    ProjectivePoint::from_ints([0, 0, 0, 0, 1]).expect("nonzero")
}

fn check_homogeneous(f: &Polynomial) -> Result<[usize; 5], MultError> {
    let x = x_indices(f.ring())?;
    if !f.is_homogeneous_in(&x) {
        return Err(MultError::NotHomogeneous);
    }
    Ok(x)
}

/// Core substitution. `gamma` lives in `target`, which extends `f`'s ring.
fn lowest_y_degree(
    f: &Polynomial,
    gamma: &[Polynomial; 5],
    chart: usize,
    target: &Arc<Ring>,
) -> Result<MultiplicityValue, MultError> {
    let x = check_homogeneous(f)?;
    let stems: Vec<String> = (0..5).map(|k| target.fresh_name(&format!("y{k}"))).collect();
    let ring = target.extended(&stems)?;
    let y: Vec<usize> = stems
        .iter()
        .map(|s| ring.require(s))
        .collect::<Result<_, _>>()?;
    let gamma: Vec<Polynomial> = gamma
        .iter()
        .map(|g| g.embed(&ring))
        .collect::<Result<_, _>>()?;
    let mut images = Vec::with_capacity(f.ring().len());
    for (v, name) in f.ring().names().iter().enumerate() {
        let image = match x.iter().position(|&xi| xi == v) {
            Some(k) if k == chart => gamma[k].clone(),
            Some(k) => &gamma[k] + &(&gamma[chart] * &Polynomial::var_at(&ring, y[k])),
            None => Polynomial::var(&ring, name)?,
        };
        images.push(image);
    }
    let g = f.compose(&images, &ring);
    let ys: Vec<usize> = (0..5).filter(|&k| k != chart).map(|k| y[k]).collect();
    Ok(match g.min_degree_in(&ys) {
        Some(d) => MultiplicityValue::Finite(d),
        None => MultiplicityValue::Infinite,
    })
}

/// Multiplicity of the homogeneous form `f` at `p`.
pub fn mult_at_point(f: &Polynomial, p: &ProjectivePoint) -> Result<MultiplicityValue, MultError> {
    let ring = f.ring().clone();
    let gamma = p.coords().clone().map(|c| Polynomial::constant(&ring, c));
    lowest_y_degree(f, &gamma, p.chart(), &ring)
}

/// The curve's components moved into a ring extending `f`'s ring, under a
/// parameter name that does not clash with it.
fn curve_in(f: &Polynomial, curve: &ParametrizedCurve) -> Result<(Arc<Ring>, [Polynomial; 5]), MultError> {
    let name = f.ring().fresh_name(curve.param());
    let target = f.ring().extended(&[name.as_str()])?;
    let u = Polynomial::var(&target, &name)?;
    let gamma = curve.components().clone().map(|c| c.compose(std::slice::from_ref(&u), &target));
    Ok((target, gamma))
}

/// Multiplicity of `f` at the generic point of `curve`.
pub fn mult_along_curve(
    f: &Polynomial,
    curve: &ParametrizedCurve,
) -> Result<MultiplicityValue, MultError> {
    let (target, gamma) = curve_in(f, curve)?;
    lowest_y_degree(f, &gamma, curve.chart(), &target)
}

/// Every first partial derivative of `f` in `x0..x4` vanishes identically on
/// the curve.
pub fn singular_locus_on_curve(f: &Polynomial, curve: &ParametrizedCurve) -> Result<bool, MultError> {
    let (target, gamma) = curve_in(f, curve)?;
    let x = x_indices(f.ring())?;
    let images: Vec<Polynomial> = f
        .ring()
        .names()
        .iter()
        .enumerate()
        .map(|(v, name)| match x.iter().position(|&xi| xi == v) {
            Some(k) => Ok(gamma[k].clone()),
            None => Polynomial::var(&target, name),
        })
        .collect::<Result<_, PolyError>>()?;
    Ok(X_VARS.iter().all(|name| {
        f.partial_derivative(name)
            .map(|d| d.compose(&images, &target).is_zero())
            .unwrap_or(false)
    }))
}

/// Multiplicities at `n` random rational points of the curve.
pub fn sampled_multiplicities(
    f: &Polynomial,
    curve: &ParametrizedCurve,
    n: usize,
    seed: u64,
) -> Result<Vec<(Rational, MultiplicityValue)>, MultError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n {
        attempts += 1;
        if attempts > 100 * n.max(1) {
            return Err(MultError::NoSamples);
        }
        let u = Rational::new(rng.gen_range(-30..=30), rng.gen_range(1..=7));
        if let Some(p) = curve.point_at(&u)? {
            out.push((u, mult_at_point(f, &p)?));
        }
    }
    Ok(out)
}

/// The generic multiplicity equals the minimum over `n` sampled points, and
/// no sample lies below it.
pub fn sample_mult_consistency(
    f: &Polynomial,
    curve: &ParametrizedCurve,
    n: usize,
    seed: u64,
) -> Result<bool, MultError> {
    let generic = mult_along_curve(f, curve)?;
    let samples = sampled_multiplicities(f, curve, n.max(1), seed)?;
    let min = samples.iter().map(|(_, m)| *m).min().expect("nonempty");
    Ok(samples.iter().all(|(_, m)| *m >= generic) && min == generic)
}
