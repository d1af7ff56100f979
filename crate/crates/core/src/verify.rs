//! Base-locus analysis of the degree-13 family and the multiplicity report.
//!
//! The family has its fundamental locus inside `{x0 = 0} ∩ {J = 0}`; on the
//! quadric `I = 0` it consists of the curves `B`, `C` and the point `q`.
//! The report tabulates the multiplicity of every coordinate form along
//! each of them and compares the minima with the thresholds `2d/3` (points)
//! and `d/3`, `2d/3` (curves).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::cremona::{
    build_generalized, build_gt, verify_i_identity, verify_inverse, verify_j_identity,
    x_indices, CremonaError, CremonaMap, GroupLawMode, ParameterKind, PhiSpec, TParam,
};
use crate::invariants::{invariant_i, invariant_j, x_ring};
use crate::multiplicity::{
    curve_b, curve_c, mult_along_curve, mult_at_point, point_q, sample_mult_consistency,
    MultError, MultiplicityValue, ParametrizedCurve, ProjectivePoint,
};
use crate::polyring::{PolyError, Polynomial, Rational, Ring, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("the map must have rational coefficients in x0..x4 only")]
    NotRational,
    #[error(transparent)]
    Cremona(#[from] CremonaError),
    #[error(transparent)]
    Mult(#[from] MultError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The quadric `Q: I = 0`, the determinantal cubic `D: J = 0` and the
/// hyperplane `H0: x0 = 0`.
#[derive(Debug, Clone)]
pub struct HypersurfaceSet {
    pub q_poly: Polynomial,
    pub d_poly: Polynomial,
    pub h0_poly: Polynomial,
}

impl HypersurfaceSet {
    pub fn standard() -> Self {
        HypersurfaceSet {
            q_poly: invariant_i(),
            d_poly: invariant_j(),
            h0_poly: Polynomial::var_at(&x_ring(), 0),
        }
    }

    fn all(&self) -> [&Polynomial; 3] {
        [&self.q_poly, &self.d_poly, &self.h0_poly]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Locus {
    Point(ProjectivePoint),
    Curve(ParametrizedCurve),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalComponent {
    pub label: String,
    pub locus: Locus,
    /// Index of the form attaining the minimal multiplicity.
    pub witness: usize,
    /// `I`, `J` and `x0` vanish identically on the locus.
    pub in_q_d_h0: bool,
}

impl FundamentalComponent {
    /// Value of `f` on the locus: a constant for a point, a polynomial in
    /// the curve parameter otherwise.
    pub fn restrict(&self, f: &Polynomial) -> Result<Polynomial, VerifyError> {
        match &self.locus {
            Locus::Point(p) => {
                let v = f.evaluate(p.coords())?;
                Ok(Polynomial::constant(&Ring::new::<&str>(&[])?, v))
            }
            Locus::Curve(c) => Ok(f.compose(c.components(), c.ring())),
        }
    }

    pub fn mult(&self, f: &Polynomial) -> Result<MultiplicityValue, VerifyError> {
        Ok(match &self.locus {
            Locus::Point(p) => mult_at_point(f, p)?,
            Locus::Curve(c) => mult_along_curve(f, c)?,
        })
    }

    pub fn is_point(&self) -> bool {
        matches!(self.locus, Locus::Point(_))
    }
}

/// `B`, `C` and `q`, each checked to lie in `Q ∩ D ∩ H0`.
pub fn base_locus_components() -> Result<Vec<FundamentalComponent>, VerifyError> {
    let surfaces = HypersurfaceSet::standard();
    let mut out = Vec::new();
    for (label, locus, witness) in [
        ("B", Locus::Curve(curve_b()), 1),
        ("C", Locus::Curve(curve_c()), 3),
        ("q", Locus::Point(point_q()), 4),
    ] {
        let mut comp = FundamentalComponent {
            label: label.to_string(),
            locus,
            witness,
            in_q_d_h0: false,
        };
        let mut inside = true;
        for s in surfaces.all() {
            inside &= comp.restrict(s)?.is_zero();
        }
        comp.in_q_d_h0 = inside;
        out.push(comp);
    }
    Ok(out)
}

/// Coordinates of `map` restricted to `{x0 = 0}` and whether each equals
/// `x_i * (J|_{x0=0})^s` with `s = (d - 1) / 3`.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub coords: [Polynomial; 5],
    pub certified: bool,
}

pub fn restrict_to_hyperplane(map: &CremonaMap) -> Result<Restriction, VerifyError> {
    let x = map.x_indices();
    let zero = [(x[0], Rational::zero())];
    let coords = map.coords().clone().map(|c| c.specialize(&zero));
    let d = map.declared_degree();
    let certified = (d - 1).is_multiple_of(3) && {
        let j0 = map.j().specialize(&zero).pow((d - 1) / 3);
        coords
            .iter()
            .enumerate()
            .all(|(i, c)| *c == &Polynomial::var_at(map.ring(), x[i]).specialize(&zero) * &j0)
    };
    Ok(Restriction { coords, certified })
}

/// Coordinates modulo `J`, read off the J-adic form, and whether they are
/// `(0, 0, 0, 0, c * x0^d)` with `c` nonzero.
pub fn restrict_to_determinantal(map: &CremonaMap) -> Result<Restriction, VerifyError> {
    let forms = map.j_adic().ok_or(CremonaError::NoJAdicForm)?;
    let ring = map.ring().clone();
    let coords = forms.clone().map(|f| f.j_free_part(&ring));
    let x = map.x_indices();
    let d = map.declared_degree();
    let last = &coords[4];
    let certified = coords[..4].iter().all(Polynomial::is_zero)
        && !last.is_zero()
        && last.terms().iter().all(|(e, _)| {
            e.get(x[0]) == d && x[1..].iter().all(|&v| e.get(v) == 0)
        });
    Ok(Restriction { coords, certified })
}

fn is_degenerate(map: &CremonaMap) -> bool {
    matches!(map.kind(), ParameterKind::Rational(t) if t.is_zero())
}

fn require_rational(map: &CremonaMap) -> Result<(), VerifyError> {
    if map.ring().len() != 5 || x_indices(map.ring()).is_err() {
        return Err(VerifyError::NotRational);
    }
    Ok(())
}

/// `f` restricted to the line `lambda * a + b`, as a polynomial in `lambda`.
fn on_line(f: &Polynomial, a: &[Rational; 5], b: &[Rational; 5]) -> Result<UniPoly, VerifyError> {
    let ring = Ring::new(&["lambda"])?;
    let l = Polynomial::var(&ring, "lambda")?;
    let images: Vec<Polynomial> = (0..5)
        .map(|i| &(&l * &Polynomial::constant(&ring, a[i].clone())) + &Polynomial::constant(&ring, b[i].clone()))
        .collect();
    let g = f.compose(&images, &ring);
    let deg = g.total_degree().unwrap_or(0) as usize;
    let mut coeffs = vec![Rational::zero(); deg + 1];
    for (e, c) in g.terms() {
        coeffs[e.total_degree() as usize] = c.clone();
    }
    Ok(UniPoly::new(coeffs))
}

fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(-12..=12), rng.gen_range(1..=5))
}

/// Outcome of [`no_common_factor_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonFactorVerdict {
    pub hyperplane_certified: bool,
    pub determinantal_certified: bool,
    /// A line on which `f0` and `f4` restrict to coprime polynomials, with
    /// `f0` nonzero at the point at infinity of the parametrization. Any
    /// common factor of `f0` and `f4` would survive the restriction.
    pub coprime_line_found: bool,
}

impl CommonFactorVerdict {
    pub fn holds(&self) -> bool {
        self.hyperplane_certified && self.determinantal_certified && self.coprime_line_found
    }
}

/// Certifies that the five forms of `map` have no nonconstant common factor.
pub fn no_common_factor_check(map: &CremonaMap, seed: u64) -> Result<CommonFactorVerdict, VerifyError> {
    if is_degenerate(map) {
        return Err(CremonaError::DegenerateParameter.into());
    }
    require_rational(map)?;
    let hyperplane_certified = restrict_to_hyperplane(map)?.certified;
    let determinantal_certified = restrict_to_determinantal(map)?.certified;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (f0, f4) = (&map.coords()[0], &map.coords()[4]);
    let mut coprime_line_found = false;
    for _ in 0..8 {
        let a: [Rational; 5] = std::array::from_fn(|_| random_rational(&mut rng));
        let b: [Rational; 5] = std::array::from_fn(|_| random_rational(&mut rng));
        if f0.evaluate(&a)?.is_zero() {
            continue;
        }
        let g = on_line(f0, &a, &b)?.gcd(&on_line(f4, &a, &b)?);
        if g.degree() == Some(0) {
            coprime_line_found = true;
            break;
        }
    }
    Ok(CommonFactorVerdict {
        hyperplane_certified,
        determinantal_certified,
        coprime_line_found,
    })
}

/// Random rational point of `Q` with `x0 != 0`, from
/// `x4 = (4 x1 x3 - 3 x2^2) / x0`.
pub fn random_quadric_point(rng: &mut impl Rng) -> [Rational; 5] {
    let mut x0 = random_rational(rng);
    while x0.is_zero() {
        x0 = random_rational(rng);
    }
    let x1 = random_rational(rng);
    let x2 = random_rational(rng);
    let x3 = random_rational(rng);
    let num = &(&Rational::from_int(4) * &(&x1 * &x3)) - &(&Rational::from_int(3) * &(&x2 * &x2));
    let x4 = &num / &x0;
    [x0, x1, x2, x3, x4]
}

/// Number of `n` random points of `Q` off `{x0 = 0}` at which some
/// coordinate of `map` is nonzero.
pub fn quadric_samples_nonvanishing(map: &CremonaMap, n: usize, seed: u64) -> Result<usize, VerifyError> {
    require_rational(map)?;
    let i = invariant_i();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut good = 0;
    for _ in 0..n {
        let p = random_quadric_point(&mut rng);
        debug_assert!(i.evaluate(&p)?.is_zero());
        if map.evaluate(&p)?.iter().any(|v| !v.is_zero()) {
            good += 1;
        }
    }
    Ok(good)
}

/// A value written as an exact fraction string `"num/den"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fraction(pub Rational);

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_fraction_string())
    }
}

impl Serialize for MultiplicityValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MultiplicityValue::Finite(n) => s.serialize_u32(*n),
            MultiplicityValue::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentRow {
    pub label: String,
    pub kind: String,
    pub mults: [MultiplicityValue; 5],
    pub min: MultiplicityValue,
    pub argmin: Vec<usize>,
    pub in_q_d_h0: bool,
    /// Every coordinate form vanishes identically on the locus.
    pub forms_vanish: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub lhs: Fraction,
    pub relation: String,
    pub rhs: Fraction,
    pub holds: bool,
}

impl Comparison {
    fn less(lhs: Rational, rhs: Rational) -> Self {
        Comparison {
            holds: lhs < rhs,
            lhs: Fraction(lhs),
            relation: "<".into(),
            rhs: Fraction(rhs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub identity: String,
    pub paper_value: Option<u32>,
    pub computed_value: Option<u32>,
    pub discrepancy: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportChecks {
    pub hyperplane_restriction: bool,
    pub determinantal_restriction: bool,
    pub no_common_factor: bool,
    pub components_in_q_d_h0: bool,
    pub forms_vanish_on_components: bool,
    pub quadric_samples: usize,
    pub quadric_samples_nonvanishing: usize,
    pub sampled_mult_consistent: bool,
}

impl ReportChecks {
    pub fn all_pass(&self) -> bool {
        self.hyperplane_restriction
            && self.determinantal_restriction
            && self.no_common_factor
            && self.components_in_q_d_h0
            && self.forms_vanish_on_components
            && self.quadric_samples == self.quadric_samples_nonvanishing
            && self.sampled_mult_consistent
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub d: u32,
    pub r: u32,
    pub t: Fraction,
    pub seed: u64,
    pub point_threshold: Fraction,
    pub curve_threshold_paper_specific: Fraction,
    pub curve_threshold_general_statement: Fraction,
    pub components: Vec<ComponentRow>,
    pub min_point_mult: MultiplicityValue,
    pub min_curve_mult: BTreeMap<String, MultiplicityValue>,
    pub comparisons: Vec<Comparison>,
    pub violated: bool,
    pub verdict: String,
    pub checks: ReportChecks,
    pub ledger: Vec<LedgerEntry>,
}

pub const QUADRIC_SAMPLES: usize = 100;

fn mult_rational(m: MultiplicityValue) -> Option<Rational> {
    m.finite().map(|n| Rational::from_int(n as i64))
}

fn ledger_entry(name: &str, rep: &crate::cremona::IdentityReport) -> LedgerEntry {
    LedgerEntry {
        identity: name.to_string(),
        paper_value: rep.paper_exponent,
        computed_value: rep.computed_exponent,
        discrepancy: rep.discrepancy,
    }
}

fn build_ledger(gt: &CremonaMap, seed: u64) -> Result<Vec<LedgerEntry>, VerifyError> {
    let mut ledger = vec![
        ledger_entry("i_identity", &verify_i_identity(gt)?),
        ledger_entry(
            "inverse",
            &verify_inverse(GroupLawMode::ExactSpecialized, 1, 62, seed)?,
        ),
        ledger_entry("j_identity", &verify_j_identity(gt)?),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs: Vec<Rational> = (0..3).map(|_| Rational::from_int(rng.gen_range(-5..=5))).collect();
    if coeffs[0].is_zero() {
        coeffs[0] = Rational::one();
    }
    let gen = build_generalized(&PhiSpec::rational(2, &coeffs)?)?;
    ledger.push(ledger_entry("i_identity_generalized_m2", &verify_i_identity(&gen)?));
    ledger.push(ledger_entry("j_identity_generalized_m2", &verify_j_identity(&gen)?));
    ledger.sort_by(|a, b| a.identity.cmp(&b.identity));
    Ok(ledger)
}

/// Assembles the full report for the member `g_t`, `t != 0`.
pub fn build_report(t: &Rational, seed: u64) -> Result<CounterexampleReport, VerifyError> {
    if t.is_zero() {
        return Err(CremonaError::DegenerateParameter.into());
    }
    let gt = build_gt(&TParam::Value(t.clone()))?;
    let d = gt.declared_degree();
    let r = 3u32;
    let d_rat = Rational::from_int(d as i64);
    let point_threshold = &(&Rational::from_int(2) * &d_rat) / &Rational::from_int(r as i64);
    let curve_specific = &d_rat / &Rational::from_int(3);
    let curve_general = &(&Rational::from_int(2) * &d_rat) / &Rational::from_int(r as i64);

    let comps = base_locus_components()?;
    let mut rows = Vec::new();
    let mut consistent = true;
    let mut vanish_all = true;
    for (k, comp) in comps.iter().enumerate() {
        let mut mults = [MultiplicityValue::Infinite; 5];
        let mut vanish = true;
        for (i, f) in gt.coords().iter().enumerate() {
            mults[i] = comp.mult(f)?;
            vanish &= comp.restrict(f)?.is_zero();
        }
        let min = *mults.iter().min().expect("five");
        let argmin = (0..5).filter(|&i| mults[i] == min).collect();
        if let Locus::Curve(c) = &comp.locus {
            let f = &gt.coords()[comp.witness];
            consistent &= sample_mult_consistency(f, c, 10, seed.wrapping_add(k as u64))?;
        }
        vanish_all &= vanish;
        rows.push(ComponentRow {
            label: comp.label.clone(),
            kind: if comp.is_point() { "point" } else { "curve" }.into(),
            mults,
            min,
            argmin,
            in_q_d_h0: comp.in_q_d_h0,
            forms_vanish: vanish,
        });
    }
    rows.sort_by(|a, b| a.label.cmp(&b.label));

    let min_point_mult = rows
        .iter()
        .filter(|r| r.kind == "point")
        .map(|r| r.min)
        .max()
        .unwrap_or(MultiplicityValue::Infinite);
    let min_curve_mult: BTreeMap<String, MultiplicityValue> = rows
        .iter()
        .filter(|r| r.kind == "curve")
        .map(|r| (r.label.clone(), r.min))
        .collect();
    let worst_curve = min_curve_mult
        .values()
        .copied()
        .max()
        .unwrap_or(MultiplicityValue::Infinite);

    let mut comparisons = Vec::new();
    let mut violated = true;
    for (m, threshold) in [
        (min_point_mult, &point_threshold),
        (worst_curve, &curve_specific),
        (worst_curve, &curve_general),
    ] {
        match mult_rational(m) {
            Some(v) => {
                violated &= v <= *threshold;
                comparisons.push(Comparison::less(v, threshold.clone()));
            }
            None => violated = false,
        }
    }
    comparisons.push(Comparison::less(curve_specific.clone(), curve_general.clone()));
    let verdict = if violated {
        format!("Fano inequalities violated at d = {d}")
    } else {
        format!("Fano inequalities not violated at d = {d}")
    };

    let ncf = no_common_factor_check(&gt, seed)?;
    let checks = ReportChecks {
        hyperplane_restriction: ncf.hyperplane_certified,
        determinantal_restriction: ncf.determinantal_certified,
        no_common_factor: ncf.holds(),
        components_in_q_d_h0: rows.iter().all(|r| r.in_q_d_h0),
        forms_vanish_on_components: vanish_all,
        quadric_samples: QUADRIC_SAMPLES,
        quadric_samples_nonvanishing: quadric_samples_nonvanishing(&gt, QUADRIC_SAMPLES, seed)?,
        sampled_mult_consistent: consistent,
    };

    Ok(CounterexampleReport {
        d,
        r,
        t: Fraction(t.clone()),
        seed,
        point_threshold: Fraction(point_threshold),
        curve_threshold_paper_specific: Fraction(curve_specific),
        curve_threshold_general_statement: Fraction(curve_general),
        components: rows,
        min_point_mult,
        min_curve_mult,
        comparisons,
        violated,
        verdict,
        checks,
        ledger: build_ledger(&gt, seed)?,
    })
}

impl CounterexampleReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "family member t = {}, degree d = {}, index r = {}", self.t.0, self.d, self.r);
        let _ = writeln!(
            s,
            "thresholds: point {}, curve {} (quadric), curve {} (general)",
            self.point_threshold.0.to_fraction_string(),
            self.curve_threshold_paper_specific.0.to_fraction_string(),
            self.curve_threshold_general_statement.0.to_fraction_string()
        );
        let _ = writeln!(s, "{:<6}{:<7}{:>4}{:>4}{:>4}{:>4}{:>4}{:>6}", "locus", "kind", "f0", "f1", "f2", "f3", "f4", "min");
        for row in &self.components {
            let _ = write!(s, "{:<6}{:<7}", row.label, row.kind);
            for m in &row.mults {
                let _ = write!(s, "{:>4}", m.to_string());
            }
            let _ = writeln!(s, "{:>6}", row.min.to_string());
        }
        for c in &self.comparisons {
            let _ = writeln!(
                s,
                "{} {} {}: {}",
                c.lhs.0,
                c.relation,
                c.rhs.0,
                c.holds
            );
        }
        let _ = writeln!(s, "checks passed: {}", self.checks.all_pass());
        for e in &self.ledger {
            let show = |v: Option<u32>| v.map_or("-".to_string(), |n| n.to_string());
            let _ = writeln!(
                s,
                "ledger {}: printed {}, computed {}{}",
                e.identity,
                show(e.paper_value),
                show(e.computed_value),
                if e.discrepancy { " (differs)" } else { "" }
            );
        }
        let _ = writeln!(s, "verdict: {}", self.verdict);
        s
    }
}
