//! Exponent discovery for the invariant identities, the group law and the
//! inverse identity.
//!
//! Every checker finds the exponent by exact division (or, in modular mode,
//! fixes it by degree matching) and then compares with independent oracles.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    build_gt_in, compose_factored_with, eval_factored, family_ring, CremonaError, CremonaMap,
    Factored, JAdic, ParameterKind, PowerBase,
};
use crate::invariants::{eval_i, eval_j, invariant_i_in, invariant_j_in};
use crate::polyring::{
    distinct_primes, pow_mod, reduce_mod, ModPoly, Polynomial, PrimeContext, Rational,
};

/// Largest x-degree of an identity that is checked by plain expansion.
pub const EXPANSION_DEGREE_LIMIT: u32 = 39;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerificationMode {
    Exact,
    Modular,
}

/// Strategy for the degree-169 composition identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupLawMode {
    /// Schwartz-Zippel over random primes with `s, t` kept symbolic.
    Modular,
    /// Exact, after fixing two of `x0..x4` to random rationals.
    ExactSpecialized,
    /// Exact with nothing specialized.
    Exact,
}

impl FromStr for GroupLawMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "modular" => Ok(GroupLawMode::Modular),
            "exact-specialized" => Ok(GroupLawMode::ExactSpecialized),
            "exact" => Ok(GroupLawMode::Exact),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub holds: bool,
    pub computed_exponent: Option<u32>,
    pub paper_exponent: Option<u32>,
    /// The printed exponent differs from the computed one.
    pub discrepancy: bool,
    pub mode: VerificationMode,
    pub method: String,
    pub oracle_exponents: BTreeMap<String, u32>,
    /// Every oracle exponent equals the computed one.
    pub oracles_agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinct_primes: Option<u32>,
    /// log2 of the probability that a false identity passes every trial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure_bound_log2: Option<f64>,
    /// log2 of the largest single-trial failure probability.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_trial_bound_log2: Option<f64>,
}

impl IdentityReport {
    fn new(identity: &str, mode: VerificationMode, method: &str) -> Self {
        IdentityReport {
            identity: identity.to_string(),
            holds: false,
            computed_exponent: None,
            paper_exponent: None,
            discrepancy: false,
            mode,
            method: method.to_string(),
            oracle_exponents: BTreeMap::new(),
            oracles_agree: true,
            trials: None,
            distinct_primes: None,
            failure_bound_log2: None,
            per_trial_bound_log2: None,
        }
    }

    fn finish(mut self) -> Self {
        self.discrepancy = match (self.paper_exponent, self.computed_exponent) {
            (Some(p), Some(c)) => p != c,
            _ => false,
        };
        self.oracles_agree = match self.computed_exponent {
            Some(c) => self.oracle_exponents.values().all(|&o| o == c),
            None => self.oracle_exponents.is_empty(),
        };
        self
    }
}

fn paper_j_exponent(kind: &ParameterKind) -> Option<u32> {
    match kind {
        ParameterKind::Symbolic(_) | ParameterKind::Rational(_) => Some(13),
        ParameterKind::Generalized { m } => Some(12 * m + 1),
        _ => None,
    }
}

fn paper_i_exponent(kind: &ParameterKind) -> Option<u32> {
    match kind {
        ParameterKind::Symbolic(_) | ParameterKind::Rational(_) => Some(12),
        ParameterKind::Generalized { m } => Some(12 * m),
        _ => None,
    }
}

/// `s` when coordinate 0 of the map is `x0 * J^s`: the map is then `J^s`
/// times a substitution fixing `x0`, which for the maps built here is
/// unipotent and so preserves `I` and `J`.
fn scale_exponent(map: &CremonaMap, base: &PowerBase) -> Result<Option<u32>, CremonaError> {
    let x0 = Polynomial::var_at(map.ring(), map.x_indices()[0]);
    let c0 = Factored::plain(map.coords()[0].clone()).normalized(base)?;
    Ok((c0.cofactor == x0).then_some(c0.j_exp))
}

fn normalized_images(map: &CremonaMap, base: &PowerBase) -> Result<Vec<Factored>, CremonaError> {
    map.coords()
        .iter()
        .map(|c| Ok(Factored::plain(c.clone()).normalized(base)?))
        .collect()
}

/// `invariant(map)` in normalized `J^e * P` form, by expansion when the
/// degree is small and by factored evaluation otherwise.
fn invariant_of_map(
    map: &CremonaMap,
    invariant: &Polynomial,
    expand: bool,
    base: &PowerBase,
) -> Result<Factored, CremonaError> {
    if expand {
        let coords = map.coords();
        let value = if invariant.total_degree() == Some(3) {
            eval_j(coords)
        } else {
            eval_i(coords)
        };
        Ok(Factored::plain(value).normalized(base)?)
    } else {
        let images = normalized_images(map, base)?;
        Ok(eval_factored(invariant, &map.x_indices(), &images, base).normalized(base)?)
    }
}

fn method_name(expand: bool) -> &'static str {
    if expand {
        "exact-expansion"
    } else {
        "exact-factored"
    }
}

/// Finds `k` with `J(map) = J^k`.
pub fn verify_j_identity(map: &CremonaMap) -> Result<IdentityReport, CremonaError> {
    let j = map.j();
    let base = PowerBase::new(j.clone());
    let d = map.declared_degree();
    let expand = 3 * d <= EXPANSION_DEGREE_LIMIT;
    let value = invariant_of_map(map, &j, expand, &base)?;

    let mut r = IdentityReport::new("j_identity", VerificationMode::Exact, method_name(expand));
    r.holds = value.cofactor.is_one();
    r.computed_exponent = r.holds.then_some(value.j_exp);
    r.paper_exponent = paper_j_exponent(map.kind());
    r.oracle_exponents.insert("degree_count".into(), d);
    if let Some(s) = scale_exponent(map, &base)? {
        r.oracle_exponents.insert("weight".into(), 3 * s + 1);
    }
    Ok(r.finish())
}

/// Finds `k` with `I(map) = I * J^k`.
pub fn verify_i_identity(map: &CremonaMap) -> Result<IdentityReport, CremonaError> {
    let base = PowerBase::new(map.j());
    let i = invariant_i_in(map.ring())?;
    let d = map.declared_degree();
    let expand = 2 * d <= EXPANSION_DEGREE_LIMIT;
    let value = invariant_of_map(map, &i, expand, &base)?;

    let mut r = IdentityReport::new("i_identity", VerificationMode::Exact, method_name(expand));
    // I is irreducible and prime to J, so I divides J^e * P iff it divides P.
    if let Some(q) = value.cofactor.exact_divide(&i)? {
        r.holds = q.is_one();
        r.computed_exponent = r.holds.then_some(value.j_exp);
    }
    r.paper_exponent = paper_i_exponent(map.kind());
    if (2 * d) >= 2 && (2 * d - 2).is_multiple_of(3) {
        r.oracle_exponents.insert("degree_count".into(), (2 * d - 2) / 3);
    }
    if let Some(s) = scale_exponent(map, &base)? {
        r.oracle_exponents.insert("weight".into(), 2 * s);
    }
    Ok(r.finish())
}

/// `I` divides `I(map)`, so the map sends the quadric `I = 0` to itself.
pub fn verify_quadric_invariance(map: &CremonaMap) -> Result<IdentityReport, CremonaError> {
    let base = PowerBase::new(map.j());
    let i = invariant_i_in(map.ring())?;
    let expand = 2 * map.declared_degree() <= EXPANSION_DEGREE_LIMIT;
    let value = invariant_of_map(map, &i, expand, &base)?;
    let mut r = IdentityReport::new(
        "quadric_invariance",
        VerificationMode::Exact,
        method_name(expand),
    );
    r.holds = value.cofactor.exact_divide(&i)?.is_some();
    Ok(r.finish())
}

/// Outcome of checking `f(g(x))_i = rhs_i * J^e` for all `i`.
struct CompositeOutcome {
    holds: bool,
    exponent: Option<u32>,
    trials: u32,
    primes: Option<u32>,
    failure_log2: Option<f64>,
    per_trial_log2: Option<f64>,
}

fn factored_composite(
    f: &CremonaMap,
    g: &CremonaMap,
    rhs: &[Polynomial; 5],
    fixed: &[(usize, Rational)],
) -> Result<(bool, Option<u32>), CremonaError> {
    let forms = f.j_adic().ok_or(CremonaError::NoJAdicForm)?;
    let j = f.j();
    let base = PowerBase::new(j.specialize(fixed));
    let g_coords = g.coords().clone().map(|c| c.specialize(fixed));
    let lhs = compose_factored_with(forms, &j, &g_coords, &base)?;
    let mut exponent = None;
    for (l, r) in lhs.iter().zip(rhs) {
        let r = Factored::plain(r.specialize(fixed)).normalized(&base)?;
        if l.cofactor != r.cofactor {
            return Ok((false, None));
        }
        if l.is_zero() {
            continue;
        }
        if l.j_exp < r.j_exp {
            return Ok((false, None));
        }
        let e = l.j_exp - r.j_exp;
        match exponent {
            None => exponent = Some(e),
            Some(prev) if prev != e => return Ok((false, None)),
            _ => {}
        }
    }
    Ok((exponent.is_some(), exponent))
}

fn random_specialization(rng: &mut impl Rng, x: &[usize; 5]) -> Vec<(usize, Rational)> {
    let first = rng.gen_range(0..5);
    let mut second = rng.gen_range(0..4);
    if second >= first {
        second += 1;
    }
    [first, second]
        .into_iter()
        .map(|k| {
            let mut n = rng.gen_range(-9i64..=8);
            if n >= 0 {
                n += 1;
            }
            (x[k], Rational::new(n, rng.gen_range(1..=5)))
        })
        .collect()
}

/// Independent random points evaluated per prime.
pub const POINTS_PER_TRIAL: u32 = 2;

/// Schwartz-Zippel over `F_p[params]`: the x-variables are set to random
/// field elements while parameters stay symbolic, so a false identity
/// survives one point with probability at most `deg_x / p`, and one trial
/// with at most `(deg_x / p)^POINTS_PER_TRIAL`.
fn modular_composite(
    f: &CremonaMap,
    g: &CremonaMap,
    rhs: &[Polynomial; 5],
    e: u32,
    trials: u32,
    prime_bits: u32,
    seed: u64,
) -> Result<CompositeOutcome, CremonaError> {
    let forms = f.j_adic().ok_or(CremonaError::NoJAdicForm)?;
    let j = f.j();
    let degree = f.declared_degree() * g.declared_degree();
    let primes = distinct_primes(prime_bits, trials.max(1) as usize, seed)?;
    let mut holds = true;
    let mut failure_log2 = 0.0;
    let mut per_trial_log2 = f64::NEG_INFINITY;
    for ctx in &primes {
        ctx.ensure_degree_margin(degree)?;
        let p = ctx.modulus();
        let bound = POINTS_PER_TRIAL as f64 * ((degree as f64).log2() - (p as f64).log2());
        failure_log2 += bound;
        per_trial_log2 = per_trial_log2.max(bound);
        if !holds {
            continue;
        }
        let mut rng = ctx.rng();
        for _ in 0..POINTS_PER_TRIAL {
            if !modular_point_check(forms, g, rhs, &j, e, ctx, &mut rng)? {
                holds = false;
                break;
            }
        }
    }
    Ok(CompositeOutcome {
        holds,
        exponent: holds.then_some(e),
        trials: primes.len() as u32,
        primes: Some(primes.len() as u32),
        failure_log2: Some(failure_log2),
        per_trial_log2: Some(per_trial_log2),
    })
}

/// One evaluation of both sides at a random x-point over `ctx`'s field.
fn modular_point_check(
    forms: &[JAdic; 5],
    g: &CremonaMap,
    rhs: &[Polynomial; 5],
    j: &Polynomial,
    e: u32,
    ctx: &PrimeContext,
    rng: &mut impl Rng,
) -> Result<bool, CremonaError> {
    let n = g.ring().len();
    let p = ctx.modulus();
    let x = g.x_indices();
    let point: Vec<(usize, u64)> = x.iter().map(|&v| (v, ctx.random_element(rng))).collect();
    let images: Vec<ModPoly> = (0..n)
        .map(|v| match x.iter().position(|&xi| xi == v) {
            Some(k) => Ok(reduce_mod(&g.coords()[k], ctx)?.specialize(&point)),
            None => Ok(ModPoly::var(n, v, p)),
        })
        .collect::<Result<_, CremonaError>>()?;
    let j_mod = reduce_mod(j, ctx)?;
    let j_images = j_mod.compose(&images);
    let j_point = j_mod
        .specialize(&point)
        .as_constant()
        .expect("J has no parameters");
    let scale = pow_mod(j_point, e as u64, p);
    for (form, r) in forms.iter().zip(rhs) {
        let mut lhs = ModPoly::zero(n, p);
        for (k, c) in &form.parts {
            let mut piece = reduce_mod(c, ctx)?.compose(&images);
            for _ in 0..*k {
                piece = piece.mul(&j_images);
            }
            lhs = lhs.add(&piece);
        }
        let right = reduce_mod(r, ctx)?.specialize(&point).scale(scale);
        if lhs != right {
            return Ok(false);
        }
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn check_composite(
    f: &CremonaMap,
    g: &CremonaMap,
    rhs: &[Polynomial; 5],
    degree_exponent: u32,
    mode: GroupLawMode,
    trials: u32,
    prime_bits: u32,
    seed: u64,
) -> Result<CompositeOutcome, CremonaError> {
    match mode {
        GroupLawMode::Modular => {
            modular_composite(f, g, rhs, degree_exponent, trials, prime_bits, seed)
        }
        GroupLawMode::Exact => {
            let (holds, exponent) = factored_composite(f, g, rhs, &[])?;
            Ok(CompositeOutcome {
                holds,
                exponent,
                trials: 1,
                primes: None,
                failure_log2: None,
                per_trial_log2: None,
            })
        }
        GroupLawMode::ExactSpecialized => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = f.x_indices();
            let mut holds = true;
            let mut exponent = None;
            let runs = trials.max(1);
            for _ in 0..runs {
                let fixed = random_specialization(&mut rng, &x);
                let (ok, e) = factored_composite(f, g, rhs, &fixed)?;
                if !ok || (exponent.is_some() && exponent != e) {
                    holds = false;
                    exponent = None;
                    break;
                }
                exponent = e;
            }
            Ok(CompositeOutcome {
                holds,
                exponent,
                trials: runs,
                primes: None,
                failure_log2: None,
                per_trial_log2: None,
            })
        }
    }
}

fn composite_report(identity: &str, mode: GroupLawMode, out: CompositeOutcome) -> IdentityReport {
    let (vmode, method) = match mode {
        GroupLawMode::Modular => (VerificationMode::Modular, "modular-schwartz-zippel"),
        GroupLawMode::ExactSpecialized => (VerificationMode::Exact, "exact-specialized"),
        GroupLawMode::Exact => (VerificationMode::Exact, "exact-factored"),
    };
    let mut r = IdentityReport::new(identity, vmode, method);
    r.holds = out.holds;
    r.computed_exponent = out.exponent;
    if mode != GroupLawMode::Exact {
        r.trials = Some(out.trials);
    }
    r.distinct_primes = out.primes;
    r.failure_bound_log2 = out.failure_log2;
    r.per_trial_bound_log2 = out.per_trial_log2;
    r
}

/// `g_s(g_t(x)) = g_{s+t}(x) * J^e`, with `s, t` symbolic.
pub fn verify_group_law(
    mode: GroupLawMode,
    trials: u32,
    prime_bits: u32,
    seed: u64,
) -> Result<IdentityReport, CremonaError> {
    let ring = family_ring(&["s", "t"])?;
    let s = Polynomial::var(&ring, "s")?;
    let t = Polynomial::var(&ring, "t")?;
    let gs = build_gt_in(&ring, &s)?;
    let gt = build_gt_in(&ring, &t)?;
    let gst = build_gt_in(&ring, &(&s + &t))?;
    let d = gs.declared_degree();
    let degree_exponent = (d * d - d) / 3;
    let out = check_composite(&gs, &gt, gst.coords(), degree_exponent, mode, trials, prime_bits, seed)?;
    let mut r = composite_report("group_law", mode, out);
    r.oracle_exponents.insert("degree_count".into(), degree_exponent);
    Ok(r.finish())
}

/// `g_{-t}(g_t(x)) = x * J^e`, with `t` symbolic.
pub fn verify_inverse(
    mode: GroupLawMode,
    trials: u32,
    prime_bits: u32,
    seed: u64,
) -> Result<IdentityReport, CremonaError> {
    let ring = family_ring(&["t"])?;
    let t = Polynomial::var(&ring, "t")?;
    let gt = build_gt_in(&ring, &t)?;
    let gmt = build_gt_in(&ring, &(-&t))?;
    let identity = CremonaMap::identity(&ring)?;
    let d = gt.declared_degree();
    let degree_exponent = (d * d - 1) / 3;
    let out = check_composite(
        &gmt,
        &gt,
        identity.coords(),
        degree_exponent,
        mode,
        trials,
        prime_bits,
        seed,
    )?;
    let mut r = composite_report("inverse", mode, out);
    r.paper_exponent = Some(42);
    r.oracle_exponents.insert("degree_count".into(), degree_exponent);
    let base = PowerBase::new(invariant_j_in(&ring)?);
    if let Some(scale) = scale_exponent(&gt, &base)? {
        // group law at s = -t, where g_0 = x * J^scale
        r.oracle_exponents
            .insert("group_law".into(), (d * d - d) / 3 + scale);
    }
    Ok(r.finish())
}

#[cfg(test)]
pub(crate) fn probe_modular(
    f: &CremonaMap,
    g: &CremonaMap,
    rhs: &[Polynomial; 5],
    e: u32,
    trials: u32,
    prime_bits: u32,
    seed: u64,
) -> Result<bool, CremonaError> {
    Ok(modular_composite(f, g, rhs, e, trials, prime_bits, seed)?.holds)
}
