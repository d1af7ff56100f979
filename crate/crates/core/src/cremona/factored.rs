//! Polynomials kept as `J^e * P` with `P` expanded.
//!
//! Composing two degree-13 maps produces degree-169 coordinates that are
//! mostly a large power of `J`. Tracking that power as an exponent keeps the
//! expanded part small while every step stays exact polynomial arithmetic.
//! A value is *normalized* when its cofactor is zero or not divisible by the
//! base; normalized forms are unique, so equality of normalized values is
//! equality of the polynomials they denote.

use std::collections::HashMap;
use std::sync::Arc;

use crate::polyring::{PolyError, Polynomial, Ring};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factored {
    pub j_exp: u32,
    pub cofactor: Polynomial,
}

/// The base polynomial together with a cache of its powers.
#[derive(Debug)]
pub struct PowerBase {
    base: Polynomial,
    powers: std::sync::Mutex<Vec<Polynomial>>,
}

impl PowerBase {
    pub fn new(base: Polynomial) -> Self {
        let one = Polynomial::one(base.ring());
        PowerBase {
            powers: std::sync::Mutex::new(vec![one, base.clone()]),
            base,
        }
    }

    pub fn base(&self) -> &Polynomial {
        &self.base
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.base.ring()
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut p = self.powers.lock().expect("power cache poisoned");
        while p.len() <= n as usize {
            let next = &p[p.len() - 1] * &self.base;
            p.push(next);
        }
        p[n as usize].clone()
    }
}

impl Factored {
    pub fn plain(p: Polynomial) -> Self {
        Factored {
            j_exp: 0,
            cofactor: p,
        }
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::plain(Polynomial::one(ring))
    }

    pub fn is_zero(&self) -> bool {
        self.cofactor.is_zero()
    }

    /// Moves every factor of the base out of the cofactor.
    pub fn normalized(self, base: &PowerBase) -> Result<Self, PolyError> {
        if self.cofactor.is_zero() {
            return Ok(Factored {
                j_exp: 0,
                cofactor: self.cofactor,
            });
        }
        let (k, rest) = self.cofactor.strip_factor(base.base())?;
        Ok(Factored {
            j_exp: self.j_exp + k,
            cofactor: rest,
        })
    }

    pub fn mul(&self, other: &Factored) -> Factored {
        Factored {
            j_exp: self.j_exp + other.j_exp,
            cofactor: &self.cofactor * &other.cofactor,
        }
    }

    pub fn pow(&self, n: u32) -> Factored {
        Factored {
            j_exp: self.j_exp * n,
            cofactor: self.cofactor.pow(n),
        }
    }

    pub fn scale(&self, c: &Polynomial) -> Factored {
        Factored {
            j_exp: self.j_exp,
            cofactor: &self.cofactor * c,
        }
    }

    /// Sum over a common power of the base (the smallest one present).
    pub fn sum(items: Vec<Factored>, base: &PowerBase) -> Factored {
        let live: Vec<Factored> = items.into_iter().filter(|f| !f.is_zero()).collect();
        let Some(min) = live.iter().map(|f| f.j_exp).min() else {
            return Factored::plain(Polynomial::zero(base.ring()));
        };
        let mut total = Polynomial::zero(base.ring());
        for f in &live {
            let lifted = if f.j_exp == min {
                f.cofactor.clone()
            } else {
                &f.cofactor * &base.pow(f.j_exp - min)
            };
            total = &total + &lifted;
        }
        Factored {
            j_exp: min,
            cofactor: total,
        }
    }

    pub fn expand(&self, base: &PowerBase) -> Polynomial {
        &self.cofactor * &base.pow(self.j_exp)
    }

    /// Total degree of the denoted polynomial; `None` for zero.
    pub fn total_degree(&self, base: &PowerBase) -> Option<u32> {
        let bd = base.base().total_degree().unwrap_or(0);
        self.cofactor.total_degree().map(|d| d + bd * self.j_exp)
    }

    /// Degree in the given variables of the denoted polynomial.
    pub fn degree_in(&self, base: &PowerBase, vars: &[usize]) -> Option<u32> {
        let bd = base.base().degree_in(vars).unwrap_or(0);
        self.cofactor.degree_in(vars).map(|d| d + bd * self.j_exp)
    }
}

/// Evaluates `f` with `images[i]` substituted for the variable at
/// `slots[i]`; all other variables of `f` are kept as they are. `f` and the
/// images share one ring.
pub fn eval_factored(
    f: &Polynomial,
    slots: &[usize],
    images: &[Factored],
    base: &PowerBase,
) -> Factored {
    assert_eq!(slots.len(), images.len());
    let ring = f.ring().clone();
    let mut powers: HashMap<(usize, u32), Factored> = HashMap::new();
    let mut pieces = Vec::with_capacity(f.num_terms());
    for (e, c) in f.terms() {
        let mut kept = *e;
        for &s in slots {
            kept = kept.with(s, 0);
        }
        let mut acc = Factored::plain(Polynomial::monomial(&ring, c.clone(), kept));
        for (i, &s) in slots.iter().enumerate() {
            let k = e.get(s);
            if k == 0 {
                continue;
            }
            let p = powers
                .entry((i, k))
                .or_insert_with(|| images[i].pow(k));
            acc = acc.mul(p);
        }
        pieces.push(acc);
    }
    Factored::sum(pieces, base)
}
