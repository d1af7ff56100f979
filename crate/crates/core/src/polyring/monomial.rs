use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::PolyError;

/// Upper bound on the number of variables a [`Ring`] may carry.
pub const MAX_VARS: usize = 16;

/// Ordered list of variable names. Two rings are compatible iff their name
/// lists are identical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    names: Vec<String>,
}

impl Ring {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Ring>, PolyError> {
        if names.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(names.len()));
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.chars().any(char::is_whitespace) {
                return Err(PolyError::InvalidVariableName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(PolyError::DuplicateVariable(n.clone()));
            }
        }
        Ok(Arc::new(Ring { names }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, PolyError> {
        self.index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    /// `stem`, or `stem` with the first numeric suffix not in use.
    pub fn fresh_name(&self, stem: &str) -> String {
        let mut name = stem.to_string();
        let mut k = 0;
        while self.index_of(&name).is_some() {
            k += 1;
            name = format!("{stem}_{k}");
        }
        name
    }

    /// This ring followed by every name of `extra` not already present.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Result<Arc<Ring>, PolyError> {
        let mut names = self.names.clone();
        for e in extra {
            if !names.iter().any(|n| n == e.as_ref()) {
                names.push(e.as_ref().to_string());
            }
        }
        Ring::new(&names)
    }
}

/// Exponent vector of a monomial. Slots past the ring length are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExponentVector {
    degree: u32,
    exps: [u16; MAX_VARS],
}

impl ExponentVector {
    pub const ONE: ExponentVector = ExponentVector {
        degree: 0,
        exps: [0; MAX_VARS],
    };

    pub fn from_slice(exps: &[u32]) -> Result<Self, PolyError> {
        if exps.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(exps.len()));
        }
        let mut out = Self::ONE;
        for (slot, &e) in out.exps.iter_mut().zip(exps) {
            *slot = u16::try_from(e).map_err(|_| PolyError::ExponentOverflow)?;
            out.degree += e;
        }
        Ok(out)
    }

    pub fn unit(var: usize) -> Self {
        let mut out = Self::ONE;
        out.exps[var] = 1;
        out.degree = 1;
        out
    }

    #[inline]
    pub fn get(&self, var: usize) -> u32 {
        self.exps[var] as u32
    }

    #[inline]
    pub fn total_degree(&self) -> u32 {
        self.degree
    }

    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&v| self.exps[v] as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn exponents(&self, nvars: usize) -> &[u16] {
        &self.exps[..nvars]
    }

    #[inline]
    pub fn mul(&self, other: &Self) -> Self {
        let mut exps = [0u16; MAX_VARS];
        for i in 0..MAX_VARS {
            exps[i] = self.exps[i]
                .checked_add(other.exps[i])
                .expect("exponent overflow");
        }
        ExponentVector {
            degree: self.degree + other.degree,
            exps,
        }
    }

    /// `self / other` when every exponent of `other` is at most ours.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let mut exps = [0u16; MAX_VARS];
        for i in 0..MAX_VARS {
            exps[i] = self.exps[i].checked_sub(other.exps[i])?;
        }
        Some(ExponentVector {
            degree: self.degree - other.degree,
            exps,
        })
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut exps = [0u16; MAX_VARS];
        for i in 0..MAX_VARS {
            let e = self.exps[i] as u32 * n;
            exps[i] = u16::try_from(e).expect("exponent overflow");
        }
        ExponentVector {
            degree: self.degree * n,
            exps,
        }
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut out = Self::ONE;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].min(other.exps[i]);
            out.degree += out.exps[i] as u32;
        }
        out
    }

    pub fn with(&self, var: usize, exp: u32) -> Self {
        let mut out = *self;
        out.degree = out.degree - out.exps[var] as u32 + exp;
        out.exps[var] = u16::try_from(exp).expect("exponent overflow");
        out
    }
}

impl Ord for ExponentVector {
    /// Graded lexicographic: total degree first, then the earliest variable
    /// with a larger exponent wins.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.exps.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
        write!(f, "{:?}", &self.exps[..last])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let a = ExponentVector::from_slice(&[1, 0, 0]).unwrap();
        let b = ExponentVector::from_slice(&[0, 2, 0]).unwrap();
        let c = ExponentVector::from_slice(&[0, 1, 1]).unwrap();
        let d = ExponentVector::from_slice(&[1, 1, 0]).unwrap();
        assert!(b > a);
        assert!(b > c);
        assert!(d > b);
        assert_eq!(a.mul(&c).total_degree(), 3);
        assert_eq!(d.checked_div(&a), Some(ExponentVector::unit(1)));
        assert_eq!(a.checked_div(&b), None);
    }

    #[test]
    fn ring_validation() {
        assert!(Ring::new(&["x", "x"]).is_err());
        assert!(Ring::new(&["x y"]).is_err());
        let many: Vec<String> = (0..17).map(|i| format!("v{i}")).collect();
        assert!(matches!(Ring::new(&many), Err(PolyError::TooManyVariables(17))));
        let r = Ring::new(&["x0", "x1"]).unwrap();
        let e = r.extended(&["x1", "t"]).unwrap();
        assert_eq!(e.names(), ["x0", "x1", "t"]);
    }
}
