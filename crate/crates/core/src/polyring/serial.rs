//! Plain-text polynomial format.
//!
//! ```text
//! vars x0 x1 x2 x3 x4
//! 1/1 1 0 0 0 1
//! -4/1 0 1 0 1 0
//! 3/1 0 0 2 0 0
//! ```
//!
//! The header names the ring variables in order. Each following line is one
//! term: the coefficient as `num/den` in lowest terms, then one exponent per
//! variable. Terms are printed in decreasing graded-lex order and the zero
//! polynomial is a bare header. Blank lines and lines starting with `#` are
//! ignored by the parser. Several polynomials may share one document when
//! separated by a line containing only `---`.

use super::monomial::Ring;
use super::poly::Polynomial;
use super::rational::Rational;
use super::PolyError;

pub fn to_text(p: &Polynomial) -> String {
    let ring = p.ring();
    let mut out = String::from("vars");
    for n in ring.names() {
        out.push(' ');
        out.push_str(n);
    }
    out.push('\n');
    for (e, c) in p.terms() {
        out.push_str(&c.to_fraction_string());
        for x in e.exponents(ring.len()) {
            out.push(' ');
            out.push_str(&x.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn from_text(text: &str) -> Result<Polynomial, PolyError> {
    parse_block(text.lines().enumerate())
}

/// Parses a `---`-separated sequence of polynomials.
pub fn many_from_text(text: &str) -> Result<Vec<Polynomial>, PolyError> {
    let mut blocks: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
    for (i, line) in text.lines().enumerate() {
        if line.trim() == "---" {
            blocks.push(Vec::new());
        } else {
            blocks.last_mut().expect("nonempty").push((i, line));
        }
    }
    blocks.into_iter().map(parse_block).collect()
}

pub fn many_to_text(ps: &[Polynomial]) -> String {
    ps.iter().map(to_text).collect::<Vec<_>>().join("---\n")
}

fn parse_block<'a, I>(lines: I) -> Result<Polynomial, PolyError>
where
    I: IntoIterator<Item = (usize, &'a str)>,
{
    let perr = |line: usize, msg: &str| PolyError::Parse {
        line: line + 1,
        message: msg.to_string(),
    };
    let mut ring = None;
    let mut terms = Vec::new();
    let mut last_line = 0;
    for (i, raw) in lines {
        last_line = i;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        match &ring {
            None => {
                if fields.next() != Some("vars") {
                    return Err(perr(i, "expected a `vars` header"));
                }
                let names: Vec<&str> = fields.collect();
                ring = Some(Ring::new(&names).map_err(|e| perr(i, &e.to_string()))?);
            }
            Some(r) => {
                let coeff: Rational = fields
                    .next()
                    .expect("nonempty line")
                    .parse()
                    .map_err(|_| perr(i, "bad coefficient"))?;
                let exps: Vec<u32> = fields
                    .map(|f| f.parse::<u32>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| perr(i, "bad exponent"))?;
                if exps.len() != r.len() {
                    return Err(perr(i, "exponent count does not match header"));
                }
                terms.push((exps, coeff));
            }
        }
    }
    let ring = ring.ok_or_else(|| perr(last_line, "missing `vars` header"))?;
    Polynomial::from_terms(&ring, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_text() {
        let text = "vars x0 x1 x2 x3 x4\n1/1 1 0 0 0 1\n-4/1 0 1 0 1 0\n3/1 0 0 2 0 0\n";
        let p = from_text(text).unwrap();
        assert_eq!(p.num_terms(), 3);
        assert_eq!(to_text(&p), text);
    }

    #[test]
    fn zero_and_comments() {
        let p = from_text("# nothing\nvars a b\n\n").unwrap();
        assert!(p.is_zero());
        assert_eq!(to_text(&p), "vars a b\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        match from_text("vars a\n1/2 1 1\n") {
            Err(PolyError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(from_text("1/1 0\n").is_err());
        assert!(from_text("").is_err());
        assert!(from_text("vars a\nx 1\n").is_err());
    }

    #[test]
    fn many() {
        let text = "vars u\n1/1 0\n---\nvars u\n2/3 1\n";
        let ps = many_from_text(text).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(many_to_text(&ps), text);
    }
}
