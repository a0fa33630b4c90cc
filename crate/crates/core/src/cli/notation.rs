//! Minimal polynomial notation: `"0.5 x1^2 + 0.25 x1^4 - x1*x2"`.

use crate::error::{Error, Result};
use crate::model::Polynomial;

pub const MAX_NOTATION_VARS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Var(usize),
    Pow(u32),
    Plus,
    Minus,
    Times,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let err = |at: usize, what: &str| Error::Parse(format!("polynomial \"{s}\" at byte {at}: {what}"));
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |mut j: usize| {
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    while i < b.len() {
        match b[i] {
            c if c.is_ascii_whitespace() => i += 1,
            b'+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            b'-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            b'*' => {
                out.push(Tok::Times);
                i += 1;
            }
            b'x' | b'X' => {
                let j = digits(i + 1);
                let idx: usize = s[i + 1..j].parse().map_err(|_| err(i, "expected a variable index after 'x'"))?;
                out.push(Tok::Var(idx));
                i = j;
            }
            b'^' => {
                let j = digits(i + 1);
                let p: u32 = s[i + 1..j].parse().map_err(|_| err(i, "expected an integer power after '^'"))?;
                out.push(Tok::Pow(p));
                i = j;
            }
            c if c.is_ascii_digit() || c == b'.' => {
                let mut j = i;
                while j < b.len() && (b[j].is_ascii_digit() || b[j] == b'.') {
                    j += 1;
                }
                if j < b.len() && (b[j] == b'e' || b[j] == b'E') {
                    let mut k = j + 1;
                    if k < b.len() && (b[k] == b'+' || b[k] == b'-') {
                        k += 1;
                    }
                    let end = digits(k);
                    if end > k {
                        j = end;
                    }
                }
                let v: f64 = s[i..j].parse().map_err(|_| err(i, "malformed number"))?;
                out.push(Tok::Num(v));
                i = j;
            }
            _ => return Err(err(i, "unexpected character")),
        }
    }
    Ok(out)
}

/// Parses the notation into a polynomial in `m ≤ 3` variables.
pub fn parse_notation(s: &str, m: usize) -> Result<Polynomial> {
    if m > MAX_NOTATION_VARS {
        return Err(Error::validation(format!(
            "polynomial notation is accepted for m <= {MAX_NOTATION_VARS}; give a term list instead"
        )));
    }
    let toks = tokenize(s)?;
    let err = |what: String| Error::Parse(format!("polynomial \"{s}\": {what}"));
    let mut poly = Polynomial::zero(m);
    let mut it = toks.into_iter().peekable();
    while it.peek().is_some() {
        let mut sign = 1.0;
        while let Some(t @ (Tok::Plus | Tok::Minus)) = it.peek() {
            if *t == Tok::Minus {
                sign = -sign;
            }
            it.next();
        }
        let mut coeff = sign;
        let mut exp = vec![0u32; m];
        let mut factors = 0;
        loop {
            match it.peek() {
                Some(Tok::Num(v)) => {
                    coeff *= v;
                    it.next();
                }
                Some(Tok::Var(j)) => {
                    let j = *j;
                    if j == 0 || j > m {
                        return Err(err(format!("variable x{j} out of range 1..={m}")));
                    }
                    it.next();
                    let p = match it.peek() {
                        Some(Tok::Pow(p)) => {
                            let p = *p;
                            it.next();
                            p
                        }
                        _ => 1,
                    };
                    exp[j - 1] += p;
                }
                Some(Tok::Pow(_)) => return Err(err("'^' must follow a variable".into())),
                _ => break,
            }
            factors += 1;
            if let Some(Tok::Times) = it.peek() {
                it.next();
                if !matches!(it.peek(), Some(Tok::Num(_) | Tok::Var(_))) {
                    return Err(err("'*' must be followed by a factor".into()));
                }
            }
        }
        if factors == 0 {
            return Err(err("empty term".into()));
        }
        poly.add_term(exp, coeff);
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn terms(p: &Polynomial) -> Vec<(Vec<u32>, f64)> {
        p.terms().map(|(e, c)| (e.clone(), c)).collect()
    }

    #[test]
    fn single_term() {
        let p = parse_notation("0.5 x1^2", 1).unwrap();
        assert_eq!(terms(&p), vec![(vec![2], 0.5)]);
    }

    #[test]
    fn sums_products_and_signs() {
        let p = parse_notation("0.5x1^2 + 0.5 x2^2 - 2*x1^2*x2 + -1e-1 x1 x1", 2).unwrap();
        assert_eq!(p.eval(&[1.0, 2.0]), 0.5 + 2.0 - 4.0 - 0.1);
        assert_eq!(parse_notation("-x1 + x1", 1).unwrap().eval(&[3.0]), 0.0);
        assert_eq!(parse_notation("3", 2).unwrap().eval(&[9.0, 9.0]), 3.0);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(parse_notation("x4", 3), Err(Error::Parse(_))));
        assert!(matches!(parse_notation("x1 +", 1), Err(Error::Parse(_))));
        assert!(matches!(parse_notation("x1^", 1), Err(Error::Parse(_))));
        assert!(matches!(parse_notation("2 * ", 1), Err(Error::Parse(_))));
        assert!(matches!(parse_notation("y1", 1), Err(Error::Parse(_))));
        assert!(matches!(parse_notation("x1", 4), Err(Error::Validation(_))));
    }
}
