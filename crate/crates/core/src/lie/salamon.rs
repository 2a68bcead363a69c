//! Salamon notation: the tuple (de¹, …, deⁿ) with "ab" standing for eᵃ∧eᵇ.
//! Brackets follow dα(X,Y) = −α([X,Y]).

use super::{require_lie, LieAlgebra, Params};
use crate::error::{Result, SktError};

struct Parser<'a> {
    s: Vec<char>,
    pos: usize,
    params: &'a Params,
}

type Term = (f64, usize, usize);

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(SktError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.s.get(self.pos).map(|&c| if c == '−' { '-' } else { c })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{c}'"))
        }
    }

    fn tuple(&mut self) -> Result<Vec<Vec<Term>>> {
        self.expect('(')?;
        let mut entries = vec![self.entry()?];
        loop {
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    entries.push(self.entry()?);
                }
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                _ => return self.err("expected ',' or ')'"),
            }
        }
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(entries)
    }

    fn entry(&mut self) -> Result<Vec<Term>> {
        // A lone "0" is the zero differential.
        let save = self.pos;
        if self.peek() == Some('0') {
            self.pos += 1;
            if matches!(self.peek(), Some(',') | Some(')')) {
                return Ok(vec![]);
            }
            self.pos = save;
        }
        let mut terms = vec![self.term(1.0)?];
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    terms.push(self.term(1.0)?);
                }
                Some('-') => {
                    self.pos += 1;
                    terms.push(self.term(-1.0)?);
                }
                _ => break,
            }
        }
        Ok(terms)
    }

    fn term(&mut self, mut sign: f64) -> Result<Term> {
        while let Some(c) = self.peek() {
            match c {
                '+' => self.pos += 1,
                '-' => {
                    sign = -sign;
                    self.pos += 1
                }
                _ => break,
            }
        }
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let tok = self.take_while(|c| c.is_ascii_digit() || c == '.');
                if tok.len() == 2 && tok.chars().all(|c| c.is_ascii_digit()) {
                    let (a, b) = self.pair(&tok, start)?;
                    return Ok((sign, a, b));
                }
                let Some(dot) = tok.rfind('.') else {
                    self.pos = start;
                    return self.err("expected a two-digit index pair");
                };
                let (num, idx) = (&tok[..dot], &tok[dot + 1..]);
                let coeff: f64 = match num.parse() {
                    Ok(v) => v,
                    Err(_) => {
                        self.pos = start;
                        return self.err("malformed coefficient");
                    }
                };
                if idx.is_empty() {
                    // "e^{..}" after a numeric coefficient
                    let (a, b) = self.basis_pair()?;
                    return Ok((sign * coeff, a, b));
                }
                let (a, b) = self.pair(idx, start + dot + 1)?;
                Ok((sign * coeff, a, b))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                if self.at_basis_marker() {
                    let (a, b) = self.basis_pair()?;
                    return Ok((sign, a, b));
                }
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                let Some(&v) = self.params.get(&name) else {
                    return Err(SktError::UnboundParameter { name, pos: start });
                };
                self.expect('.')?;
                let (a, b) = if self.at_basis_marker() {
                    self.basis_pair()?
                } else {
                    let p = self.pos;
                    let tok = self.take_while(|c| c.is_ascii_digit());
                    self.pair(&tok, p)?
                };
                Ok((sign * v, a, b))
            }
            _ => self.err("expected a term"),
        }
    }

    fn at_basis_marker(&mut self) -> bool {
        self.skip_ws();
        self.s.get(self.pos) == Some(&'e') && self.s.get(self.pos + 1) == Some(&'^')
    }

    /// Parses "e^{ab}" or "e^ab".
    fn basis_pair(&mut self) -> Result<(usize, usize)> {
        if !self.at_basis_marker() {
            return self.err("expected e^{..}");
        }
        self.pos += 2;
        let braced = self.s.get(self.pos) == Some(&'{');
        if braced {
            self.pos += 1;
        }
        let p = self.pos;
        let tok = self.take_while(|c| c.is_ascii_digit());
        let pair = self.pair(&tok, p)?;
        if braced {
            self.expect('}')?;
        }
        Ok(pair)
    }

    fn pair(&mut self, tok: &str, at: usize) -> Result<(usize, usize)> {
        let d: Vec<usize> = tok.chars().filter_map(|c| c.to_digit(10)).map(|x| x as usize).collect();
        if d.len() != 2 || tok.len() != 2 || d.contains(&0) || d[0] == d[1] {
            self.pos = at;
            return self.err("index pair must be two distinct digits 1-9");
        }
        Ok((d[0], d[1]))
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.pos < self.s.len() && f(self.s[self.pos]) {
            self.pos += 1;
        }
        self.s[start..self.pos].iter().collect()
    }
}

/// Parses a tuple such as "(0,0,21)" into structure constants, resolving
/// parameter names from `params`. Fails on Jacobi violation.
pub fn parse_salamon(text: &str, params: &Params) -> Result<LieAlgebra> {
    let mut p = Parser {
        s: text.chars().collect(),
        pos: 0,
        params,
    };
    let entries = p.tuple()?;
    let n = entries.len();
    let mut l = LieAlgebra::abelian(n);
    for (m, terms) in entries.iter().enumerate() {
        for &(coeff, a, b) in terms {
            if a > n || b > n {
                return Err(SktError::Syntax {
                    pos: 0,
                    msg: format!("index pair {a}{b} exceeds dimension {n}"),
                });
            }
            // deᵐ(e_a, e_b) = coeff = −c^m_ab
            let mut v = vec![0.0; n];
            v[m] = -coeff;
            l.add_bracket(a - 1, b - 1, &v);
        }
    }
    require_lie(l, 1e-9)
}

fn fmt_coeff(x: f64) -> String {
    format!("{x}")
}

/// Inverse of `parse_salamon` (dim ≤ 9).
pub fn print_salamon(l: &LieAlgebra) -> Result<String> {
    let n = l.dim();
    if n > 9 || n == 0 {
        return Err(SktError::Invalid(format!(
            "dimension {n} not expressible in digit pairs"
        )));
    }
    let mut entries = Vec::with_capacity(n);
    for m in 0..n {
        let mut s = String::new();
        for a in 0..n {
            for b in a + 1..n {
                let x = -l.structure(a, b, m);
                if x == 0.0 {
                    continue;
                }
                let body = if x.abs() == 1.0 {
                    format!("{}{}", a + 1, b + 1)
                } else {
                    format!("{}.{}{}", fmt_coeff(x.abs()), a + 1, b + 1)
                };
                if x < 0.0 {
                    s.push('-');
                } else if !s.is_empty() {
                    s.push('+');
                }
                s.push_str(&body);
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        entries.push(s);
    }
    Ok(format!("({})", entries.join(",")))
}
