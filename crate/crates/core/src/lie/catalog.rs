//! Named low-dimensional algebras and target expressions such as "aff + h3 + R".

use std::collections::BTreeMap;

use super::{parse_salamon, LieAlgebra};
use crate::error::{Result, SktError};
use crate::Tol;

/// Parameter bindings by name.
pub type Params = BTreeMap<String, f64>;

/// Convenience constructor for `Params`.
pub fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

const TUPLES: &[(&str, &str)] = &[
    ("r3p", "(0,lambda.21+31,-21+lambda.31)"),
    ("r4", "(0,21,mu.31,lambda.41)"),
    ("r4p", "(0,mu.21,lambda.31+41,-31+lambda.41)"),
    ("g5_14", "(0,0,21,alpha.41+51,-41+alpha.51)"),
    (
        "g5_17",
        "(0,alpha.21+31,-21+alpha.31,beta.41+gamma.51,-gamma.41+alpha.51)",
    ),
    ("g6_1", "(0,21,alpha.31,beta.41,gamma.51,delta.61)"),
    ("g6_8", "(0,alpha.21,beta.31,gamma.41,delta.51+61,-51+delta.61)"),
    (
        "g6_11",
        "(0,alpha.21,beta.31+41,-31+beta.41,gamma.51+delta.61,-delta.51+gamma.61)",
    ),
    ("n37D", "(0,0,0,0,e^{12}+e^{34},e^{13},e^{24})"),
];

/// All catalog names, parametric families included.
pub const NAMES: &[&str] = &[
    "r3p", "r4", "r4p", "g5_14", "g5_17", "g6_1", "g6_8", "g6_11", "n37D", "h", "aff", "abelian",
];

fn get(p: &Params, name: &str) -> Result<f64> {
    p.get(name).copied().ok_or_else(|| SktError::UnboundParameter {
        name: name.to_string(),
        pos: 0,
    })
}

fn range(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(SktError::ParameterRange(msg.to_string()))
    }
}

fn positive_int(p: &Params, name: &str) -> Result<usize> {
    let v = get(p, name)?;
    range(
        v >= 0.0 && v.fract() == 0.0 && v <= 64.0,
        &format!("{name} must be a small non-negative integer"),
    )?;
    Ok(v as usize)
}

fn validate(name: &str, p: &Params) -> Result<()> {
    let a = |k: &str| get(p, k).map(f64::abs);
    match name {
        "r3p" => range(get(p, "lambda")? >= 0.0, "lambda >= 0"),
        "r4" => {
            let (l, m) = (a("lambda")?, a("mu")?);
            range(0.0 < l && l <= m && m <= 1.0, "0 < |lambda| <= |mu| <= 1")
        }
        "r4p" => {
            get(p, "lambda")?;
            range(get(p, "mu")? > 0.0, "mu > 0")
        }
        "g5_14" => range(get(p, "alpha")? >= 0.0, "alpha >= 0"),
        "g5_17" => {
            get(p, "beta")?;
            range(
                get(p, "alpha")? >= 0.0 && get(p, "gamma")? != 0.0,
                "alpha >= 0, gamma != 0",
            )
        }
        "g6_1" => {
            let (al, b, g, d) = (a("alpha")?, a("beta")?, a("gamma")?, a("delta")?);
            range(
                0.0 < d && d <= g && g <= b && b <= al && al <= 1.0,
                "0 < |delta| <= |gamma| <= |beta| <= |alpha| <= 1",
            )
        }
        "g6_8" => {
            get(p, "delta")?;
            let (al, b, g) = (a("alpha")?, a("beta")?, a("gamma")?);
            range(0.0 < g && g <= b && b <= al, "0 < |gamma| <= |beta| <= |alpha|")
        }
        "g6_11" => {
            get(p, "beta")?;
            get(p, "gamma")?;
            range(get(p, "alpha")? * get(p, "delta")? != 0.0, "alpha * delta != 0")
        }
        _ => Ok(()),
    }
}

/// Heisenberg algebra of dimension 2k+1: de^{2k+1} = Σ e^{2i,2i-1}.
fn heisenberg(k: usize) -> LieAlgebra {
    let n = 2 * k + 1;
    let mut l = LieAlgebra::abelian(n);
    for i in 0..k {
        let mut v = vec![0.0; n];
        v[n - 1] = 1.0;
        l.set_bracket(2 * i, 2 * i + 1, &v);
    }
    l
}

/// Looks up a catalog algebra, validating parameters against the stated
/// conditions. Distinct parameters may still give isomorphic algebras.
pub fn catalog(name: &str, p: &Params) -> Result<LieAlgebra> {
    match name {
        "h" => {
            let k = positive_int(p, "k")?;
            range(k >= 1, "k >= 1")?;
            Ok(heisenberg(k))
        }
        "aff" => parse_salamon("(0,21)", p),
        "abelian" => Ok(LieAlgebra::abelian(positive_int(p, "n")?)),
        _ => {
            let (_, tuple) = TUPLES
                .iter()
                .find(|(n, _)| *n == name)
                .ok_or_else(|| SktError::UnknownName(name.to_string()))?;
            validate(name, p)?;
            parse_salamon(tuple, p)
        }
    }
}

/// Builds a direct sum from an expression like "2aff + h3 + R^2",
/// "g5_14(alpha=0) + R" or "(0,0,0,0,12,14+23)". Inline bindings override `p`.
pub fn target_algebra(expr: &str, p: &Params) -> Result<LieAlgebra> {
    let mut acc = LieAlgebra::abelian(0);
    for part in split_top(expr) {
        let s = part.trim();
        if s.is_empty() {
            return Err(SktError::Syntax {
                pos: 0,
                msg: format!("empty summand in {expr:?}"),
            });
        }
        if s.starts_with('(') {
            acc = acc.direct_sum(&parse_salamon(s, p)?);
            continue;
        }
        let digits: String = s.chars().take_while(|c| c.is_ascii_digit()).collect();
        let mult: usize = if digits.is_empty() { 1 } else { digits.parse().unwrap() };
        let rest = s[digits.len()..].trim();
        let summand = summand(rest, p)?;
        for _ in 0..mult {
            acc = acc.direct_sum(&summand);
        }
    }
    Ok(acc)
}

fn summand(s: &str, p: &Params) -> Result<LieAlgebra> {
    if let Some(k) = s.strip_prefix("R^") {
        let n = k.trim().parse().map_err(|_| SktError::Syntax {
            pos: 2,
            msg: format!("bad exponent in {s:?}"),
        })?;
        return Ok(LieAlgebra::abelian(n));
    }
    if s == "R" {
        return Ok(LieAlgebra::abelian(1));
    }
    let (name, inline) = match s.find('(') {
        Some(i) if s.ends_with(')') => (s[..i].trim(), &s[i + 1..s.len() - 1]),
        _ => (s, ""),
    };
    let mut q = p.clone();
    for kv in inline.split(',').filter(|x| !x.trim().is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| SktError::Syntax {
            pos: 0,
            msg: format!("expected key=value in {kv:?}"),
        })?;
        let v: f64 = v.trim().parse().map_err(|_| SktError::Syntax {
            pos: 0,
            msg: format!("bad number in {kv:?}"),
        })?;
        q.insert(k.trim().to_string(), v);
    }
    if let Some(k) = name.strip_prefix('h').and_then(|d| d.parse::<usize>().ok()) {
        if k % 2 == 1 && k >= 3 {
            return Ok(heisenberg((k - 1) / 2));
        }
    }
    catalog(name, &q)
}

fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            '+' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Fingerprint equality with the expanded target; unparsable targets never match.
pub fn fingerprint_match(l: &LieAlgebra, target: &str, p: &Params, tol: Tol) -> bool {
    match target_algebra(target, p) {
        Ok(t) => t.dim() == l.dim() && t.fingerprint(tol) == l.fingerprint(tol),
        Err(_) => false,
    }
}
