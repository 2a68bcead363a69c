//! Subcommand implementations. Each returns whether the check passed; errors carry exit codes.

use anyhow::Context;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use skt_core::families::{self, random, FamilyParams};
use skt_core::hermitian::{skt_report, HermitianStructure, SktReport};
use skt_core::lie::{print_salamon, target_algebra, AlgebraJson, Params};
use skt_core::shear::{self, Check, ShearJson};
use skt_core::{tensor, LieAlgebra, Tol};

use crate::input::{self, usage};
use crate::{Cli, Cmd, SCHEMA_VERSION};

pub fn run(cli: &Cli) -> anyhow::Result<bool> {
    let tol = cli.tolerance()?;
    let out = Out { json: cli.json };
    match &cli.cmd {
        Cmd::Check { input } => check(&out, input, tol),
        Cmd::Shear { input } => shear_cmd(&out, input, tol),
        Cmd::Family { name, params, seed } => family(&out, name, params, *seed, tol),
        Cmd::Scan6d { samples, seed } => scan(&out, *samples, *seed, tol),
        Cmd::Admissible { input } => admissible(&out, input, tol),
        Cmd::Parse { expr, params } => parse(&out, expr, params),
        Cmd::Fingerprint { input, params, target } => fingerprint(&out, input, params, target.as_deref(), tol),
    }
}

struct Out {
    json: bool,
}

impl Out {
    /// Prints `body` (an object) with the schema header in JSON mode, or the text lines otherwise.
    fn emit(&self, command: &str, mut body: Value, text: impl FnOnce() -> Vec<String>) {
        if self.json {
            let m = body.as_object_mut().expect("object body");
            m.insert("schema_version".into(), json!(SCHEMA_VERSION));
            m.insert("command".into(), json!(command));
            println!("{body}");
        } else {
            for line in text() {
                println!("{line}");
            }
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn series(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" > ")
}

fn salamon_or_dim(l: &LieAlgebra) -> String {
    print_salamon(l).unwrap_or_else(|_| format!("<{}-dimensional>", l.dim()))
}

fn report_lines(r: &SktReport) -> Vec<String> {
    vec![
        format!("compatibility residual: {:.3e}", r.compatibility),
        format!("Nijenhuis residual: {:.3e}", r.nijenhuis),
        format!("|d sigma|: {:.3e}", r.d_sigma),
        format!("|dc|: {:.3e} (scale {})", r.dc, r.scale),
        format!("verdict: {}", r.verdict),
    ]
}

fn structure_of(a: &AlgebraJson, l: LieAlgebra) -> anyhow::Result<Option<HermitianStructure>> {
    let (g, j) = (a.metric()?, a.complex_structure()?);
    if g.is_none() && j.is_none() {
        return Ok(None);
    }
    let n = l.dim();
    if !n.is_multiple_of(2) {
        return Err(usage(format!("metric/J given on odd dimension {n}")));
    }
    let s = tensor::standard_structure(n / 2);
    Ok(Some(HermitianStructure::new(l, g.unwrap_or(s.g), j.unwrap_or(s.j))?))
}

fn check(out: &Out, src: &str, tol: Tol) -> anyhow::Result<bool> {
    let a = input::algebra_json(&input::read(src)?)?;
    let l = a.bracket_table()?;
    let jacobi = l.jacobi_residual();
    let lie = jacobi <= tol.eps * l.max_constant().max(1.0).powi(2);
    let derived = l.derived_series(tol.eps_rank);
    let lower = l.lower_central_series(tol.eps_rank);
    let two_step = lie && l.is_two_step_solvable(tol.eps_rank);
    let report = if lie {
        structure_of(&a, l)?.map(|h| skt_report(&h, tol))
    } else {
        None
    };
    let ok = lie && report.as_ref().is_none_or(|r| r.verdict.is_skt());
    let body = json!({
        "dim": a.dim,
        "jacobi_residual": jacobi,
        "lie": lie,
        "derived_series": derived,
        "lower_central_series": lower,
        "two_step_solvable": two_step,
        "skt": report,
        "pass": ok,
    });
    out.emit("check", body, || {
        let mut v = vec![
            format!("dimension: {}", a.dim),
            format!("Jacobi residual: {jacobi:.3e} ({})", pass(lie)),
        ];
        if lie {
            v.push(format!("derived series: {}", series(&derived)));
            v.push(format!("lower central series: {}", series(&lower)));
            v.push(format!("two-step solvable: {}", yes(two_step)));
        }
        if let Some(r) = &report {
            v.extend(report_lines(r));
        }
        v
    });
    Ok(ok)
}

fn check_json(c: &Check) -> Value {
    json!({ "residual": c.residual, "pass": c.pass })
}

fn shear_cmd(out: &Out, src: &str, tol: Tol) -> anyhow::Result<bool> {
    let sj: ShearJson = input::parse_json(&input::read(src)?, "shear")?;
    let data = sj.data(tol)?;
    let rep = shear::analyze(&data, tol)?;
    let conditions = [
        ("shear-data equation", rep.shear_data),
        ("integrability", rep.integrability),
        ("SKT four-form ν", rep.nu),
    ];
    let ok = rep.is_skt_data();
    let built = shear::construct_shear(&data, tol).ok();
    let algebra = built
        .as_ref()
        .map(|h| AlgebraJson::from_algebra(&h.algebra).with_structure(&h.g, &h.j));
    let failing: Vec<&str> = conditions.iter().filter(|(_, c)| !c.pass).map(|(n, _)| *n).collect();
    let mut body = json!({
        "dims": { "a_J": rep.dims[0], "a_r": rep.dims[1], "U_J": rep.dims[2], "U_r": rep.dims[3] },
        "integrability_flags": rep.flags.flags.iter().map(check_json).collect::<Vec<_>>(),
        "fk": rep.fk,
        "skt": rep.skt,
        "failing": failing,
        "algebra": algebra,
        "pass": ok,
    });
    for (name, c) in &conditions {
        body[*name] = check_json(c);
    }
    if out.json {
        out.emit("shear", body, Vec::new);
    } else {
        for (name, c) in &conditions {
            eprintln!("{name}: {} (residual {:.3e})", pass(c.pass), c.residual);
        }
        eprintln!("dims a_J, a_r, U_J, U_r: {:?}", rep.dims);
        if let Some(r) = &rep.skt {
            eprintln!("verdict: {}", r.verdict);
        }
        if ok {
            let a = algebra.expect("shear data passed");
            println!("{}", serde_json::to_string_pretty(&a)?);
        } else {
            eprintln!("failed: {}", failing.join(", "));
        }
    }
    Ok(ok)
}

fn draw(name: &str, p: &serde_json::Map<String, Value>, seed: u64) -> anyhow::Result<FamilyParams> {
    let size = |k: &str, default: usize| -> anyhow::Result<usize> {
        match p.get(k) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| usage(format!("{k} must be a non-negative integer"))),
        }
    };
    let n = size("n", 3)?;
    if !(2..=8).contains(&n) {
        return Err(usage(format!("random draws need 2 <= n <= 8, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match name {
        "almost_abelian" => FamilyParams::AlmostAbelian(random::almost_abelian_any(n, &mut rng)),
        "codim2" => FamilyParams::Codim2(random::codim2(n, &mut rng)),
        "totally_real" => {
            let ell = size("ell", 1)?;
            if 2 * ell > n {
                return Err(usage(format!("ell = {ell} needs n >= {}", 2 * ell)));
            }
            FamilyParams::TotallyReal(random::totally_real(n, ell, &mut rng))
        }
        "two_dim_complex" => FamilyParams::TwoDimComplex(random::two_dim_complex_rotation(n, &mut rng)),
        "six_dim3_comm" => {
            let v = size("variant", 0)?;
            if v > 2 {
                return Err(usage("variant must be 0, 1 or 2"));
            }
            FamilyParams::SixDim3Comm(random::six_dim_3comm(v, &mut rng))
        }
        other => return Err(usage(format!("no random sampler for family {other:?}"))),
    })
}

fn family(out: &Out, name: &str, kvs: &[String], seed: Option<u64>, tol: Tol) -> anyhow::Result<bool> {
    let text = input::read(name)?;
    let params: FamilyParams = if input::looks_like_json(&text) {
        if !kvs.is_empty() || seed.is_some() {
            return Err(usage("--params/--seed cannot be combined with a parameter file"));
        }
        input::parse_json(&text, "family parameter")?
    } else {
        let kv = input::json_params(kvs)?;
        match seed {
            Some(s) => draw(name, &kv, s)?,
            None => {
                let mut obj = kv;
                obj.insert("family".into(), json!(name));
                serde_json::from_value(Value::Object(obj))
                    .map_err(|e| usage(format!("bad parameters for family {name:?}: {e}")))?
            }
        }
    };
    let h = params.generate(tol)?;
    let r = skt_report(&h, tol);
    let inst = families::instance_report(&h, tol);
    let fp = h.algebra.fingerprint(tol);
    let ok = r.verdict.is_skt();
    let body = json!({
        "family": params.name(),
        "params": params,
        "algebra": AlgebraJson::from_algebra(&h.algebra).with_structure(&h.g, &h.j),
        "report": r,
        "jacobi_residual": inst.jacobi,
        "dc_relative": inst.dc_relative,
        "fingerprint": fp.compact(),
        "pass": ok,
    });
    out.emit("family", body, || {
        let mut v = vec![
            format!("family: {}", params.name()),
            format!("params: {}", serde_json::to_string(&params).unwrap_or_default()),
            format!("algebra: {}", salamon_or_dim(&h.algebra)),
            format!("Jacobi residual: {:.3e}", inst.jacobi),
        ];
        v.extend(report_lines(&r));
        v.push(format!("fingerprint: {}", fp.compact()));
        v
    });
    Ok(ok)
}

fn scan(out: &Out, samples: usize, seed: u64, tol: Tol) -> anyhow::Result<bool> {
    let rep = families::scan_6d(samples, seed, tol);
    let ok = rep.failures == 0;
    let distinct = rep.buckets.len();
    if out.json {
        for r in &rep.records {
            let line = json!({
                "schema_version": SCHEMA_VERSION,
                "kind": "record",
                "index": r.index,
                "params": r.params,
                "report": r.report,
                "fingerprint": r.fingerprint,
                "error": r.error,
            });
            println!("{line}");
        }
        let summary = json!({
            "schema_version": SCHEMA_VERSION,
            "kind": "summary",
            "samples": rep.samples,
            "seed": rep.seed,
            "skt": rep.skt,
            "failures": rep.failures,
            "rejected": rep.rejected,
            "per_family": rep.per_family,
            "distinct_fingerprints": distinct,
            "buckets": rep.buckets,
            "coverage": rep.coverage,
            "pass": ok,
        });
        println!("{summary}");
    } else {
        println!("samples: {}  seed: {}", rep.samples, rep.seed);
        println!(
            "skt: {}  failures: {}  rejected: {}",
            rep.skt, rep.failures, rep.rejected
        );
        for (f, c) in &rep.per_family {
            println!("  {f}: {c}");
        }
        println!("distinct fingerprints: {distinct}");
        for b in &rep.buckets {
            let t = if b.targets.is_empty() {
                String::new()
            } else {
                format!(" = {}", b.targets.join(" = "))
            };
            println!("  {:>5}  {}{t}  [{}]", b.count, b.fingerprint, b.families.join(", "));
        }
        let missed = rep.missed();
        println!(
            "targets reached: {}/{}{}",
            rep.coverage.len() - missed.len(),
            rep.coverage.len(),
            if missed.is_empty() {
                String::new()
            } else {
                format!(" (missed: {})", missed.join(", "))
            }
        );
    }
    Ok(ok)
}

fn admissible(out: &Out, src: &str, tol: Tol) -> anyhow::Result<bool> {
    let rows: Vec<Vec<f64>> = input::parse_json(&input::read(src)?, "matrix")?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(usage("matrix must be square and non-empty"));
    }
    let f = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let d = families::decide_almost_abelian(&f, tol);
    out.emit("admissible", json!({ "decision": d, "pass": d.admissible }), || {
        let mut v = vec![d.reason.clone()];
        if let Some(c) = d.case {
            v.push(format!(
                "case: {}",
                serde_json::to_value(c).unwrap_or_default().as_str().unwrap_or("")
            ));
        }
        v
    });
    Ok(d.admissible)
}

fn parse(out: &Out, expr: &str, kvs: &[String]) -> anyhow::Result<bool> {
    let p = input::numeric_params(kvs)?;
    let l = target_algebra(expr, &p)?;
    let a = AlgebraJson::from_algebra(&l);
    out.emit(
        "parse",
        json!({ "algebra": a, "salamon": print_salamon(&l).ok() }),
        || {
            let mut v = vec![
                format!("dimension: {}", l.dim()),
                format!("tuple: {}", salamon_or_dim(&l)),
            ];
            for e in &a.structure {
                v.push(format!("[e{}, e{}] has e{} coefficient {}", e.i, e.j, e.k, e.c));
            }
            v
        },
    );
    Ok(true)
}

fn load_algebra(src: &str, p: &Params) -> anyhow::Result<LieAlgebra> {
    let text = input::read(src)?;
    if input::looks_like_json(&text) {
        Ok(input::algebra_json(&text)?.algebra()?)
    } else {
        target_algebra(text.trim(), p).with_context(|| format!("parsing {:?}", text.trim()))
    }
}

fn fingerprint(out: &Out, src: &str, kvs: &[String], target: Option<&str>, tol: Tol) -> anyhow::Result<bool> {
    let p = input::numeric_params(kvs)?;
    let l = load_algebra(src, &p)?;
    let fp = l.fingerprint(tol);
    let matched = match target {
        Some(t) => Some(target_algebra(t, &p)?.fingerprint(tol) == fp),
        None => None,
    };
    let body = json!({ "fingerprint": fp, "compact": fp.compact(), "target_match": matched });
    out.emit("fingerprint", body, || {
        let mut v = vec![fp.compact()];
        if let (Some(t), Some(m)) = (target, matched) {
            v.push(format!("matches {t}: {}", yes(m)));
        }
        v
    });
    Ok(matched.unwrap_or(true))
}
