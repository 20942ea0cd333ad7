//! Command-line front end: parse coefficient files, run invariants /
//! classification / decomposition / verification / self-tests, and emit
//! deterministic JSON.
//!
//! stdout carries only the result envelope; all diagnostics go to stderr.
//! Exit codes: 0 success, 1 verification or classification failure, 2 input
//! error. Identical (input, seed, epsilon, version) produce byte-identical
//! output; the seed defaults to `WARING_SEED` when set.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::battery::FormGen;
use crate::classify::{cubic_rank, RankLabel, ZeroTestPolicy};
use crate::concom::{concomitants, identity_suite};
use crate::decompose::{decompose_classified, verify, WaringDecomposition};
use crate::error::{Result, WaringError};
use crate::poly::{CubicForm, LinearForm, Mode, Scalar};

#[derive(Parser)]
#[command(
    name = "waring",
    version,
    about = "Concomitants, Waring rank, and verified cube decompositions of ternary cubic forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the concomitant bundle of a form
    Invariants {
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Classify a form's Waring rank
    Rank {
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Decompose a form as a verified sum of cubes
    Decompose {
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Re-verify a certificate file against a form file
    Verify {
        form: PathBuf,
        certificate: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run the identity suite and the classification battery
    Selftest {
        /// Number of random exact forms for the identity suite
        #[arg(long, default_value_t = 100)]
        n: u32,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

#[derive(clap::Args)]
struct CommonOpts {
    /// Seed for all generic choices (default: WARING_SEED or 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Zero-test tolerance for float mode
    #[arg(long, default_value_t = ZeroTestPolicy::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Force the scalar mode (default: as the file declares)
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    match s {
        "exact" => Ok(Mode::Exact),
        "float" => Ok(Mode::Float),
        other => Err(format!("unknown mode {other:?} (use exact|float)")),
    }
}

impl CommonOpts {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            std::env::var("WARING_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
                .unwrap_or(0)
        })
    }
}

/// Entry point; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                WaringError::Parse(_) | WaringError::Io(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Invariants { file, opts } => cmd_invariants(&file, &opts),
        Command::Rank { file, opts } => cmd_rank(&file, &opts),
        Command::Decompose { file, opts } => cmd_decompose(&file, &opts),
        Command::Verify {
            form,
            certificate,
            opts,
        } => cmd_verify(&form, &certificate, &opts),
        Command::Selftest { n, opts } => cmd_selftest(n, &opts),
    }
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(z) => json!([z.re.to_string(), z.im.to_string()]),
        Scalar::Float(z) => json!([z.re, z.im]),
    }
}

fn envelope_base(input: &Value, opts: &CommonOpts, mode: Mode) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("version".into(), json!(VERSION));
    m.insert(
        "policy".into(),
        json!({
            "epsilon": opts.epsilon,
            "seed": opts.seed(),
            "mode": mode.to_string(),
        }),
    );
    m.insert("input".into(), input.clone());
    m
}

fn print_envelope(m: serde_json::Map<String, Value>) {
    println!("{}", Value::Object(m));
}

fn cmd_invariants(file: &Path, opts: &CommonOpts) -> Result<i32> {
    let (f, echo) = read_form_file(file, opts.mode)?;
    let b = concomitants(&f);
    let mut env = envelope_base(&echo, opts, f.mode());
    env.insert(
        "invariants".into(),
        json!({
            "s": scalar_to_json(&b.s),
            "t": scalar_to_json(&b.t),
            "script_s": scalar_to_json(&b.script_s),
            "script_t": scalar_to_json(&b.script_t),
            "norms": {
                "theta": b.theta.coeff_norm(),
                "delta": b.delta.coeff_norm(),
                "f6u": b.f6u.coeff_norm(),
                "s_uuu": b.s_uuu.coeff_norm(),
                "t_uuu": b.t_uuu.coeff_norm(),
                "script_theta": b.script_theta.coeff_norm(),
                "script_f6u": b.script_f6u.coeff_norm(),
            },
        }),
    );
    print_envelope(env);
    Ok(0)
}

fn classification_json(c: &crate::classify::RankClassification) -> Value {
    let margins: BTreeMap<String, f64> = c
        .margins
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    json!({
        "rank": c.rank,
        "label": c.label.as_str(),
        "normal_form": c.normal_form_note,
        "margins": margins,
    })
}

fn cmd_rank(file: &Path, opts: &CommonOpts) -> Result<i32> {
    let (f, echo) = read_form_file(file, opts.mode)?;
    let policy = ZeroTestPolicy {
        epsilon: opts.epsilon,
        mode: f.mode(),
    };
    let c = cubic_rank(&f, &policy);
    let mut env = envelope_base(&echo, opts, f.mode());
    env.insert("classification".into(), classification_json(&c));
    print_envelope(env);
    Ok(0)
}

fn decomposition_json(d: &WaringDecomposition) -> Value {
    let terms: Vec<Value> = d
        .terms
        .iter()
        .map(|(s, l)| {
            json!({
                "scalar": scalar_to_json(s),
                "line": [
                    scalar_to_json(&l.coeffs[0]),
                    scalar_to_json(&l.coeffs[1]),
                    scalar_to_json(&l.coeffs[2]),
                ],
            })
        })
        .collect();
    json!({
        "terms": terms,
        "claimed_rank": d.claimed_rank,
        "class": d.class_label.as_str(),
        "residual": d.residual,
        "mode": match d.mode() { Mode::Exact => "exact", Mode::Float => "float" },
        "seed_trace": {
            "seed": d.seed_trace.seed,
            "attempts": d.seed_trace.attempts,
            "chosen_u": d.seed_trace.chosen_u,
            "u0": d.seed_trace.u0.as_ref().map(scalar_to_json),
            "rejected_u": d.seed_trace.rejected_u,
        },
    })
}

fn cmd_decompose(file: &Path, opts: &CommonOpts) -> Result<i32> {
    let (f, echo) = read_form_file(file, opts.mode)?;
    let policy = ZeroTestPolicy {
        epsilon: opts.epsilon,
        mode: f.mode(),
    };
    let classification = cubic_rank(&f, &policy);
    let mut env = envelope_base(&echo, opts, f.mode());
    env.insert(
        "classification".into(),
        classification_json(&classification),
    );
    match decompose_classified(&f, &classification, &policy, opts.seed()) {
        Ok(d) => {
            env.insert("decomposition".into(), decomposition_json(&d));
            print_envelope(env);
            Ok(0)
        }
        Err(e) => {
            eprintln!("decomposition failed: {e}");
            env.insert("decomposition".into(), Value::Null);
            print_envelope(env);
            Ok(1)
        }
    }
}

fn cmd_verify(form: &Path, certificate: &Path, opts: &CommonOpts) -> Result<i32> {
    let (f, echo) = read_form_file(form, opts.mode)?;
    let d = read_certificate_file(certificate)?;
    let policy = ZeroTestPolicy {
        epsilon: opts.epsilon,
        mode: f.mode(),
    };
    let report = verify(&f, &d, &policy);
    let mut env = envelope_base(&echo, opts, f.mode());
    env.insert(
        "verify".into(),
        json!({
            "residual": report.residual,
            "pass": report.pass,
            "terms": report.terms_count,
            "classified_rank": report.classified_rank,
            "rank_matches": report.rank_matches,
        }),
    );
    print_envelope(env);
    Ok(if report.pass { 0 } else { 1 })
}

fn cmd_selftest(n: u32, opts: &CommonOpts) -> Result<i32> {
    let seed = opts.seed();
    let mut gen = FormGen::new(seed, Mode::Exact);
    let mut identity_failures = 0u32;
    let mut max_rel = 0.0f64;
    for _ in 0..n {
        let f = gen.random_cubic();
        let report = identity_suite(&f, opts.epsilon);
        if !report.all_pass {
            identity_failures += 1;
        }
        max_rel = max_rel.max(report.max_relative_residual);
    }

    // constructed-form classification battery
    let mut class_failures = 0u32;
    let policy = ZeroTestPolicy::exact();
    let battery_n = (n / 10).max(1);
    for label in RankLabel::ALL {
        for _ in 0..battery_n {
            let f = gen.sample(label);
            let c = cubic_rank(&f, &policy);
            if c.label != label || c.rank != label.rank() {
                class_failures += 1;
            }
        }
    }

    let pass = identity_failures == 0 && class_failures == 0;
    let mut env = envelope_base(&json!({ "trials": n }), opts, Mode::Exact);
    env.insert(
        "selftest".into(),
        json!({
            "identity_trials": n,
            "identity_failures": identity_failures,
            "max_relative_residual": max_rel,
            "battery_per_class": battery_n,
            "battery_failures": class_failures,
            "pass": pass,
        }),
    );
    print_envelope(env);
    Ok(if pass { 0 } else { 1 })
}

/// Reads a form file: `{"coefficients": [[re, im] x 10], "mode": "exact" | "float"}`.
/// Exact entries are rational strings like "3/4"; float entries are numbers.
pub fn read_form_file(path: &Path, force_mode: Option<Mode>) -> Result<(CubicForm, Value)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| WaringError::Parse(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| WaringError::Parse(format!("{}: invalid JSON: {e}", path.display())))?;
    let obj = v
        .as_object()
        .ok_or_else(|| WaringError::Parse(format!("{}: expected a JSON object", path.display())))?;
    let mode = match obj.get("mode").and_then(Value::as_str) {
        Some("exact") => Mode::Exact,
        Some("float") | None => Mode::Float,
        Some(other) => {
            return Err(WaringError::Parse(format!(
                "field \"mode\": expected \"exact\" or \"float\", found {other:?}"
            )))
        }
    };
    let coeffs = obj
        .get("coefficients")
        .and_then(Value::as_array)
        .ok_or_else(|| WaringError::Parse("missing \"coefficients\" array".into()))?;
    if coeffs.len() != 10 {
        return Err(WaringError::Parse(format!(
            "field \"coefficients\": expected exactly 10 entries, found {}",
            coeffs.len()
        )));
    }
    let mut out = Vec::with_capacity(10);
    for (i, entry) in coeffs.iter().enumerate() {
        out.push(
            parse_complex_entry(entry, mode)
                .map_err(|e| WaringError::Parse(format!("coefficient {i}: {e}")))?,
        );
    }
    let mut f = CubicForm::new(std::array::from_fn(|i| out[i].clone()));
    if let Some(forced) = force_mode {
        if forced == Mode::Float && f.mode() == Mode::Exact {
            f = f.to_float();
        } else if forced == Mode::Exact && f.mode() == Mode::Float {
            return Err(WaringError::Parse(
                "cannot force exact mode on a float file (rationals required)".into(),
            ));
        }
    }
    let echo = json!({
        "coefficients": coeffs,
        "mode": match f.mode() { Mode::Exact => "exact", Mode::Float => "float" },
    });
    Ok((f, echo))
}

fn parse_complex_entry(v: &Value, mode: Mode) -> std::result::Result<Scalar, String> {
    let pair = v
        .as_array()
        .ok_or_else(|| "expected [re, im] pair".to_string())?;
    if pair.len() != 2 {
        return Err(format!(
            "expected [re, im] pair, found {} entries",
            pair.len()
        ));
    }
    match mode {
        Mode::Exact => {
            let take = |x: &Value| -> std::result::Result<String, String> {
                match x {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) if n.is_i64() => Ok(n.to_string()),
                    _ => Err("exact mode needs rational strings like \"3/4\" (or integers)".into()),
                }
            };
            let re = take(&pair[0])?;
            let im = take(&pair[1])?;
            Scalar::exact_from_strs(&re, &im).map_err(|e| e.to_string())
        }
        Mode::Float => {
            let take = |x: &Value| -> std::result::Result<f64, String> {
                x.as_f64().ok_or_else(|| "expected a number".to_string())
            };
            Ok(Scalar::from_complex(take(&pair[0])?, take(&pair[1])?))
        }
    }
}

/// Reads a certificate file:
/// `{"terms": [{"scalar": [re, im], "line": [[re, im] x 3]}], "mode": ...}`.
pub fn read_certificate_file(path: &Path) -> Result<WaringDecomposition> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| WaringError::Parse(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| WaringError::Parse(format!("{}: invalid JSON: {e}", path.display())))?;
    let obj = v
        .as_object()
        .ok_or_else(|| WaringError::Parse("expected a JSON object".into()))?;
    let mode = match obj.get("mode").and_then(Value::as_str) {
        Some("exact") => Mode::Exact,
        _ => Mode::Float,
    };
    let terms_v = obj
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| WaringError::Parse("missing \"terms\" array".into()))?;
    let mut terms = Vec::with_capacity(terms_v.len());
    for (i, tv) in terms_v.iter().enumerate() {
        let t = tv
            .as_object()
            .ok_or_else(|| WaringError::Parse(format!("term {i}: expected an object")))?;
        let scalar = t
            .get("scalar")
            .ok_or_else(|| WaringError::Parse(format!("term {i}: missing \"scalar\"")))?;
        let scalar = parse_complex_entry(scalar, mode)
            .map_err(|e| WaringError::Parse(format!("term {i} scalar: {e}")))?;
        let line_v = t
            .get("line")
            .and_then(Value::as_array)
            .ok_or_else(|| WaringError::Parse(format!("term {i}: missing \"line\" array")))?;
        if line_v.len() != 3 {
            return Err(WaringError::Parse(format!(
                "term {i}: line needs 3 entries, found {}",
                line_v.len()
            )));
        }
        let mut cs = Vec::with_capacity(3);
        for (j, lv) in line_v.iter().enumerate() {
            cs.push(
                parse_complex_entry(lv, mode)
                    .map_err(|e| WaringError::Parse(format!("term {i} line {j}: {e}")))?,
            );
        }
        terms.push((
            scalar,
            LinearForm::new([cs[0].clone(), cs[1].clone(), cs[2].clone()]),
        ));
    }
    let claimed = terms.len() as u8;
    Ok(WaringDecomposition {
        terms,
        claimed_rank: claimed,
        class_label: RankLabel::Zero,
        residual: f64::NAN,
        seed_trace: Default::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_exact_form_file() {
        let dir = std::env::temp_dir().join("waring-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("form.json");
        std::fs::write(
            &path,
            r#"{"mode": "exact", "coefficients": [["1","0"],["0","0"],["0","0"],["0","0"],["-2/3","1"],["0","0"],["0","0"],["0","0"],["0","0"],["0","0"]]}"#,
        )
        .unwrap();
        let (f, _) = read_form_file(&path, None).unwrap();
        assert_eq!(f.mode(), Mode::Exact);
        assert!(f.coeffs[0].is_one());
        let expect = &Scalar::from_ratio(-2, 3, Mode::Exact) + &Scalar::i(Mode::Exact);
        assert_eq!(f.coeffs[4], expect);
    }

    #[test]
    fn reject_malformed_files() {
        let dir = std::env::temp_dir().join("waring-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(&path, r#"{"coefficients": [[1, 0]]}"#).unwrap();
        let err = read_form_file(&path, None).unwrap_err();
        assert!(matches!(err, WaringError::Parse(_)));
        std::fs::write(&path, "not json").unwrap();
        assert!(read_form_file(&path, None).is_err());
    }
}
