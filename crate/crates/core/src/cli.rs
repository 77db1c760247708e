//! The `solgap` command line.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::decide::{
    decide_ergodicity_with, decide_spectral_gap_with, decide_strong_ergodicity_with, emit_certificate, verify_certificate_json,
    verify_document, Certificate, DecideOptions, Verdict,
};
use crate::error::Error;
use crate::koopman::{curve_csv, gap_curve, SpectralEstimate, Truncation};
use crate::solenoid::{parse_problem, AffineGen, SolenoidSpec};

pub const EXIT_INPUT_ERROR: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "solgap", version, about = "Spectral gap and ergodicity of affine actions on solenoids")]
struct Cli {
    /// Machine-readable JSON report instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized internals.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Property {
    Gap,
    Ergodic,
    Strong,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide one property of the action described by INPUT.
    Decide { property: Property, input: PathBuf },
    /// Decide a property and write its certificate.
    Certify {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "gap")]
        property: Property,
    },
    /// Check a certificate; exit 0 when it verifies.
    Verify { certificate: PathBuf },
    /// Estimate the averaging operator on growing truncations and print a CSV curve.
    Simulate {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
        heights: Vec<u64>,
        /// Denominator exponent bound (ignored for a = 1).
        #[arg(long, default_value_t = 0)]
        power: u32,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 20_000)]
        max_iters: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct Report<'a> {
    verdict: &'a str,
    summary: String,
    certificate: &'a Certificate,
    certificate_verified: bool,
    elapsed_ms: u128,
    tool_version: &'static str,
    input_hash: String,
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    rows: Vec<&'a SpectralEstimate>,
    elapsed_ms: u128,
    tool_version: &'static str,
    input_hash: String,
}

/// Exit status for a verdict tag.
pub fn exit_code(tag: &str) -> i32 {
    match tag {
        "Gap" | "Ergodic" | "StronglyErgodic" => 0,
        "NoGap" | "NotErgodic" | "NotStronglyErgodic" => 1,
        _ => 2,
    }
}

fn read_problem(path: &PathBuf) -> Result<(SolenoidSpec, Vec<AffineGen>, String), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let (spec, gens) = parse_problem(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((spec, gens, hex::encode(Sha256::digest(text.as_bytes()))))
}

fn decide(spec: &SolenoidSpec, gens: &[AffineGen], p: Property, opts: &DecideOptions) -> Result<Verdict, Error> {
    Ok(match p {
        Property::Gap => Verdict::Gap(decide_spectral_gap_with(spec, gens, opts)?),
        Property::Ergodic => Verdict::Ergodic(decide_ergodicity_with(spec, gens, opts)?),
        Property::Strong => Verdict::Strong(decide_strong_ergodicity_with(spec, gens, opts)?),
    })
}

fn summary(v: &Verdict) -> String {
    match v {
        Verdict::Gap(v) => v.to_string(),
        Verdict::Ergodic(v) => v.to_string(),
        Verdict::Strong(v) => v.to_string(),
    }
}

/// Runs the command line with `args` (including the program name); returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT_ERROR
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, String> {
    let opts = DecideOptions {
        seed: cli.seed,
        ..DecideOptions::default()
    };
    let io = |e: std::io::Error| e.to_string();
    match &cli.command {
        Command::Decide { property, input } | Command::Certify { input, property, .. } => {
            let start = Instant::now();
            let (spec, gens, input_hash) = read_problem(input)?;
            let verdict = decide(&spec, &gens, *property, &opts).map_err(|e| e.to_string())?;
            let cert = emit_certificate(&spec, &gens, &verdict);
            let verified = verify_document(&cert);
            if let Command::Certify { output, .. } = &cli.command {
                let text = serde_json::to_string_pretty(&cert).expect("serializable");
                fs::write(output, text + "\n").map_err(|e| format!("cannot write {}: {e}", output.display()))?;
            }
            if cli.json {
                let report = Report {
                    verdict: verdict.tag(),
                    summary: summary(&verdict),
                    certificate: &cert,
                    certificate_verified: verified,
                    elapsed_ms: start.elapsed().as_millis(),
                    tool_version: crate::decide::certificate::TOOL_VERSION,
                    input_hash,
                };
                writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable")).map_err(io)?;
            } else {
                writeln!(out, "{}", summary(&verdict)).map_err(io)?;
                if let Command::Certify { output, .. } = &cli.command {
                    writeln!(out, "certificate written to {}", output.display()).map_err(io)?;
                }
            }
            Ok(exit_code(verdict.tag()))
        }
        Command::Verify { certificate } => {
            let text = fs::read_to_string(certificate).map_err(|e| format!("cannot read {}: {e}", certificate.display()))?;
            let ok = verify_certificate_json(&text);
            if cli.json {
                writeln!(out, "{}", serde_json::json!({ "verified": ok })).map_err(io)?;
            } else {
                writeln!(out, "{}", if ok { "verified" } else { "NOT verified" }).map_err(io)?;
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Simulate {
            input,
            heights,
            power,
            tol,
            max_iters,
            output,
        } => {
            let start = Instant::now();
            let (spec, gens, input_hash) = read_problem(input)?;
            let truncs: Vec<Truncation> = heights
                .iter()
                .map(|h| Truncation::new(*h, *power).map(|t| t.normalized(&spec)))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            let rows = gap_curve(&spec, &gens, &truncs, *max_iters, *tol).map_err(|e| e.to_string())?;
            let csv = curve_csv(&spec, &rows);
            if let Some(path) = output {
                fs::write(path, &csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            if cli.json {
                let report = SimulateReport {
                    rows: rows.iter().map(|(_, e)| e).collect(),
                    elapsed_ms: start.elapsed().as_millis(),
                    tool_version: crate::decide::certificate::TOOL_VERSION,
                    input_hash,
                };
                writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable")).map_err(io)?;
            } else {
                write!(out, "{csv}").map_err(io)?;
            }
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("solgap").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn exit_codes_follow_tags() {
        assert_eq!(exit_code("Gap"), 0);
        assert_eq!(exit_code("NotStronglyErgodic"), 1);
        assert_eq!(exit_code("Undecided"), 2);
    }

    #[test]
    fn decide_and_bad_input() {
        let dir = tempfile::tempdir().unwrap();
        let hyp = dir.path().join("hyperbolic.json");
        fs::write(&hyp, r#"{"a":1,"d":2,"generators":[{"matrix":[["2","1"],["1","1"]]}]}"#).unwrap();
        let (code, out, _) = run_capture(&["decide", "gap", hyp.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert_eq!(out.trim(), "NoGap, witness W = Q^2, class VirtuallyAbelian");

        let bad = dir.path().join("bad.json");
        fs::write(&bad, r#"{"a":1,"d":2,"generators":[{"matrix":[["2","x"],["1","1"]]}]}"#).unwrap();
        let (code, _, err) = run_capture(&["decide", "gap", bad.to_str().unwrap()]);
        assert_eq!(code, EXIT_INPUT_ERROR);
        assert!(err.contains("generators[0].matrix[0][1]"), "{err}");
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_INPUT_ERROR);
    }
}
