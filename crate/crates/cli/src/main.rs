//! Command line front end. Every command prints one JSON document (schema
//! field "arithdyn/1") unless --format plain/csv is selected where noted.
//! Exit codes: 0 success, 1 usage or domain error, 2 bounded search left
//! unresolved, 3 available precision insufficient to decide.

use arithdyn_core::adic::{successor, AdicPath, MarkovCompactum};
use arithdyn_core::beta_core::{
    classify_compactum, expansion_of_one, greedy_expand, intermediate_expand, lazy_expand, Beta,
    Real,
};
use arithdyn_core::beta_count::{branching_explore, count_block, count_equivalent_words, Block};
use arithdyn_core::beta_unique::{
    classify_unique_set, doubling_hole_survivor_count, unique_word_count,
};
use arithdyn_core::digits::DigitSeq;
use arithdyn_core::exactnum::{fields, parse_rat, Field, FieldElement};
use arithdyn_core::rotation::{
    digit_statistics, integer_encode1, integer_encode2, markov_measure, ostrowski_encode, psi1,
    psi2, rot1_encode, sample_digits, unique_rotational_analysis, Cardinality, ContinuedFraction,
};
use arithdyn_core::toral::{
    bac_search, f_form, homoclinic_eval, preimage_count, two_sided_admissible, BacResult,
    HomoclinicPoint, IntMatrix, ToralAutomorphism, TwoSidedSeq,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};
use std::process::ExitCode;
use std::str::FromStr;

const SCHEMA: &str = "arithdyn/1";
const EXIT_USAGE: u8 = 1;
const EXIT_UNRESOLVED: u8 = 2;
const EXIT_PRECISION: u8 = 3;

#[derive(Parser)]
#[command(name = "arithdyn", version, about = "Exact arithmetic dynamics toolkit")]
struct Cli {
    /// Output format; csv applies to tabular outputs, others fall back to json
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Subcommand)]
enum Cmd {
    /// Radix expansions in a real base beta > 1
    Beta {
        #[command(subcommand)]
        cmd: BetaCmd,
    },
    /// The set of points with a unique expansion
    Unique {
        #[command(subcommand)]
        cmd: UniqueCmd,
    },
    /// Counting representations in the golden base and branching statistics
    Count {
        #[command(subcommand)]
        cmd: CountCmd,
    },
    /// Rotational (Ostrowski) expansions driven by a continued fraction
    Rotate {
        #[command(subcommand)]
        cmd: RotateCmd,
    },
    /// Successor maps on Markov compacta
    Adic {
        #[command(subcommand)]
        cmd: AdicCmd,
    },
    /// Arithmetic codings of hyperbolic toral automorphisms
    Toral {
        #[command(subcommand)]
        cmd: ToralCmd,
    },
}

#[derive(Subcommand)]
enum BetaCmd {
    /// Digit expansion of x
    Expand(ExpandArgs),
    /// Expansion of 1 and the induced admissibility data
    Parry {
        #[arg(long)]
        base: String,
    },
    /// Sofic / SFT / neither classification of the digit compactum
    Classify {
        #[arg(long)]
        base: String,
    },
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long)]
    base: String,
    #[arg(long, value_enum, default_value_t = Mode::Greedy)]
    mode: Mode,
    /// Branch offset for the intermediate map (rational)
    #[arg(long, default_value = "0")]
    alpha: String,
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = 32)]
    digits: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    Greedy,
    Lazy,
    Intermediate,
}

#[derive(Subcommand)]
enum UniqueCmd {
    /// Cardinality class of the unique-expansion set
    Classify {
        #[arg(long)]
        base: f64,
    },
    /// Unique-word counts and the log-count growth rate per depth
    Entropy {
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
    /// Survivor counts of the doubling map avoiding a middle hole
    Hole {
        #[arg(long)]
        delta: String,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum CountCmd {
    /// Number of golden-base words with the same value as the given 0-1 word
    Word { bits: String },
    /// Size of the equivalence class of the block with these run parameters
    Block {
        #[arg(long, value_delimiter = ',')]
        params: Vec<u32>,
    },
    /// Survivor tree of all expansions of x: path and choice counts
    Explore {
        #[arg(long)]
        base: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 20)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        alphabet: u32,
    },
}

#[derive(Subcommand)]
enum RotateCmd {
    /// Continued fraction quotients, convergents and residues
    Cf {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Rotational digit expansion of x in (0,1)
    Encode {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 20)]
        digits: usize,
        #[arg(long, default_value_t = 2)]
        model: u8,
    },
    /// Integer numeration by convergent denominators
    Integers {
        #[arg(long, default_value = "golden")]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, default_value_t = 2)]
        model: u8,
    },
    /// Verdicts on the set of rotations with a unique expansion
    Unique {
        #[arg(long)]
        alpha: String,
    },
    /// Digit-sum moments under the Markov measure
    Stats {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum AdicCmd {
    /// Lexicographic successor of a path, iterated --steps times
    Succ {
        /// Inline JSON with the compactum fields, or "full:r1,r2,..." for
        /// the plain odometer, or "golden:<depth>"
        #[arg(long)]
        compactum: String,
        /// Comma separated digits, lowest level first
        #[arg(long)]
        path: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
}

#[derive(Subcommand)]
enum ToralCmd {
    /// Evaluate the homoclinic coding on a digit window
    Eval {
        /// Row-major CSV of a square integer matrix
        #[arg(long)]
        matrix: String,
        /// Power-basis coordinates of xi, comma separated rationals
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        /// Digits followed by @offset, e.g. 0100@-2
        #[arg(long)]
        window: String,
    },
    /// Almost-everywhere preimage count |D N(xi)| of the coding
    Preimages {
        #[arg(long)]
        matrix: String,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
    },
    /// Search ||n||_inf <= bound for |det B_M(n)| = 1
    Bac {
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value_t = 10)]
        bound: i64,
    },
}

fn parse_base(s: &str) -> Result<Beta, String> {
    match s {
        "golden" => return Ok(Beta::golden()),
        "tribonacci" => return Ok(Beta::tribonacci()),
        "plastic" => return Ok(Beta::plastic()),
        _ => {}
    }
    if let Some(d) = s.strip_prefix("sqrt:") {
        let d: u64 = d.parse().map_err(|_| format!("bad sqrt spec {s}"))?;
        return Ok(Beta::algebraic(&fields::sqrt(d)));
    }
    if let Some(r) = parse_rat(s) {
        return Ok(Beta::Rational(r));
    }
    s.parse::<f64>()
        .map(Beta::Numeric)
        .map_err(|_| format!("unrecognized base spec {s}"))
}

fn parse_rat_arg(s: &str) -> Result<BigRational, String> {
    parse_rat(s).ok_or_else(|| format!("expected a rational number, got {s}"))
}

/// Alpha specs: "golden", "cf:<quotients>" with an optional "pre;" prefix
/// part, or "sqrt:<d>:<a>:<b>" meaning a + b*sqrt(d) reduced mod 1.
fn parse_alpha(s: &str) -> Result<ContinuedFraction, String> {
    if s == "golden" {
        return ContinuedFraction::from_quotients(vec![], vec![1]).map_err(|e| e.to_string());
    }
    if let Some(rest) = s.strip_prefix("cf:") {
        let (pre, per) = match rest.split_once(';') {
            Some((a, b)) => (a, b),
            None => ("", rest),
        };
        let parse_list = |t: &str| -> Result<Vec<u64>, String> {
            if t.is_empty() {
                return Ok(vec![]);
            }
            t.split(',')
                .map(|v| v.trim().parse::<u64>().map_err(|_| format!("bad quotient {v}")))
                .collect()
        };
        return ContinuedFraction::from_quotients(parse_list(pre)?, parse_list(per)?)
            .map_err(|e| e.to_string());
    }
    if let Some(rest) = s.strip_prefix("sqrt:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("sqrt spec needs sqrt:<d>:<a>:<b>, got {s}"));
        }
        let d: u64 = parts[0].parse().map_err(|_| "bad d".to_string())?;
        let a = parse_rat_arg(parts[1])?;
        let b = parse_rat_arg(parts[2])?;
        let f = fields::sqrt(d);
        let elem = FieldElement::from_rational(&f, a)
            .add(&f.gen_element().mul_rat(&b));
        let fl = elem.floor_int();
        let frac = elem.sub(&FieldElement::from_rational(
            &f,
            BigRational::from_integer(fl),
        ));
        return ContinuedFraction::expand(&Real::Alg(frac), 128).map_err(|e| e.to_string());
    }
    Err(format!("unrecognized alpha spec {s}"))
}

fn parse_matrix(s: &str) -> Result<IntMatrix, String> {
    let entries: Result<Vec<i64>, _> = s.split(',').map(|v| v.trim().parse::<i64>()).collect();
    let entries = entries.map_err(|_| format!("bad matrix CSV {s}"))?;
    let m = (entries.len() as f64).sqrt().round() as usize;
    if m * m != entries.len() || m == 0 {
        return Err(format!("matrix CSV length {} is not a square", entries.len()));
    }
    Ok((0..m)
        .map(|i| entries[i * m..(i + 1) * m].iter().map(|&v| BigInt::from(v)).collect())
        .collect())
}

fn parse_xi(s: &str, field: &Field) -> Result<FieldElement, String> {
    let coords: Result<Vec<BigRational>, String> =
        s.split(',').map(|v| parse_rat_arg(v.trim())).collect();
    let mut coords = coords?;
    if coords.len() > field.degree() {
        return Err(format!(
            "xi has {} coordinates but the field has degree {}",
            coords.len(),
            field.degree()
        ));
    }
    coords.resize(field.degree(), BigRational::from_integer(BigInt::from(0)));
    Ok(FieldElement::from_coords(field, coords))
}

fn parse_window(s: &str) -> Result<TwoSidedSeq, String> {
    let (digits, offset) = match s.split_once('@') {
        Some((d, o)) => (d, o.parse::<i64>().map_err(|_| format!("bad offset in {s}"))?),
        None => (s, 0),
    };
    let digits: Result<Vec<u32>, String> = digits
        .chars()
        .map(|c| c.to_digit(10).ok_or_else(|| format!("bad digit {c}")))
        .collect();
    Ok(TwoSidedSeq::new(offset, digits?))
}

fn pisot_field(m: IntMatrix) -> Result<(ToralAutomorphism, Field), (u8, String)> {
    let auto = ToralAutomorphism::new(m).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    if auto.hyperbolic.is_none() {
        return Err((
            EXIT_PRECISION,
            "spectrum too close to the unit circle: hyperbolicity unverified".into(),
        ));
    }
    match auto.field.clone() {
        Some(f) => Ok((auto, f)),
        None => Err((
            EXIT_USAGE,
            "matrix is not Pisot with irreducible characteristic polynomial".into(),
        )),
    }
}

fn digitseq_json(d: &DigitSeq) -> Value {
    json!({
        "alphabet_max": d.alphabet_max,
        "preperiod": d.preperiod,
        "period": if d.period.is_empty() { Value::Null } else { json!(d.period) },
    })
}

fn render_prefix(d: &DigitSeq, n: usize) -> String {
    d.prefix(n)
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("")
}

fn emit(v: Value, format: Format) {
    match format {
        Format::Plain => {
            if let Some(s) = v.get("plain").and_then(|p| p.as_str()) {
                println!("{s}");
            } else {
                println!("{v}");
            }
        }
        _ => {
            let mut out = v;
            if let Some(map) = out.as_object_mut() {
                map.remove("plain");
                map.insert("schema".into(), json!(SCHEMA));
            }
            println!("{out}");
        }
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let usage = |m: String| (EXIT_USAGE, m);
    match cli.command {
        Cmd::Beta { cmd } => match cmd {
            BetaCmd::Expand(a) => {
                let beta = parse_base(&a.base).map_err(usage)?;
                let x = Real::from_rat_in(&beta, parse_rat_arg(&a.x).map_err(usage)?);
                let seq = match a.mode {
                    Mode::Greedy => greedy_expand(&x, &beta, a.digits),
                    Mode::Lazy => lazy_expand(&x, &beta, a.digits),
                    Mode::Intermediate => {
                        let alpha =
                            Real::from_rat_in(&beta, parse_rat_arg(&a.alpha).map_err(usage)?);
                        intermediate_expand(&x, &beta, &alpha, a.digits)
                    }
                }
                .map_err(|e| usage(e.to_string()))?;
                emit(
                    json!({
                        "digits": digitseq_json(&seq),
                        "plain": render_prefix(&seq, a.digits),
                    }),
                    cli.format,
                );
            }
            BetaCmd::Parry { base } => {
                let beta = parse_base(&base).map_err(usage)?;
                let p = expansion_of_one(&beta).map_err(|e| usage(e.to_string()))?;
                if !p.complete {
                    return Err((
                        EXIT_PRECISION,
                        "orbit of 1 did not resolve within the step bound".into(),
                    ));
                }
                emit(
                    json!({
                        "greedy": digitseq_json(&p.a_prime),
                        "quasi_greedy": digitseq_json(&p.a),
                        "plain": render_prefix(&p.a, 24),
                    }),
                    cli.format,
                );
            }
            BetaCmd::Classify { base } => {
                let beta = parse_base(&base).map_err(usage)?;
                let c = classify_compactum(&beta).map_err(|e| usage(e.to_string()))?;
                emit(
                    json!({"class": format!("{c:?}"), "plain": format!("{c:?}")}),
                    cli.format,
                );
            }
        },
        Cmd::Unique { cmd } => match cmd {
            UniqueCmd::Classify { base } => {
                let v = classify_unique_set(base).map_err(|e| usage(e.to_string()))?;
                let cat = format!("{:?}", v.category);
                emit(json!({"category": cat, "plain": cat}), cli.format);
            }
            UniqueCmd::Entropy { base, depth } => {
                let beta = parse_base(&base).map_err(usage)?;
                let mut rows = Vec::new();
                for n in 1..=depth {
                    let c = unique_word_count(&beta, n).map_err(|e| usage(e.to_string()))?;
                    rows.push((n, c, (c as f64).ln() / n as f64));
                }
                if cli.format == Format::Csv {
                    println!("depth,count,log_count_per_n");
                    for (n, c, h) in rows {
                        println!("{n},{c},{h}");
                    }
                } else {
                    emit(
                        json!({"rows": rows.iter().map(|(n,c,h)| json!({"depth": n, "count": c, "log_count_per_n": h})).collect::<Vec<_>>()}),
                        cli.format,
                    );
                }
            }
            UniqueCmd::Hole { delta, depth } => {
                let d = parse_rat_arg(&delta)
                    .map(|r| arithdyn_core::exactnum::rat_to_f64(&r))
                    .or_else(|_| delta.parse::<f64>().map_err(|_| "bad delta".to_string()))
                    .map_err(usage)?;
                let mut rows = Vec::new();
                for n in 1..=depth {
                    let c = doubling_hole_survivor_count(d, n)
                        .map_err(|e| usage(e.to_string()))?;
                    rows.push((n, c, (c as f64).ln() / n as f64));
                }
                if cli.format == Format::Csv {
                    println!("depth,count,log_count_per_n");
                    for (n, c, h) in rows {
                        println!("{n},{c},{h}");
                    }
                } else {
                    emit(
                        json!({"rows": rows.iter().map(|(n,c,h)| json!({"depth": n, "count": c, "log_count_per_n": h})).collect::<Vec<_>>()}),
                        cli.format,
                    );
                }
            }
        },
        Cmd::Count { cmd } => match cmd {
            CountCmd::Word { bits } => {
                let w: Result<Vec<u32>, String> = bits
                    .chars()
                    .map(|c| c.to_digit(10).ok_or_else(|| format!("bad bit {c}")))
                    .collect();
                let count = count_equivalent_words(&w.map_err(usage)?)
                    .map_err(|e| usage(e.to_string()))?;
                emit(json!({"count": count, "plain": count.to_string()}), cli.format);
            }
            CountCmd::Block { params } => {
                let b = Block::new(params).map_err(|e| usage(e.to_string()))?;
                let c = count_block(&b);
                emit(
                    json!({"count": c.to_string(), "word": b.render().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(""), "plain": c.to_string()}),
                    cli.format,
                );
            }
            CountCmd::Explore {
                base,
                x,
                depth,
                alphabet,
            } => {
                let beta = parse_base(&base).map_err(usage)?;
                let xr = Real::from_rat_in(&beta, parse_rat_arg(&x).map_err(usage)?);
                let s = branching_explore(&xr, &beta, alphabet, depth)
                    .map_err(|e| usage(e.to_string()))?;
                emit(
                    json!({
                        "depth": s.depth,
                        "paths": s.paths,
                        "choice_nodes": s.choice_nodes,
                        "plain": format!("depth {} paths {} choices {}", s.depth, s.paths, s.choice_nodes),
                    }),
                    cli.format,
                );
            }
        },
        Cmd::Rotate { cmd } => match cmd {
            RotateCmd::Cf { alpha, depth } => {
                let cf = parse_alpha(&alpha).map_err(usage)?;
                let q = cf.quotients(depth).map_err(|e| usage(e.to_string()))?;
                let conv = cf.convergents(depth).map_err(|e| usage(e.to_string()))?;
                emit(
                    json!({
                        "quotients": q,
                        "convergents": conv.iter().map(|(p, qd)| json!([p.to_string(), qd.to_string()])).collect::<Vec<_>>(),
                        "plain": q.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
                    }),
                    cli.format,
                );
            }
            RotateCmd::Encode {
                alpha,
                x,
                digits,
                model,
            } => {
                let cf = parse_alpha(&alpha).map_err(usage)?;
                let xr = {
                    let r = parse_rat_arg(&x).map_err(usage)?;
                    match &cf.alpha {
                        Real::Alg(a) => Real::Alg(FieldElement::from_rational(a.field(), r)),
                        _ => Real::Rat(r),
                    }
                };
                let (digits_out, value) = match model {
                    1 => {
                        let d = rot1_encode(&cf, &xr, digits)
                            .map_err(|e| usage(e.to_string()))?;
                        let v = psi1(&cf, &d).map_err(|e| usage(e.to_string()))?;
                        (d, v)
                    }
                    2 => {
                        let d = ostrowski_encode(&cf, &xr, digits)
                            .map_err(|e| usage(e.to_string()))?;
                        let v = psi2(&cf, &d).map_err(|e| usage(e.to_string()))?;
                        (d, v)
                    }
                    _ => return Err(usage("model must be 1 or 2".into())),
                };
                emit(
                    json!({
                        "digits": digits_out,
                        "value": value.value,
                        "error_bound": value.error_bound,
                        "plain": digits_out.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
                    }),
                    cli.format,
                );
            }
            RotateCmd::Integers { alpha, n, model } => {
                let cf = parse_alpha(&alpha).map_err(usage)?;
                let big = BigInt::from(n);
                let d = match model {
                    1 => integer_encode1(&cf, &big),
                    2 => integer_encode2(&cf, &big),
                    _ => return Err(usage("model must be 1 or 2".into())),
                }
                .map_err(|e| match e {
                    arithdyn_core::rotation::RotError::DepthExhausted(_) => {
                        (EXIT_UNRESOLVED, "no representation within the depth bound".into())
                    }
                    other => usage(other.to_string()),
                })?;
                emit(
                    json!({
                        "digits": d,
                        "plain": d.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
                    }),
                    cli.format,
                );
            }
            RotateCmd::Unique { alpha } => {
                let cf = parse_alpha(&alpha).map_err(usage)?;
                let a = unique_rotational_analysis(&cf, 64)
                    .map_err(|e| usage(e.to_string()))?;
                if a.cardinality == Cardinality::Unknown {
                    return Err((
                        EXIT_PRECISION,
                        "alpha not exact enough to decide the verdicts".into(),
                    ));
                }
                emit(
                    json!({
                        "empty": a.empty,
                        "measure_zero": a.measure_zero,
                        "cardinality": format!("{:?}", a.cardinality),
                        "dim_positive": a.dim_positive,
                        "mu_upper": a.mu_k_alpha.value + a.mu_k_alpha.error_bound,
                        "plain": format!("{:?}", a.cardinality),
                    }),
                    cli.format,
                );
            }
            RotateCmd::Stats {
                alpha,
                n,
                samples,
                seed,
            } => {
                let cf = parse_alpha(&alpha).map_err(usage)?;
                let m = markov_measure(&cf, n).map_err(|e| usage(e.to_string()))?;
                let draws =
                    sample_digits(&m, n, samples, seed).map_err(|e| usage(e.to_string()))?;
                let st = digit_statistics(&draws);
                emit(
                    json!({
                        "n": n, "samples": samples, "seed": seed,
                        "mean": st.mean, "variance": st.variance,
                        "skewness": st.skewness, "excess_kurtosis": st.excess_kurtosis,
                        "plain": format!("mean {} variance {} skew {} exkurt {}", st.mean, st.variance, st.skewness, st.excess_kurtosis),
                    }),
                    cli.format,
                );
            }
        },
        Cmd::Adic { cmd } => match cmd {
            AdicCmd::Succ {
                compactum,
                path,
                steps,
            } => {
                let c = parse_compactum(&compactum).map_err(usage)?;
                let digits: Result<Vec<u64>, _> =
                    path.split(',').map(|v| u64::from_str(v.trim())).collect();
                let mut p = AdicPath {
                    digits: digits.map_err(|_| usage(format!("bad path {path}")))?,
                };
                c.validate_path(&p.digits)
                    .map_err(|e| usage(e.to_string()))?;
                let mut hit_max = false;
                for _ in 0..steps {
                    match successor(&p, &c).map_err(|e| usage(e.to_string()))? {
                        Ok(next) => p = next,
                        Err(_) => {
                            hit_max = true;
                            break;
                        }
                    }
                }
                emit(
                    json!({
                        "path": p.digits,
                        "maximal": hit_max,
                        "plain": p.digits.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
                    }),
                    cli.format,
                );
            }
        },
        Cmd::Toral { cmd } => match cmd {
            ToralCmd::Eval { matrix, xi, window } => {
                let m = parse_matrix(&matrix).map_err(usage)?;
                let dim = m.len();
                let (_auto, field) = pisot_field(m)?;
                let xi = parse_xi(&xi, &field).map_err(usage)?;
                let t = HomoclinicPoint::new(xi).map_err(|e| usage(e.to_string()))?;
                let w = parse_window(&window).map_err(usage)?;
                let beta = Beta::algebraic(&field);
                let admissible =
                    two_sided_admissible(&w, &beta).map_err(|e| usage(e.to_string()))?;
                let coords = homoclinic_eval(&t, &w, dim);
                emit(
                    json!({
                        "admissible": admissible,
                        "coords": coords.iter().map(|c| json!({"value": c.value, "error_bound": c.error_bound})).collect::<Vec<_>>(),
                        "plain": coords.iter().map(|c| format!("{:.12}", c.value)).collect::<Vec<_>>().join(","),
                    }),
                    cli.format,
                );
            }
            ToralCmd::Preimages { matrix, xi } => {
                let m = parse_matrix(&matrix).map_err(usage)?;
                let (_auto, field) = pisot_field(m)?;
                let xi = parse_xi(&xi, &field).map_err(usage)?;
                let t = HomoclinicPoint::new(xi).map_err(|e| usage(e.to_string()))?;
                let k = preimage_count(&t).map_err(|e| usage(e.to_string()))?;
                emit(
                    json!({"preimages": k.to_string(), "plain": k.to_string()}),
                    cli.format,
                );
            }
            ToralCmd::Bac { matrix, bound } => {
                let m = parse_matrix(&matrix).map_err(usage)?;
                match bac_search(&m, bound).map_err(|e| usage(e.to_string()))? {
                    BacResult::Found { n } => {
                        let nv: Vec<BigInt> = n.iter().map(|&v| BigInt::from(v)).collect();
                        let f = f_form(&m, &nv).map_err(|e| usage(e.to_string()))?;
                        emit(
                            json!({
                                "found": true, "n": n, "f": f.to_string(),
                                "plain": format!("n=({}) f={}", n.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","), f),
                            }),
                            cli.format,
                        );
                    }
                    BacResult::NotFoundWithinBound { min_abs_f, at } => {
                        emit(
                            json!({
                                "found": false, "bound": bound,
                                "min_abs_f": min_abs_f.to_string(), "at": at,
                                "plain": format!("no solution with bound {bound}; min |f| = {min_abs_f}"),
                            }),
                            cli.format,
                        );
                        return Err((EXIT_UNRESOLVED, String::new()));
                    }
                }
            }
        },
    }
    Ok(())
}

fn parse_compactum(s: &str) -> Result<MarkovCompactum, String> {
    if let Some(rest) = s.strip_prefix("full:") {
        let radices: Result<Vec<u64>, _> =
            rest.split(',').map(|v| v.trim().parse::<u64>()).collect();
        return Ok(MarkovCompactum::full_odometer(
            &radices.map_err(|_| format!("bad radices {rest}"))?,
        ));
    }
    if let Some(rest) = s.strip_prefix("golden:") {
        let depth: usize = rest.parse().map_err(|_| format!("bad depth {rest}"))?;
        return Ok(MarkovCompactum::golden(depth));
    }
    let raw: MarkovCompactum =
        serde_json::from_str(s).map_err(|e| format!("bad compactum JSON: {e}"))?;
    // re-validate: deserialization bypasses the constructor checks
    MarkovCompactum::new(raw.levels, raw.incidence).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind::*;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, DisplayHelp | DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_USAGE)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}
