//! Subcommands of the `eqcipher` binary. Each returns a text report and
//! whether every bound it asserts held.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use eqcipher_core::adversary::{
    computational_basis, gl_reduce_instance, max_f, simulate_guessing_game, GameInstance,
};
use eqcipher_core::cipher::{avg_channel, block_distances, indist_distance, key_length_required};
use eqcipher_core::hashfam::{verify_xor_universal, KeySpec, PermutationFamily};
use eqcipher_core::qmatrix::min_entropy;
use eqcipher_core::sources::{decompose_flat, parse_weights, random_t_source};
use eqcipher_core::sweep::run_sweep;
use eqcipher_core::{
    Adversary, CipherParams, DensityOperator, FunctionTable, GeneratorKind, Interpretation,
    SweepConfig, C64,
};

#[derive(Parser, Debug)]
#[command(name = "eqcipher", version, about = "Entropically secure quantum cipher toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a parameter sweep and write the CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustively check XOR-universality of the multiplication family.
    VerifyFamily {
        #[arg(long)]
        m: u32,
    },
    /// Evaluate an adversary against an instance file.
    Attack {
        #[arg(long, value_enum)]
        kind: AttackKind,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decompose a distribution into flat sources.
    Decompose {
        #[arg(long)]
        weights: String,
        #[arg(long)]
        t: u32,
    },
    /// Print per-index distances of the averaged channel output.
    Channel {
        #[arg(long)]
        n: u32,
        #[arg(long = "t-k")]
        t_k: u32,
        #[arg(long)]
        source: String,
        #[arg(long = "index-limit", default_value_t = 16)]
        index_limit: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttackKind {
    Helstrom,
    Gl,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub ok: bool,
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Sweep { config, out } => cmd_sweep(&config, &out),
        Command::VerifyFamily { m } => cmd_verify_family(m),
        Command::Attack { kind, spec, seed } => {
            let text = std::fs::read_to_string(&spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            cmd_attack(kind, &AttackSpec::parse(&text)?, seed)
        }
        Command::Decompose { weights, t } => cmd_decompose(&weights, t),
        Command::Channel {
            n,
            t_k,
            source,
            index_limit,
        } => cmd_channel(n, t_k, &source, index_limit),
    }
}

pub fn cmd_sweep(config: &Path, out: &Path) -> Result<Outcome> {
    let text =
        std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = SweepConfig::parse(&text)?;
    let report = run_sweep(&cfg)?;
    std::fs::write(out, report.to_csv()).with_context(|| format!("writing {}", out.display()))?;
    let mut s = String::new();
    for line in report.summary_lines() {
        writeln!(s, "{line}")?;
    }
    writeln!(
        s,
        "{} rows; purity violations {}; implied-epsilon violations {}; failing rows in sufficiently keyed cells {}",
        report.rows.len(),
        report.purity_violations(),
        report.implied_violations(),
        report.bound_violations()
    )?;
    Ok(Outcome {
        report: s,
        ok: report.all_bounds_hold(),
    })
}

pub fn cmd_verify_family(m: u32) -> Result<Outcome> {
    let fam = PermutationFamily::standard(m)?;
    let keys = KeySpec::new(m, m)?;
    let r = verify_xor_universal(&fam, &keys)?;
    let mut s = String::new();
    writeln!(s, "m = {m}, modulus = {:#x}", fam.field().modulus())?;
    writeln!(s, "max averaged offset probability = {}", r.max_prob)?;
    writeln!(s, "bound 2^-m = {}", r.bound)?;
    writeln!(s, "literal worst case = {}", r.literal_worst)?;
    writeln!(s, "{}", if r.pass { "PASS" } else { "FAIL" })?;
    Ok(Outcome {
        report: s,
        ok: r.pass,
    })
}

pub fn cmd_decompose(weights: &str, t: u32) -> Result<Outcome> {
    let w = parse_weights(weights)?;
    let dec = decompose_flat(&w, t)?;
    let residual = dec.residual_against(&w).max(dec.residual);
    let mut s = String::new();
    writeln!(s, "{} term(s), t = {t}", dec.terms.len())?;
    for (q, flat) in &dec.terms {
        writeln!(s, "  {q:.12} x uniform{:?}", flat.support)?;
    }
    writeln!(s, "reconstruction residual = {residual:.3e}")?;
    Ok(Outcome {
        report: s,
        ok: residual <= 1e-10,
    })
}

pub fn cmd_channel(n: u32, t_k: u32, source: &str, index_limit: usize) -> Result<Outcome> {
    let state = parse_state(n, source)?;
    let params = CipherParams::standard(n, t_k)?;
    let out = avg_channel(&state, &params)?;
    let dists = block_distances(&out)?;
    let mut s = String::new();
    writeln!(
        s,
        "n = {n}, t_k = {t_k}, H_min(source) = {:.6}, {} indices",
        min_entropy(&state)?,
        dists.len()
    )?;
    for (i, d) in dists.iter().take(index_limit).enumerate() {
        writeln!(s, "  index {:>5}: {d:.12e}", i + 1)?;
    }
    if dists.len() > index_limit {
        writeln!(s, "  ... {} more", dists.len() - index_limit)?;
    }
    writeln!(s, "indist_distance = {:.12e}", indist_distance(&out)?)?;
    Ok(Outcome { report: s, ok: true })
}

/// Parses a state literal on `n` qubits:
/// `basis:j`, `fourier:j`, `mixed`, `diag:w0,w1,...` or
/// `random:<generator>:<t>:<seed>`.
pub fn parse_state(n: u32, literal: &str) -> Result<DensityOperator> {
    let literal = literal.trim();
    let d = 1usize << n;
    let (head, rest) = literal.split_once(':').unwrap_or((literal, ""));
    let state = match head {
        "mixed" => DensityOperator::maximally_mixed(n),
        "basis" => DensityOperator::basis(n, rest.trim().parse()?)?,
        "fourier" => {
            let j: usize = rest.trim().parse()?;
            if j >= d {
                bail!("fourier index {j} out of range for dimension {d}");
            }
            let norm = 1.0 / (d as f64).sqrt();
            let amps: Vec<C64> = (0..d)
                .map(|y| {
                    let angle = 2.0 * std::f64::consts::PI * ((j * y) % d) as f64 / d as f64;
                    C64::from_polar(norm, angle)
                })
                .collect();
            DensityOperator::pure(&amps)?
        }
        "diag" => DensityOperator::diagonal(&parse_weights(rest)?)?,
        "random" => {
            let parts: Vec<&str> = rest.split(':').collect();
            let [kind, t, seed] = parts[..] else {
                bail!("expected random:<generator>:<t>:<seed>, got {literal:?}");
            };
            random_t_source(n, t.trim().parse()?, kind.parse::<GeneratorKind>()?, seed.trim().parse()?)?
        }
        _ => bail!("unknown state literal {literal:?}"),
    };
    if state.n_qubits() != n {
        bail!("state {literal:?} has {} qubits, expected {n}", state.n_qubits());
    }
    Ok(state)
}

/// An attack instance: cipher parameters, an interpretation of the source
/// and the function the adversary tries to predict.
#[derive(Debug)]
pub struct AttackSpec {
    pub n: u32,
    pub t_k: u32,
    pub epsilon: f64,
    pub interpretation: Interpretation,
    pub f: Vec<u32>,
}

impl AttackSpec {
    /// `key = value` lines: `n`, `t_k`, `epsilon`, repeated
    /// `component = weight;state` and `f = v0,v1,...`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut t_k = None;
        let mut epsilon = 0.25;
        let mut raw_components = Vec::new();
        let mut f = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", lineno + 1))?;
            let value = value.trim();
            match key.trim() {
                "n" => n = Some(value.parse::<u32>()?),
                "t_k" => t_k = Some(value.parse::<u32>()?),
                "epsilon" => epsilon = value.parse::<f64>()?,
                "component" => {
                    let (w, state) = value
                        .split_once(';')
                        .ok_or_else(|| anyhow!("line {}: expected weight;state", lineno + 1))?;
                    raw_components.push((w.trim().parse::<f64>()?, state.trim().to_string()));
                }
                "f" => {
                    f = Some(
                        value
                            .split(',')
                            .map(|v| v.trim().parse::<u32>())
                            .collect::<std::result::Result<Vec<_>, _>>()?,
                    )
                }
                other => bail!("line {}: unknown key {other:?}", lineno + 1),
            }
        }
        let n = n.ok_or_else(|| anyhow!("missing n"))?;
        let t_k = t_k.ok_or_else(|| anyhow!("missing t_k"))?;
        let f = f.ok_or_else(|| anyhow!("missing f"))?;
        if raw_components.is_empty() {
            bail!("no components");
        }
        if f.len() != raw_components.len() {
            bail!("f has {} values for {} components", f.len(), raw_components.len());
        }
        let components = raw_components
            .iter()
            .map(|(w, s)| Ok((*w, parse_state(n, s)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            t_k,
            epsilon,
            interpretation: Interpretation::from_components(components)?,
            f,
        })
    }

    fn function(&self) -> Result<FunctionTable> {
        let max = self.f.iter().copied().max().unwrap_or(0);
        let width = (32 - max.leading_zeros()).max(1);
        Ok(FunctionTable::new(self.f.clone(), width)?)
    }
}

pub fn cmd_attack(kind: AttackKind, spec: &AttackSpec, seed: u64) -> Result<Outcome> {
    let params = CipherParams::standard(spec.n, spec.t_k)?;
    let game = GameInstance::new(&spec.interpretation, &params)?;
    let f = spec.function()?;
    let parent = spec.interpretation.parent();
    let h = min_entropy(parent)?;
    let t = ((h + 1e-9).floor() as u32).min(spec.n);
    let required = key_length_required(spec.n, t, spec.epsilon)?;

    let mut s = String::new();
    let mut ok = true;
    writeln!(
        s,
        "n = {}, t_k = {}, epsilon = {}, H_min(parent) = {h:.6} (t = {t}), required t_k = {required}",
        spec.n, spec.t_k, spec.epsilon
    )?;

    let adversary = match kind {
        AttackKind::Helstrom => {
            if f.width() != 1 {
                bail!("the helstrom attack needs a one-bit f");
            }
            let w0 = game
                .conditional_output(|j| f.outputs()[j] == 0)
                .ok_or_else(|| anyhow!("f never takes the value 0"))?;
            let w1 = game
                .conditional_output(|j| f.outputs()[j] == 1)
                .ok_or_else(|| anyhow!("f never takes the value 1"))?;
            let adv = Adversary::helstrom(&w0, &w1)?;
            let block = (seed % w0.blocks().len() as u64) as usize;
            let povm = helstrom_binary(&w0, &w1, block)?;
            let trials = 20_000;
            let simulated =
                simulate_guessing_game(&povm, &w0.blocks()[block], &w1.blocks()[block], trials, seed)?;
            let exact = eqcipher_core::adversary::exact_win_probability(
                &povm,
                &w0.blocks()[block],
                &w1.blocks()[block],
            )?;
            writeln!(
                s,
                "helstrom on index {}: exact win probability {exact:.6}, simulated {simulated:.6} over {trials} trials",
                block + 1
            )?;
            adv
        }
        AttackKind::Gl => Adversary::basis_ml(&game, &f, &computational_basis(params.dim()))?,
    };

    let result = game.gap(&adversary, &f)?;
    writeln!(
        s,
        "p_real = {:.12}, p_ideal = {:.12}, gap = {:.12e}",
        result.p_real, result.p_ideal, result.gap
    )?;
    writeln!(s, "max_f = {:.12}", max_f(&f, &spec.interpretation)?)?;

    // |p_real - p_ideal| <= sum_j p_j (d_j + d_parent) by the triangle inequality
    let d_parent = indist_distance(game.parent_output())?;
    let mut envelope = 0.0;
    for (p, out) in game.weights().iter().zip(game.component_outputs()) {
        envelope += p * (indist_distance(out)? + d_parent);
    }
    let envelope_ok = result.gap <= envelope + 1e-10;
    ok &= envelope_ok;
    writeln!(
        s,
        "distance envelope = {envelope:.12e} ({})",
        if envelope_ok { "holds" } else { "VIOLATED" }
    )?;

    if kind == AttackKind::Gl && f.width() > 1 {
        match gl_reduce_instance(&game, &adversary, &f, result.gap) {
            Ok(red) => writeln!(
                s,
                "GL predicate r = {}: gap = {:.12e} (>= {:.12e})",
                red.r,
                red.result.gap,
                result.gap / 2.0
            )?,
            Err(e) => {
                ok = false;
                writeln!(s, "GL reduction FAILED: {e}")?;
            }
        }
    }

    if spec.t_k < required {
        let broken = result.gap > spec.epsilon;
        writeln!(
            s,
            "under-keyed (t_k {} < {required}): gap {} epsilon{}",
            spec.t_k,
            if broken { ">" } else { "<=" },
            if broken { ", security failure demonstrated" } else { "" }
        )?;
    }
    Ok(Outcome { report: s, ok })
}

fn helstrom_binary(
    w0: &eqcipher_core::ChannelOutput,
    w1: &eqcipher_core::ChannelOutput,
    block: usize,
) -> Result<eqcipher_core::BinaryPovm> {
    Ok(eqcipher_core::adversary::helstrom_povm(
        &w0.blocks()[block],
        &w1.blocks()[block],
    )?)
}
