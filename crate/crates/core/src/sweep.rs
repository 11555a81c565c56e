//! Deterministic parameter sweeps over `(n, t, ε, t_k)` cells.
//!
//! Configs are plain `key = value` lines with comma-separated lists:
//!
//! ```text
//! n = 2,3
//! t = 0,1,2,3
//! epsilon = 0.5,0.25
//! t_k = required          # or an explicit list, e.g. 0,2,4
//! generators = flat-random-support,random-diagonal
//! sources_per_cell = 100
//! seed = 7
//! record_timing = false
//! ```
//!
//! Sources are seeded from `(seed, n, t, source_id)` only, so the same
//! source appears in every `(ε, t_k)` cell of its `(n, t)` group. Rows are
//! emitted in `(cell, source)` order whatever order the workers finish in.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::cipher::{
    avg_channel_serial, implied_epsilon, indist_distance, joint_purity, key_length_required,
    purity_bound, CipherParams, MAX_QUBITS,
};
use crate::sources::{random_t_source, GeneratorKind};
use crate::{Error, Result};

/// Identifier of the per-source random stream, written into CSV headers.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64); source seed = splitmix64 mix of (seed, n, t, source_id)";

pub const CSV_HEADER: &str = "n,t,t_k,epsilon_target,seed,source_id,generator_kind,trace_distance,joint_purity,purity_bound,implied_epsilon,pass,runtime_ms";

const BOUND_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum KeyLengths {
    /// `key_length_required(n, t, ε)` per cell.
    Required,
    Explicit(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n: Vec<u32>,
    pub t: Vec<u32>,
    pub t_k: KeyLengths,
    pub epsilon: Vec<f64>,
    pub generators: Vec<GeneratorKind>,
    pub sources_per_cell: usize,
    pub seed: u64,
    /// Wall-clock `runtime_ms` per row; off by default so output is
    /// byte-reproducible.
    pub record_timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n: vec![2],
            t: vec![1],
            t_k: KeyLengths::Required,
            epsilon: vec![0.5],
            generators: GeneratorKind::ALL.to_vec(),
            sources_per_cell: 10,
            seed: 0,
            record_timing: false,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::Parse(format!("{key}: cannot parse {:?}", s.trim())))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Parse(format!("{key}: cannot parse {:?}", value.trim())))
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            match key {
                "n" => cfg.n = parse_list(key, value)?,
                "t" => cfg.t = parse_list(key, value)?,
                "t_k" => {
                    cfg.t_k = if value.trim() == "required" {
                        KeyLengths::Required
                    } else {
                        KeyLengths::Explicit(parse_list(key, value)?)
                    }
                }
                "epsilon" => cfg.epsilon = parse_list(key, value)?,
                "generators" => cfg.generators = parse_list(key, value)?,
                "sources_per_cell" => cfg.sources_per_cell = parse_one(key, value)?,
                "seed" => cfg.seed = parse_one(key, value)?,
                "record_timing" => cfg.record_timing = parse_one(key, value)?,
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |name: &str| Error::Parse(format!("{name} list is empty"));
        if self.n.is_empty() {
            return Err(empty("n"));
        }
        if self.t.is_empty() {
            return Err(empty("t"));
        }
        if self.epsilon.is_empty() {
            return Err(empty("epsilon"));
        }
        if self.generators.is_empty() {
            return Err(empty("generators"));
        }
        if let KeyLengths::Explicit(v) = &self.t_k {
            if v.is_empty() {
                return Err(empty("t_k"));
            }
        }
        if self.sources_per_cell == 0 {
            return Err(Error::Parse("sources_per_cell must be positive".into()));
        }
        if let Some(n) = self.n.iter().find(|&&n| n == 0 || n > MAX_QUBITS) {
            return Err(Error::Parse(format!("n = {n} outside 1..={MAX_QUBITS}")));
        }
        if let Some(e) = self.epsilon.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::Parse(format!("epsilon = {e} outside (0, 1]")));
        }
        if let KeyLengths::Explicit(v) = &self.t_k {
            for &n in &self.n {
                if let Some(tk) = v.iter().find(|&&tk| tk > 2 * n) {
                    return Err(Error::Parse(format!("t_k = {tk} exceeds 2n = {} for n = {n}", 2 * n)));
                }
            }
        }
        if !self.n.iter().any(|&n| self.t.iter().any(|&t| t <= n)) {
            return Err(Error::Parse("no (n, t) pair with t <= n".into()));
        }
        Ok(())
    }

    /// Cells in emission order: `n`, then `t ≤ n`, then `ε`, then `t_k`.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let mut cells = Vec::new();
        for &n in &self.n {
            for &t in self.t.iter().filter(|&&t| t <= n) {
                for &epsilon in &self.epsilon {
                    let required = key_length_required(n, t, epsilon)?;
                    let key_lengths = match &self.t_k {
                        KeyLengths::Required => vec![required],
                        KeyLengths::Explicit(v) => v.clone(),
                    };
                    for t_k in key_lengths {
                        cells.push(Cell {
                            n,
                            t,
                            t_k,
                            epsilon,
                            required,
                        });
                    }
                }
            }
        }
        Ok(cells)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub n: u32,
    pub t: u32,
    pub t_k: u32,
    pub epsilon: f64,
    /// Key length the security bound asks for at this `(n, t, ε)`.
    pub required: u32,
}

impl Cell {
    /// Whether the bound applies, i.e. the cell is not under-keyed.
    pub fn keyed_enough(&self) -> bool {
        self.t_k >= self.required
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: u32,
    pub t: u32,
    pub t_k: u32,
    pub epsilon_target: f64,
    pub seed: u64,
    pub source_id: usize,
    pub generator_kind: GeneratorKind,
    pub trace_distance: f64,
    pub joint_purity: f64,
    pub purity_bound: f64,
    pub implied_epsilon: f64,
    pub pass: bool,
    pub runtime_ms: f64,
}

impl SweepRow {
    pub fn purity_chain_holds(&self) -> bool {
        self.joint_purity <= self.purity_bound + BOUND_TOL
    }

    pub fn implied_dominates(&self) -> bool {
        self.trace_distance <= self.implied_epsilon + BOUND_TOL
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.11e},{:.11e},{:.11e},{:.11e},{},{:.3}",
            self.n,
            self.t,
            self.t_k,
            self.epsilon_target,
            self.seed,
            self.source_id,
            self.generator_kind,
            self.trace_distance,
            self.joint_purity,
            self.purity_bound,
            self.implied_epsilon,
            self.pass,
            self.runtime_ms,
        )
    }
}

/// Per-source seed, a function of the master seed and `(n, t, source_id)`.
pub fn source_seed(master: u64, n: u32, t: u32, source_id: usize) -> u64 {
    let tag = ((n as u64) << 56) ^ ((t as u64) << 48) ^ source_id as u64;
    splitmix64(master ^ splitmix64(tag))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Measures one source in one cell.
pub fn run_row(cell: &Cell, master_seed: u64, source_id: usize, kind: GeneratorKind, record_timing: bool) -> Result<SweepRow> {
    let start = Instant::now();
    let seed = source_seed(master_seed, cell.n, cell.t, source_id);
    let state = random_t_source(cell.n, cell.t, kind, seed)?;
    let params = CipherParams::standard(cell.n, cell.t_k)?;
    let out = avg_channel_serial(&state, &params)?;
    let trace_distance = indist_distance(&out)?;
    let runtime_ms = if record_timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok(SweepRow {
        n: cell.n,
        t: cell.t,
        t_k: cell.t_k,
        epsilon_target: cell.epsilon,
        seed,
        source_id,
        generator_kind: kind,
        trace_distance,
        joint_purity: joint_purity(&out),
        purity_bound: purity_bound(&state, &params)?,
        implied_epsilon: implied_epsilon(&out),
        pass: trace_distance <= cell.epsilon,
        runtime_ms,
    })
}

#[derive(Clone, Debug)]
pub struct CellSummary {
    pub cell: Cell,
    pub max_trace_distance: f64,
    pub failures: usize,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub cells: Vec<CellSummary>,
}

impl SweepReport {
    pub fn purity_violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.purity_chain_holds()).count()
    }

    pub fn implied_violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.implied_dominates()).count()
    }

    /// Failing rows in cells keyed at or above the required length.
    pub fn bound_violations(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| c.cell.keyed_enough())
            .map(|c| c.failures)
            .sum()
    }

    pub fn all_bounds_hold(&self) -> bool {
        self.purity_violations() == 0 && self.implied_violations() == 0 && self.bound_violations() == 0
    }

    /// The full CSV document: RNG comment, header, rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# rng: {RNG_ALGORITHM}");
        let _ = writeln!(s, "{CSV_HEADER}");
        for row in &self.rows {
            let _ = writeln!(s, "{}", row.to_csv_line());
        }
        s
    }

    pub fn summary_lines(&self) -> Vec<String> {
        self.cells
            .iter()
            .map(|c| {
                format!(
                    "cell n={} t={} t_k={} (required {}) epsilon={}: max trace_distance {:.6e}, {} failing row(s)",
                    c.cell.n,
                    c.cell.t,
                    c.cell.t_k,
                    c.cell.required,
                    c.cell.epsilon,
                    c.max_trace_distance,
                    c.failures
                )
            })
            .collect()
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let cells = cfg.cells()?;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.sources_per_cell).map(move |s| (c, s)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(c, s)| {
            let kind = cfg.generators[s % cfg.generators.len()];
            run_row(&cells[c], cfg.seed, s, kind, cfg.record_timing)
        })
        .collect::<Result<Vec<_>>>()?;
    let summaries = cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let slice = &rows[c * cfg.sources_per_cell..(c + 1) * cfg.sources_per_cell];
            CellSummary {
                cell: *cell,
                max_trace_distance: slice.iter().map(|r| r.trace_distance).fold(0.0, f64::max),
                failures: slice.iter().filter(|r| !r.pass).count(),
            }
        })
        .collect();
    Ok(SweepReport {
        rows,
        cells: summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config() {
        let cfg = SweepConfig::parse(
            "# demo\nn = 2,3\nt=0,1\nt_k = 0, 2\nepsilon=0.5\ngenerators = flat,random-diagonal\nsources_per_cell=3\nseed=9\n",
        )
        .unwrap();
        assert_eq!(cfg.n, vec![2, 3]);
        assert_eq!(cfg.t_k, KeyLengths::Explicit(vec![0, 2]));
        assert_eq!(cfg.generators.len(), 2);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.cells().unwrap().len(), 2 * 2 * 2);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(SweepConfig::parse("n = 6").is_err());
        assert!(SweepConfig::parse("n = 1\nt_k = 3").is_err());
        assert!(SweepConfig::parse("n =").is_err());
        assert!(SweepConfig::parse("bogus = 1").is_err());
        assert!(SweepConfig::parse("epsilon = 0").is_err());
        assert!(SweepConfig::parse("n = 2\nno equals sign").is_err());
    }

    #[test]
    fn full_key_one_qubit_cell_is_perfect() {
        let cfg = SweepConfig {
            n: vec![1],
            t: vec![0],
            t_k: KeyLengths::Explicit(vec![2]),
            epsilon: vec![0.1],
            sources_per_cell: 8,
            ..Default::default()
        };
        let report = run_sweep(&cfg).unwrap();
        assert!(report.rows.iter().all(|r| r.trace_distance <= 1e-10));
    }

    #[test]
    fn full_entropy_cell_has_zero_distance() {
        let cfg = SweepConfig {
            n: vec![2],
            t: vec![2],
            t_k: KeyLengths::Explicit(vec![0, 1]),
            sources_per_cell: 8,
            ..Default::default()
        };
        let report = run_sweep(&cfg).unwrap();
        assert!(report.rows.iter().all(|r| r.trace_distance <= 1e-12));
    }

    #[test]
    fn required_key_cell_passes() {
        let cfg = SweepConfig {
            n: vec![3],
            t: vec![1],
            epsilon: vec![0.5],
            sources_per_cell: 40,
            seed: 3,
            ..Default::default()
        };
        let cells = cfg.cells().unwrap();
        assert_eq!(cells[0].t_k, 4);
        let report = run_sweep(&cfg).unwrap();
        assert!(report.rows.iter().all(|r| r.pass));
        assert!(report.all_bounds_hold());
    }

    #[test]
    fn key_columns_are_monotone_per_source() {
        let cfg = SweepConfig {
            n: vec![2],
            t: vec![0, 1],
            t_k: KeyLengths::Explicit(vec![0, 1, 2, 3, 4]),
            sources_per_cell: 6,
            seed: 11,
            ..Default::default()
        };
        let report = run_sweep(&cfg).unwrap();
        for t in [0, 1] {
            for s in 0..6 {
                let series: Vec<&SweepRow> = report
                    .rows
                    .iter()
                    .filter(|r| r.t == t && r.source_id == s)
                    .collect();
                assert_eq!(series.len(), 5);
                assert!(series.windows(2).all(|w| w[1].trace_distance <= w[0].trace_distance + 1e-12));
                assert!(series.iter().all(|r| r.seed == series[0].seed));
            }
        }
    }

    #[test]
    fn csv_is_deterministic() {
        let cfg = SweepConfig {
            n: vec![1, 2],
            t: vec![0, 1],
            sources_per_cell: 5,
            seed: 1,
            ..Default::default()
        };
        let a = run_sweep(&cfg).unwrap().to_csv();
        let b = run_sweep(&cfg).unwrap().to_csv();
        assert_eq!(a, b);
        let mut lines = a.lines();
        assert!(lines.next().unwrap().starts_with("# rng: ChaCha8Rng"));
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(lines.count(), 4 * 5);
    }

    #[test]
    fn rows_satisfy_bounds() {
        let cfg = SweepConfig {
            n: vec![2],
            t: vec![0, 1, 2],
            t_k: KeyLengths::Explicit(vec![0, 1, 3]),
            sources_per_cell: 8,
            ..Default::default()
        };
        let report = run_sweep(&cfg).unwrap();
        assert_eq!(report.purity_violations(), 0);
        assert_eq!(report.implied_violations(), 0);
    }
}
