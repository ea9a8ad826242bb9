//! Deterministic parameter sweeps and figure-data exports.
//!
//! A [`SweepPlan`] fixes the field, the defect separations, the coupling
//! grid, the chain size, the master seed, and which measures to evaluate.
//! [`run_sweep`] walks the `(d, eps_d)` lattice, builds the exact defect
//! reduced density matrix at every point, evaluates the enabled measures,
//! and renders one CSV row per point. Points execute in a rayon work pool
//! but rows are collected in plan order, and every randomized protocol draws
//! from a seed derived only from the master seed and the point index, so the
//! CSV body is byte-identical however many threads run it.
//!
//! Companion exports serve the other figure-shaped data sets:
//! [`run_spectrum`] dumps single-particle levels against coupling strength,
//! [`run_regions`] tabulates the bound-state count by three independent
//! methods, and [`run_rdm_dump`] writes the ten independent entries of each
//! reduced density matrix.
//!
//! All numbers are printed with 17 significant digits so a decimal
//! round-trip reproduces the exact binary values. The CSV starts with a
//! single `#`-prefixed metadata line; timestamps never enter the CSV so
//! re-runs can be compared byte for byte. A sidecar metadata document
//! ([`SweepOutput::meta`]) records the full plan and the code version.
//!
//! Exact threshold points are the one expected failure mode: at a coupling
//! where a single-particle level sits numerically at zero energy the ground
//! state is degenerate and the point is reported in the `error` column while
//! the sweep continues. The default grid includes such points (for example
//! the second level detaches exactly at `eps_d = 1`), so consumers should
//! expect a handful of error rows there.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::entanglement::{
    measure_rdm, mix_seed, EntanglementError, MeasureReport, MeasureSettings, MeasureToggles,
    DEFAULT_BOUND_RUNS, DEFAULT_WITNESS_ITERS, DEFAULT_WITNESS_SAMPLES,
};
use crate::greens::{bound_state_energies, region_classify, GreensError, ImpuritySet};
use crate::model::{ChainSpec, ModelError};
use crate::rdm::{rdm_from_correlations, DefectRdm, RdmError};
use crate::spectrum::{count_bound_states, diagonalize, ground_state_correlations, SpectrumError};

/// Default lower edge of the `eps_d` grid.
pub const DEFAULT_EPS_D_MIN: f64 = 0.05;
/// Default upper edge of the `eps_d` grid.
pub const DEFAULT_EPS_D_MAX: f64 = 6.0;
/// Default `eps_d` grid step.
pub const DEFAULT_EPS_D_STEP: f64 = 0.05;
/// Default chain size for production sweeps.
pub const DEFAULT_SWEEP_N: usize = 1024;
/// Column header of the sweep CSV.
pub const SWEEP_HEADER: &str =
    "h,d,epsilon,eps_d,c12,c13,gme_analytic,gme_lb_ma,gme_lb_hong,witness_w,seed,error";

/// Failure modes of sweep planning and the figure exports.
#[derive(Debug, Error)]
pub enum SweepError {
    /// The plan text or the plan values are unusable.
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Greens(#[from] GreensError),
    #[error(transparent)]
    Rdm(#[from] RdmError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
}

/// Everything that determines a sweep: physics parameters, grid, seed,
/// measure selection, protocol sizes, and the output path the CLI writes to.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    /// Transverse field.
    pub h: f64,
    /// Defect separations, swept in the given order.
    pub d_list: Vec<usize>,
    /// First `eps_d` value.
    pub eps_d_min: f64,
    /// Grid ceiling; the last point is the largest `min + k step <= max`.
    pub eps_d_max: f64,
    /// Grid step, strictly positive.
    pub eps_d_step: f64,
    /// Chain size.
    pub n: usize,
    /// Master seed; every point derives its own child seed from it.
    pub seed: u64,
    /// Enabled measures.
    pub toggles: MeasureToggles,
    /// Multistart runs per optimized lower bound.
    pub bound_runs: usize,
    /// Witness iterations.
    pub witness_iters: usize,
    /// Biseparable samples per witness iteration.
    pub witness_samples: usize,
    /// Output path recorded in metadata; file writing is the caller's job.
    pub out: String,
}

impl Default for SweepPlan {
    fn default() -> Self {
        SweepPlan {
            h: 2.0,
            d_list: (1..=9).collect(),
            eps_d_min: DEFAULT_EPS_D_MIN,
            eps_d_max: DEFAULT_EPS_D_MAX,
            eps_d_step: DEFAULT_EPS_D_STEP,
            n: DEFAULT_SWEEP_N,
            seed: 1,
            toggles: MeasureToggles::fast(),
            bound_runs: DEFAULT_BOUND_RUNS,
            witness_iters: DEFAULT_WITNESS_ITERS,
            witness_samples: DEFAULT_WITNESS_SAMPLES,
            out: "sweep.csv".to_string(),
        }
    }
}

/// One lattice point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// Position in plan order; seeds derive from it.
    pub id: usize,
    /// Defect separation.
    pub d: usize,
    /// Separation-scaled coupling `epsilon * d`.
    pub eps_d: f64,
    /// Bare defect strength `eps_d / d`.
    pub epsilon: f64,
}

impl SweepPlan {
    /// Parses the flat `key = value` plan format.
    ///
    /// Blank lines and `#` comments are skipped; unknown keys are errors so
    /// that typos cannot silently fall back to defaults. Missing keys keep
    /// their default values.
    pub fn parse(text: &str) -> Result<Self, SweepError> {
        let mut plan = SweepPlan::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(SweepError::InvalidPlan(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                SweepError::InvalidPlan(format!("line {}: bad {what}: `{value}`", lineno + 1))
            };
            match key {
                "h" => plan.h = value.parse().map_err(|_| bad("field value"))?,
                "d_list" => {
                    let mut ds = Vec::new();
                    for tok in value.split(',') {
                        ds.push(tok.trim().parse().map_err(|_| bad("separation list"))?);
                    }
                    plan.d_list = ds;
                }
                "eps_d_min" => plan.eps_d_min = value.parse().map_err(|_| bad("grid edge"))?,
                "eps_d_max" => plan.eps_d_max = value.parse().map_err(|_| bad("grid edge"))?,
                "eps_d_step" => plan.eps_d_step = value.parse().map_err(|_| bad("grid step"))?,
                "n" => plan.n = value.parse().map_err(|_| bad("chain size"))?,
                "seed" => plan.seed = value.parse().map_err(|_| bad("seed"))?,
                "measures" => plan.toggles = parse_measures(value)?,
                "bound_runs" => plan.bound_runs = value.parse().map_err(|_| bad("run count"))?,
                "witness_iters" => {
                    plan.witness_iters = value.parse().map_err(|_| bad("iteration count"))?;
                }
                "witness_samples" => {
                    plan.witness_samples = value.parse().map_err(|_| bad("sample count"))?;
                }
                "out" => plan.out = value.to_string(),
                other => {
                    return Err(SweepError::InvalidPlan(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )));
                }
            }
        }
        plan.validate()?;
        Ok(plan)
    }

    /// Renders the plan in the same `key = value` format [`parse`] reads.
    ///
    /// [`parse`]: SweepPlan::parse
    pub fn render(&self) -> String {
        let ds: Vec<String> = self.d_list.iter().map(|d| d.to_string()).collect();
        let mut s = String::new();
        writeln!(s, "h = {}", self.h).unwrap();
        writeln!(s, "d_list = {}", ds.join(",")).unwrap();
        writeln!(s, "eps_d_min = {}", self.eps_d_min).unwrap();
        writeln!(s, "eps_d_max = {}", self.eps_d_max).unwrap();
        writeln!(s, "eps_d_step = {}", self.eps_d_step).unwrap();
        writeln!(s, "n = {}", self.n).unwrap();
        writeln!(s, "seed = {}", self.seed).unwrap();
        writeln!(s, "measures = {}", measures_string(&self.toggles)).unwrap();
        writeln!(s, "bound_runs = {}", self.bound_runs).unwrap();
        writeln!(s, "witness_iters = {}", self.witness_iters).unwrap();
        writeln!(s, "witness_samples = {}", self.witness_samples).unwrap();
        writeln!(s, "out = {}", self.out).unwrap();
        s
    }

    /// Checks the plan invariants: a usable chain, at least one separation
    /// fitting in it, a strictly increasing nonempty grid with positive
    /// couplings, and nonzero protocol sizes for the enabled measures.
    pub fn validate(&self) -> Result<(), SweepError> {
        let err = |msg: String| Err(SweepError::InvalidPlan(msg));
        if self.n < 8 || self.n % 2 != 0 {
            return err(format!("chain size {} must be even and at least 8", self.n));
        }
        if !self.h.is_finite() {
            return err(format!("field value {} must be finite", self.h));
        }
        if self.d_list.is_empty() {
            return err("separation list is empty".to_string());
        }
        for &d in &self.d_list {
            if d == 0 {
                return err("separations must be at least 1".to_string());
            }
            if 2 * d + 1 > self.n {
                return err(format!(
                    "defect window 2*{d}+1 does not fit in a chain of {} sites",
                    self.n
                ));
            }
        }
        let (min, max, step) = (self.eps_d_min, self.eps_d_max, self.eps_d_step);
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return err("grid edges and step must be finite".to_string());
        }
        if min <= 0.0 {
            return err(format!("eps_d_min {min} must be positive"));
        }
        if step <= 0.0 {
            return err(format!("eps_d_step {step} must be positive"));
        }
        if max < min {
            return err(format!("eps_d_max {max} is below eps_d_min {min}"));
        }
        if (self.toggles.ma || self.toggles.hong) && self.bound_runs == 0 {
            return err("optimized bounds need bound_runs >= 1".to_string());
        }
        if self.toggles.witness && (self.witness_iters == 0 || self.witness_samples == 0) {
            return err("witness needs witness_iters >= 1 and witness_samples >= 1".to_string());
        }
        Ok(())
    }

    /// Per-separation warnings for windows wide enough that boundary effects
    /// reach the defects. The sweep still runs; the CLI relays these.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for &d in &self.d_list {
            let spec = ChainSpec::<f64>::new(self.n, self.h, 1.0, d);
            if let Some(w) = spec.regime_warning() {
                out.push(w);
            }
        }
        out
    }

    /// The `eps_d` grid: `min + k step` for every `k` with the value at most
    /// `max` (plus a tiny slack so accumulated rounding cannot drop the last
    /// point). Strictly increasing by construction.
    pub fn eps_d_grid(&self) -> Vec<f64> {
        grid_values(self.eps_d_min, self.eps_d_max, self.eps_d_step)
    }

    /// All sweep points in plan order: separations outermost, couplings
    /// innermost, ids counting up from zero.
    pub fn points(&self) -> Vec<SweepPoint> {
        let grid = self.eps_d_grid();
        let mut pts = Vec::with_capacity(self.d_list.len() * grid.len());
        for &d in &self.d_list {
            for &eps_d in &grid {
                pts.push(SweepPoint {
                    id: pts.len(),
                    d,
                    eps_d,
                    epsilon: eps_d / d as f64,
                });
            }
        }
        pts
    }

    /// Protocol sizes bundled for [`measure_rdm`].
    pub fn measure_settings(&self) -> MeasureSettings {
        MeasureSettings {
            toggles: self.toggles,
            bound_runs: self.bound_runs,
            witness_iters: self.witness_iters,
            witness_samples: self.witness_samples,
        }
    }

    /// One-line deterministic summary for `#` metadata headers.
    fn summary(&self) -> String {
        let ds: Vec<String> = self.d_list.iter().map(|d| d.to_string()).collect();
        format!(
            "h={} d_list={} eps_d={}:{}:{} n={} seed={} measures={} bound_runs={} \
             witness_iters={} witness_samples={}",
            self.h,
            ds.join(","),
            self.eps_d_min,
            self.eps_d_max,
            self.eps_d_step,
            self.n,
            self.seed,
            measures_string(&self.toggles),
            self.bound_runs,
            self.witness_iters,
            self.witness_samples,
        )
    }
}

/// Evenly spaced values `min + k step` up to `max` (with a tiny slack so
/// accumulated rounding cannot drop the last point).
pub fn grid_values(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|k| min + step * k as f64).collect()
}

/// Parses a comma-separated measure selection.
///
/// Tokens: the individual measures `c12`, `c13`, `gme`, `ma`, `hong`,
/// `witness`, the groups `fast` (everything but the witness) and `all`, and
/// `none`. An empty string also means none, which yields a header-only CSV.
pub fn parse_measures(text: &str) -> Result<MeasureToggles, SweepError> {
    let mut t = MeasureToggles::none();
    for tok in text.split(',') {
        match tok.trim() {
            "" | "none" => {}
            "c12" => t.c12 = true,
            "c13" => t.c13 = true,
            "gme" => t.gme = true,
            "ma" => t.ma = true,
            "hong" => t.hong = true,
            "witness" => t.witness = true,
            "fast" => {
                let witness = t.witness;
                t = MeasureToggles::fast();
                t.witness = witness;
            }
            "all" => t = MeasureToggles::all(),
            other => {
                return Err(SweepError::InvalidPlan(format!(
                    "unknown measure `{other}`"
                )));
            }
        }
    }
    Ok(t)
}

/// Canonical rendering of a measure selection; inverse of [`parse_measures`].
pub fn measures_string(t: &MeasureToggles) -> String {
    let mut names = Vec::new();
    if t.c12 {
        names.push("c12");
    }
    if t.c13 {
        names.push("c13");
    }
    if t.gme {
        names.push("gme");
    }
    if t.ma {
        names.push("ma");
    }
    if t.hong {
        names.push("hong");
    }
    if t.witness {
        names.push("witness");
    }
    if names.is_empty() {
        "none".to_string()
    } else {
        names.join(",")
    }
}

/// Rendered sweep results.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    /// Metadata line, header, and one row per point; byte-reproducible.
    pub csv: String,
    /// Sidecar metadata body: tool, version, point count, and the full plan.
    /// Deliberately timestamp-free; writers append their own timestamp line.
    pub meta: String,
    /// Number of data rows.
    pub points: usize,
    /// Number of rows whose `error` column is populated.
    pub failures: usize,
}

/// Runs the full sweep and renders the CSV and its metadata.
///
/// Rows appear in plan order whatever the thread count. A failed point (for
/// example an exact threshold coupling where the ground state degenerates)
/// contributes a row with empty measure cells and the error message in the
/// last column; the sweep continues. With no measures enabled the CSV is
/// header-only.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepOutput, SweepError> {
    plan.validate()?;
    let settings = plan.measure_settings();
    let pts = if plan.toggles.is_empty() {
        Vec::new()
    } else {
        plan.points()
    };
    let rows: Vec<(String, bool)> = pts
        .par_iter()
        .map(|pt| sweep_row(plan, &settings, pt))
        .collect();
    let mut csv = String::new();
    writeln!(
        csv,
        "# defectchain sweep version={} {}",
        env!("CARGO_PKG_VERSION"),
        plan.summary()
    )
    .unwrap();
    writeln!(csv, "{SWEEP_HEADER}").unwrap();
    let mut failures = 0;
    for (row, failed) in &rows {
        csv.push_str(row);
        csv.push('\n');
        failures += usize::from(*failed);
    }
    let mut meta = String::new();
    writeln!(meta, "tool = defectchain").unwrap();
    writeln!(meta, "version = {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(meta, "command = sweep").unwrap();
    writeln!(meta, "points = {}", rows.len()).unwrap();
    meta.push_str(&plan.render());
    Ok(SweepOutput {
        csv,
        meta,
        points: rows.len(),
        failures,
    })
}

/// Builds the reduced density matrix at one point and measures it.
fn point_report(
    plan: &SweepPlan,
    settings: &MeasureSettings,
    pt: &SweepPoint,
    seed: u64,
) -> Result<MeasureReport<f64>, SweepError> {
    let spec = ChainSpec::<f64>::new(plan.n, plan.h, pt.epsilon, pt.d);
    let corr = ground_state_correlations(&spec)?;
    let rdm = rdm_from_correlations(&spec, &corr)?;
    Ok(measure_rdm(&rdm, settings, seed)?)
}

/// Renders one CSV row; the flag marks a populated error column.
fn sweep_row(plan: &SweepPlan, settings: &MeasureSettings, pt: &SweepPoint) -> (String, bool) {
    let seed = mix_seed(plan.seed, pt.id as u64);
    let prefix = format!(
        "{},{},{},{}",
        fmt_f(plan.h),
        pt.d,
        fmt_f(pt.epsilon),
        fmt_f(pt.eps_d)
    );
    match point_report(plan, settings, pt, seed) {
        Ok(rep) => (
            format!(
                "{prefix},{},{},{},{},{},{},{seed},",
                fmt_opt(rep.c12),
                fmt_opt(rep.c13),
                fmt_opt(rep.gme_analytic),
                fmt_opt(rep.gme_lb_ma),
                fmt_opt(rep.gme_lb_hong),
                fmt_opt(rep.witness_w),
            ),
            false,
        ),
        Err(err) => (
            format!("{prefix},,,,,,,{seed},{}", csv_field(&err.to_string())),
            true,
        ),
    }
}

/// Single-particle levels against coupling: rows `epsilon, omega_index,
/// omega`, all `n` levels per coupling, couplings in grid order.
///
/// The level set shifts rigidly with the field, so a run at `h + 1` equals
/// the run at `h` with every `omega` raised by one.
pub fn run_spectrum(h: f64, d: usize, n: usize, eps_grid: &[f64]) -> Result<String, SweepError> {
    if eps_grid.is_empty() {
        return Err(SweepError::InvalidPlan("empty coupling grid".to_string()));
    }
    let blocks: Vec<Result<String, SweepError>> = eps_grid
        .par_iter()
        .map(|&eps| {
            let spec = ChainSpec::<f64>::new(n, h, eps, d);
            let sp = diagonalize(&spec)?;
            let mut block = String::new();
            for (q, &omega) in sp.eigenvalues.iter().enumerate() {
                writeln!(block, "{},{q},{}", fmt_f(eps), fmt_f(omega)).unwrap();
            }
            Ok(block)
        })
        .collect();
    let mut csv = String::new();
    writeln!(
        csv,
        "# defectchain spectrum version={} h={h} d={d} n={n}",
        env!("CARGO_PKG_VERSION")
    )
    .unwrap();
    writeln!(csv, "epsilon,omega_index,omega").unwrap();
    for block in blocks {
        csv.push_str(&block?);
    }
    Ok(csv)
}

/// Bound-state count per `(epsilon, d)` by three independent methods: rows
/// `epsilon, d, region_analytic, region_spectral, region_greens`.
///
/// The analytic column applies the exact thresholds at `eps_d = 1` and `3`;
/// the spectral column counts levels outside the band of a size-`n` chain;
/// the greens column counts roots of the scattering determinant on the
/// infinite chain. All three agree away from the threshold curves; right on
/// a threshold the finite-margin methods may disagree by one.
pub fn run_regions(
    h: f64,
    n: usize,
    eps_grid: &[f64],
    d_list: &[usize],
) -> Result<String, SweepError> {
    if eps_grid.is_empty() || d_list.is_empty() {
        return Err(SweepError::InvalidPlan("empty regions grid".to_string()));
    }
    if let Some(&bad) = eps_grid.iter().find(|&&e| e <= 0.0) {
        return Err(SweepError::InvalidPlan(format!(
            "regions need positive couplings, got {bad}"
        )));
    }
    let mut cells = Vec::with_capacity(eps_grid.len() * d_list.len());
    for &eps in eps_grid {
        for &d in d_list {
            cells.push((eps, d));
        }
    }
    let rows: Vec<Result<String, SweepError>> = cells
        .par_iter()
        .map(|&(eps, d)| {
            let analytic = region_classify(eps, d).count();
            let spec = ChainSpec::<f64>::new(n, h, eps, d);
            let count = count_bound_states(&spec)?;
            let spectral = count.below + count.above;
            let site = d as i64;
            let imp = ImpuritySet::new([-site, 0, site], [-eps; 3])?;
            let greens = bound_state_energies(&imp, h, 1.0)?.len();
            Ok(format!("{},{d},{analytic},{spectral},{greens}\n", fmt_f(eps)))
        })
        .collect();
    let ds: Vec<String> = d_list.iter().map(|d| d.to_string()).collect();
    let mut csv = String::new();
    writeln!(
        csv,
        "# defectchain regions version={} h={h} n={n} d_list={}",
        env!("CARGO_PKG_VERSION"),
        ds.join(",")
    )
    .unwrap();
    writeln!(csv, "epsilon,d,region_analytic,region_spectral,region_greens").unwrap();
    for row in rows {
        csv.push_str(&row?);
    }
    Ok(csv)
}

/// The ten independent reduced-density-matrix entries at every plan point:
/// rows `h, d, epsilon, eps_d, rho00..rho36, error`. Measure toggles are
/// ignored; failed points carry the message in the error column.
pub fn run_rdm_dump(plan: &SweepPlan) -> Result<String, SweepError> {
    plan.validate()?;
    let names: Vec<&'static str> = DefectRdm::<f64>::vacuum()
        .named_entries()
        .iter()
        .map(|&(name, _)| name)
        .collect();
    let rows: Vec<String> = plan
        .points()
        .par_iter()
        .map(|pt| {
            let prefix = format!(
                "{},{},{},{}",
                fmt_f(plan.h),
                pt.d,
                fmt_f(pt.epsilon),
                fmt_f(pt.eps_d)
            );
            let spec = ChainSpec::<f64>::new(plan.n, plan.h, pt.epsilon, pt.d);
            let rdm = ground_state_correlations(&spec)
                .map_err(SweepError::from)
                .and_then(|corr| Ok(rdm_from_correlations(&spec, &corr)?));
            match rdm {
                Ok(rdm) => {
                    let vals: Vec<String> = rdm
                        .named_entries()
                        .iter()
                        .map(|&(_, v)| fmt_f(v))
                        .collect();
                    format!("{prefix},{},\n", vals.join(","))
                }
                Err(err) => {
                    let empty = vec![""; names.len()];
                    format!(
                        "{prefix},{},{}\n",
                        empty.join(","),
                        csv_field(&err.to_string())
                    )
                }
            }
        })
        .collect();
    let mut csv = String::new();
    writeln!(
        csv,
        "# defectchain rdm-dump version={} {}",
        env!("CARGO_PKG_VERSION"),
        plan.summary()
    )
    .unwrap();
    writeln!(csv, "h,d,epsilon,eps_d,{},error", names.join(",")).unwrap();
    for row in rows {
        csv.push_str(&row);
    }
    Ok(csv)
}

/// 17-significant-digit rendering; decimal round-trips reproduce the bits.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Empty cell for an absent measure.
fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

/// RFC-4180-style quoting: fields with commas, quotes, or newlines are
/// wrapped in double quotes with inner quotes doubled.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_plan() -> SweepPlan {
        SweepPlan {
            d_list: vec![1],
            eps_d_min: 0.4,
            eps_d_max: 0.8,
            eps_d_step: 0.2,
            n: 64,
            seed: 7,
            bound_runs: 2,
            ..SweepPlan::default()
        }
    }

    #[test]
    fn default_grid_spans_the_figure_axes() {
        let plan = SweepPlan::default();
        let grid = plan.eps_d_grid();
        assert_eq!(grid.len(), 120);
        assert!((grid[0] - 0.05).abs() < 1e-15);
        assert!((grid[119] - 6.0).abs() < 1e-12);
        for w in grid.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn plan_round_trips_through_text() {
        let mut plan = tiny_plan();
        plan.toggles.witness = true;
        plan.out = "runs/demo.csv".to_string();
        let parsed = SweepPlan::parse(&plan.render()).unwrap();
        assert_eq!(parsed, plan);
    }

    #[test]
    fn plan_rejects_unknown_keys_and_bad_grids() {
        assert!(SweepPlan::parse("mystery = 3").is_err());
        assert!(SweepPlan::parse("eps_d_step = -0.1").is_err());
        assert!(SweepPlan::parse("eps_d_min = 0").is_err());
        assert!(SweepPlan::parse("d_list = 0").is_err());
        assert!(SweepPlan::parse("n = 63").is_err());
        assert!(SweepPlan::parse("measures = sorcery").is_err());
        assert!(SweepPlan::parse("h = 2 n = 4").is_err());
    }

    #[test]
    fn measure_strings_round_trip() {
        for text in ["none", "c12", "c12,c13,gme,ma,hong", "c12,c13,gme,ma,hong,witness"] {
            let toggles = parse_measures(text).unwrap();
            assert_eq!(measures_string(&toggles), text);
        }
        assert_eq!(parse_measures("all").unwrap(), MeasureToggles::all());
        assert_eq!(parse_measures("fast").unwrap(), MeasureToggles::fast());
        assert_eq!(parse_measures("").unwrap(), MeasureToggles::none());
    }

    #[test]
    fn empty_toggles_give_header_only_csv() {
        let plan = SweepPlan {
            toggles: MeasureToggles::none(),
            ..tiny_plan()
        };
        let out = run_sweep(&plan).unwrap();
        assert_eq!(out.points, 0);
        let lines: Vec<&str> = out.csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], SWEEP_HEADER);
    }

    #[test]
    fn csv_bytes_do_not_depend_on_thread_count() {
        let plan = tiny_plan();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_sweep(&plan).unwrap())
        };
        let solo = run(1);
        let quad = run(4);
        assert_eq!(solo.csv, quad.csv);
        assert_eq!(solo.meta, quad.meta);
        assert_eq!(solo.failures, 0);
        assert_eq!(solo.points, 3);
    }

    #[test]
    fn threshold_point_lands_in_the_error_column() {
        // The second level detaches exactly at eps_d = 1, pinning a zero
        // mode; that row must report the failure while neighbors succeed.
        let plan = SweepPlan {
            eps_d_min: 0.9,
            eps_d_max: 1.1,
            eps_d_step: 0.1,
            toggles: parse_measures("c12").unwrap(),
            ..tiny_plan()
        };
        let out = run_sweep(&plan).unwrap();
        assert_eq!(out.points, 3);
        assert_eq!(out.failures, 1);
        let rows: Vec<&str> = out.csv.lines().skip(2).collect();
        assert!(rows[0].ends_with(','));
        assert!(!rows[1].ends_with(','));
        assert!(rows[2].ends_with(','));
    }

    #[test]
    fn sweep_rows_carry_the_requested_measures() {
        let plan = SweepPlan {
            toggles: parse_measures("c12,gme").unwrap(),
            ..tiny_plan()
        };
        let out = run_sweep(&plan).unwrap();
        let row: Vec<&str> = out.csv.lines().nth(2).unwrap().split(',').collect();
        assert_eq!(row.len(), 12);
        assert!(!row[4].is_empty(), "c12 requested");
        assert!(row[5].is_empty(), "c13 not requested");
        assert!(!row[6].is_empty(), "rank-2 regime, analytic value present");
        assert!(row[7].is_empty() && row[8].is_empty() && row[9].is_empty());
        let c12: f64 = row[4].parse().unwrap();
        assert!(c12 > 0.0 && c12 <= 1.0);
    }

    #[test]
    fn spectrum_shifts_rigidly_with_the_field() {
        let eps = [0.5, 2.0];
        let low = run_spectrum(2.0, 1, 32, &eps).unwrap();
        let high = run_spectrum(3.0, 1, 32, &eps).unwrap();
        let omegas = |csv: &str| -> Vec<f64> {
            csv.lines()
                .skip(2)
                .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
                .collect()
        };
        let (lo, hi) = (omegas(&low), omegas(&high));
        assert_eq!(lo.len(), 2 * 32);
        for (a, b) in lo.iter().zip(&hi) {
            assert!((b - a - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn regions_methods_agree_off_the_boundaries() {
        let csv = run_regions(2.0, 512, &[0.5, 2.0, 5.0], &[1]).unwrap();
        let rows: Vec<&str> = csv.lines().skip(2).collect();
        assert_eq!(rows.len(), 3);
        for (row, expect) in rows.iter().zip([1usize, 2, 3]) {
            let cells: Vec<&str> = row.split(',').collect();
            assert_eq!(cells[1], "1");
            for &cell in &cells[2..5] {
                assert_eq!(cell.parse::<usize>().unwrap(), expect, "row `{row}`");
            }
        }
    }

    #[test]
    fn rdm_dump_rows_hold_ten_entries() {
        let csv = run_rdm_dump(&tiny_plan()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2 + 3);
        assert_eq!(
            lines[1],
            "h,d,epsilon,eps_d,rho00,rho11,rho22,rho33,rho55,rho77,rho12,rho14,rho35,rho36,error"
        );
        let cells: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(cells.len(), 15);
        // Unit trace: the six populations weighted by their orbit sizes.
        let pop = |i: usize| cells[4 + i].parse::<f64>().unwrap();
        let trace = pop(0) + 2.0 * pop(1) + pop(2) + 2.0 * pop(3) + pop(4) + pop(5);
        assert!((trace - 1.0).abs() < 1e-12, "trace {trace}");
        assert!(cells[14].is_empty());
    }

    #[test]
    fn csv_fields_with_commas_are_quoted() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn point_seeds_differ_between_points() {
        let plan = tiny_plan();
        let pts = plan.points();
        let seeds: Vec<u64> = pts.iter().map(|p| mix_seed(plan.seed, p.id as u64)).collect();
        assert_eq!(seeds.len(), 3);
        assert!(seeds[0] != seeds[1] && seeds[1] != seeds[2] && seeds[0] != seeds[2]);
    }
}
