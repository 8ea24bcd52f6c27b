//! Seeded Monte Carlo experiments and their CSV output.
//!
//! Every run gets its own seed derived from `(base_seed, n, alpha, run)`
//! with [`derive_seed`], so a record can be reproduced on its own. Runs
//! execute in parallel; records always come back in `(n, alpha, run)` order.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algos::{
    bip, greedy_filling, grid_all_nodes, grid_coop_rows, max_feasible_spacing, mst_broadcast,
    GridCoopParams,
};
use crate::analysis::theorem3_ceiling;
use crate::broadcast::{
    self, check_cooperative, check_noncooperative, DeliveryMode, DELIVERY_TOLERANCE,
};
use crate::convert::convert;
use crate::error::{Error, Result};
use crate::net::{sample_placement, GridNetwork, PlacementKind, PlacementSpec, SourceRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Gain,
    ConversionRatio,
    #[serde(alias = "grid")]
    GridGain,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Gain => "gain",
            ExperimentKind::ConversionRatio => "conversion-ratio",
            ExperimentKind::GridGain => "grid-gain",
        }
    }

    pub fn default_runs(self) -> usize {
        match self {
            ExperimentKind::Gain => 50,
            ExperimentKind::ConversionRatio => 1000,
            ExperimentKind::GridGain => 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Placement family; its node count is replaced by each entry of
    /// `n_values` and its seed by the derived per-run seed.
    pub placement: PlacementSpec,
    pub n_values: Vec<usize>,
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub runs_per_point: Option<usize>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Grid experiments always draw the source at random.
    #[serde(default)]
    pub source_rule: SourceRule,
}

impl ExperimentConfig {
    pub fn runs(&self) -> usize {
        self.runs_per_point
            .unwrap_or_else(|| self.experiment.default_runs())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.runs() == 0 {
            return bad("runs_per_point must be >= 1".into());
        }
        if self.n_values.is_empty() || self.alphas.is_empty() {
            return bad("n_values and alphas must not be empty".into());
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!(
                "n_values must be strictly increasing, got {:?}",
                self.n_values
            ));
        }
        if let Some(&a) = self.alphas.iter().find(|a| !(a.is_finite() && **a >= 1.0)) {
            return bad(format!("alpha must be finite and >= 1, got {a}"));
        }
        for &n in &self.n_values {
            self.placement
                .kind
                .with_nodes(n)
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        match self.experiment {
            ExperimentKind::Gain => {}
            ExperimentKind::ConversionRatio => {
                if self.alphas.iter().any(|&a| a != 2.0) {
                    return bad("the conversion-ratio experiment runs at alpha = 2 only".into());
                }
            }
            ExperimentKind::GridGain => {
                if !matches!(self.placement.kind, PlacementKind::Grid { .. }) {
                    return bad("the grid experiment needs a grid placement".into());
                }
                if self.alphas.iter().any(|&a| a != 2.0) {
                    return bad("the grid experiment runs at alpha = 2 only".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRecord {
    pub experiment: String,
    pub n: usize,
    pub alpha: f64,
    pub placement: String,
    pub seed: u64,
    pub p_noncoop: f64,
    pub p_coop: f64,
    pub gain: f64,
    pub extra: BTreeMap<String, Value>,
}

/// Execution knobs that do not change the records.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Also check each experiment's own property: the ratio ceiling for
    /// conversion-ratio runs and the maximality of the row spacing for grid
    /// runs. Failures abort like checker failures.
    pub verify: bool,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one run: `s(s(s(s(base) ^ n) ^ bits(alpha)) ^ run)` with `s` the
/// SplitMix64 finalizer and `bits` the IEEE-754 bit pattern.
pub fn derive_seed(base_seed: u64, n: usize, alpha: f64, run: usize) -> u64 {
    let h = splitmix64(base_seed);
    let h = splitmix64(h ^ n as u64);
    let h = splitmix64(h ^ alpha.to_bits());
    splitmix64(h ^ run as u64)
}

struct Task {
    n: usize,
    alpha: f64,
    seed: u64,
}

fn tasks(cfg: &ExperimentConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for &n in &cfg.n_values {
        for &alpha in &cfg.alphas {
            for run in 0..cfg.runs() {
                out.push(Task {
                    n,
                    alpha,
                    seed: derive_seed(cfg.base_seed, n, alpha, run),
                });
            }
        }
    }
    out
}

fn execute<F>(cfg: &ExperimentConfig, opts: RunOptions, one: F) -> Result<Vec<GainRecord>>
where
    F: Fn(&Task, &PlacementSpec) -> Result<GainRecord> + Sync,
{
    cfg.validate()?;
    let tasks = tasks(cfg);
    let work = || -> Vec<Result<GainRecord>> {
        tasks
            .par_iter()
            .map(|t| {
                let spec = PlacementSpec {
                    kind: cfg.placement.kind.with_nodes(t.n)?,
                    seed: t.seed,
                };
                one(t, &spec).map_err(|e| Error::Run {
                    seed: t.seed,
                    source: Box::new(e),
                })
            })
            .collect()
    };
    let results = match opts.jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work),
        None => work(),
    };
    results.into_iter().collect()
}

fn record(
    kind: ExperimentKind,
    t: &Task,
    spec: &PlacementSpec,
    p_noncoop: f64,
    p_coop: f64,
) -> Result<GainRecord> {
    Ok(GainRecord {
        experiment: kind.name().to_string(),
        n: t.n,
        alpha: t.alpha,
        placement: spec.kind.name().to_string(),
        seed: t.seed,
        p_noncoop,
        p_coop,
        gain: broadcast::gain(p_noncoop, p_coop)?,
        extra: BTreeMap::new(),
    })
}

/// Greedy filling against the better of BIP and MST.
pub fn run_gain_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Vec<GainRecord>> {
    execute(cfg, opts, |t, spec| {
        let net = sample_placement(spec, t.alpha, cfg.source_rule)?;
        let coop = greedy_filling(&net);
        check_cooperative(&net, &coop)?.into_result()?;
        let (b, m) = (bip(&net), mst_broadcast(&net));
        check_noncooperative(&net, &b)?.into_result()?;
        check_noncooperative(&net, &m)?.into_result()?;
        let (pb, pm) = (b.total_power(), m.total_power());
        let mut rec = record(
            ExperimentKind::Gain,
            t,
            spec,
            pb.min(pm),
            coop.total_power(),
        )?;
        rec.extra.insert("bip".into(), pb.into());
        rec.extra.insert("mst".into(), pm.into());
        Ok(rec)
    })
}

/// Converted greedy-filling total over the greedy-filling total. The record's
/// `gain` column is that ratio.
pub fn run_conversion_ratio_experiment(
    cfg: &ExperimentConfig,
    opts: RunOptions,
) -> Result<Vec<GainRecord>> {
    execute(cfg, opts, |t, spec| {
        let net = sample_placement(spec, t.alpha, cfg.source_rule)?;
        let coop = greedy_filling(&net);
        let (converted, _) = convert(&net, &coop)?;
        check_noncooperative(&net, &converted)?.into_result()?;
        let mut rec = record(
            ExperimentKind::ConversionRatio,
            t,
            spec,
            converted.total_power(),
            coop.total_power(),
        )?;
        let ceiling = theorem3_ceiling(t.n)?;
        if opts.verify && rec.gain > ceiling {
            return Err(Error::Invariant(format!(
                "conversion ratio {} exceeds 127 ln n = {ceiling}",
                rec.gain
            )));
        }
        rec.extra.insert("ratio".into(), rec.gain.into());
        rec.extra.insert("ceiling".into(), ceiling.into());
        Ok(rec)
    })
}

/// Row construction at its largest delivering spacing (border rows on)
/// against every node transmitting, from a random source.
pub fn run_grid_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Vec<GainRecord>> {
    execute(cfg, opts, |t, spec| {
        let net = sample_placement(spec, t.alpha, SourceRule::RandomUniform)?;
        let grid = GridNetwork::from_network(&net)?;
        let all = grid_all_nodes(&grid);
        check_noncooperative(&net, &all)?.into_result()?;
        let l = max_feasible_spacing(&grid, true)?;
        let coop = grid_coop_rows(&grid, GridCoopParams::new(l, true))?;
        check_cooperative(&net, &coop)?.into_result()?;
        if opts.verify && l + 1 < grid.side() {
            let next = grid_coop_rows(&grid, GridCoopParams::new(l + 1, true))?;
            if broadcast::delivers_with_tolerance(
                &net,
                &next,
                DeliveryMode::Cooperative,
                DELIVERY_TOLERANCE,
            )? {
                return Err(Error::Invariant(format!(
                    "spacing {} also delivers; {l} is not maximal",
                    l + 1
                )));
            }
        }
        let mut rec = record(
            ExperimentKind::GridGain,
            t,
            spec,
            all.total_power(),
            coop.total_power(),
        )?;
        rec.extra.insert("L".into(), l.into());
        rec.extra.insert("source".into(), net.source().0.into());
        Ok(rec)
    })
}

pub fn run_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Vec<GainRecord>> {
    match cfg.experiment {
        ExperimentKind::Gain => run_gain_experiment(cfg, opts),
        ExperimentKind::ConversionRatio => run_conversion_ratio_experiment(cfg, opts),
        ExperimentKind::GridGain => run_grid_experiment(cfg, opts),
    }
}

/// Formats like C's `%.12g`.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (11 - exp) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

pub const CSV_HEADER: [&str; 9] = [
    "experiment",
    "n",
    "alpha",
    "placement",
    "seed",
    "p_noncoop",
    "p_coop",
    "gain",
    "extra_json",
];

pub fn write_csv<W: Write>(records: &[GainRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.experiment.clone(),
            r.n.to_string(),
            format_g12(r.alpha),
            r.placement.clone(),
            r.seed.to_string(),
            format_g12(r.p_noncoop),
            format_g12(r.p_coop),
            format_g12(r.gain),
            serde_json::to_string(&r.extra)?,
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ys` on `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two paired points".into(),
        ));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Mean gain per `n`, in increasing `n`.
pub fn mean_gain_by_n(records: &[GainRecord]) -> Vec<(usize, f64)> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in records {
        let e = acc.entry(r.n).or_default();
        e.0 += r.gain;
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(n, (s, c))| (n, s / c as f64))
        .collect()
}
