//! Repeated searches with different seeds, as CSV records and summaries.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::{check, Mode, SearchConfig, SearchStats, Verdict};
use crate::model::generators::{gen_model, gen_property, Family, Params};
use crate::model::{product, Tba};
use crate::Result;

pub const CSV_HEADER: &str = "model,N,mode,seed,visited,subsumptions,iter_checks,result";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRecord {
    pub model: String,
    pub n: usize,
    pub mode: Mode,
    pub seed: u64,
    pub stats: SearchStats,
}

/// Runs both modes for every seed on the product of a family's model with
/// its property. Records come in seed order, `dfss` before `idfss`.
pub fn run_bench(family: Family, n: usize, params: &Params, seeds: &[u64]) -> Result<Vec<BenchRecord>> {
    let tba = product(&gen_model(family, n, params), &gen_property(family, n, params))?;
    Ok(run_bench_tba(family.name(), n, &tba, seeds))
}

pub fn run_bench_tba(model: &str, n: usize, tba: &Tba, seeds: &[u64]) -> Vec<BenchRecord> {
    seeds
        .par_iter()
        .flat_map_iter(|&seed| {
            [Mode::Dfss, Mode::Idfss].into_iter().map(move |mode| BenchRecord {
                model: model.to_string(),
                n,
                mode,
                seed,
                stats: check(tba, &SearchConfig::new(mode, seed)).stats,
            })
        })
        .collect()
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let s = &r.stats;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.model, r.n, r.mode, r.seed, s.visited_nodes, s.subsumption_skips, s.iterability_checks, s.result
        )
        .unwrap();
    }
    out
}

/// Mean, extremes and median of a counter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub min: u64,
    pub max: u64,
    pub median: f64,
}

impl Summary {
    pub fn of(values: &[u64]) -> Summary {
        assert!(!values.is_empty());
        let mut v = values.to_vec();
        v.sort_unstable();
        let k = v.len();
        let median = if k % 2 == 1 { v[k / 2] as f64 } else { (v[k / 2 - 1] + v[k / 2]) as f64 / 2.0 };
        Summary { mean: v.iter().sum::<u64>() as f64 / k as f64, min: v[0], max: v[k - 1], median }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub mode: Mode,
    pub runs: usize,
    pub cycles_found: usize,
    pub visited: Summary,
    pub iter_checks: Summary,
}

/// One summary per mode present in `records`, `dfss` first.
pub fn aggregate(records: &[BenchRecord]) -> Vec<Aggregate> {
    [Mode::Dfss, Mode::Idfss]
        .into_iter()
        .filter_map(|mode| {
            let rs: Vec<&SearchStats> = records.iter().filter(|r| r.mode == mode).map(|r| &r.stats).collect();
            if rs.is_empty() {
                return None;
            }
            let visited: Vec<u64> = rs.iter().map(|s| s.visited_nodes).collect();
            let checks: Vec<u64> = rs.iter().map(|s| s.iterability_checks).collect();
            Some(Aggregate {
                mode,
                runs: rs.len(),
                cycles_found: rs.iter().filter(|s| s.result == Verdict::CycleFound).count(),
                visited: Summary::of(&visited),
                iter_checks: Summary::of(&checks),
            })
        })
        .collect()
}
