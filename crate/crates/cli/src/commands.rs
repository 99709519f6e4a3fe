use bqs_core::asymptotics::{
    check_a_bounds, check_factorial_inequality, check_i1_bracket, diagonal_index, diagonal_prediction,
    direction_sweep, factor_c_squared, stirling_target_exact, trend, AsymptoticsRecord, StirlingBranch,
    SweepRow, Trend,
};
use bqs_core::bergman::{mc_moments, monomial_norm_sq};
use bqs_core::lattice::{enumerate_upto, truncation_size};
use bqs_core::operators::{intertwine_sweep, reducing_check, SweepRange};
use bqs_core::{MultiIndex, ResidueClass, ShiftExponent};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{real, Check, CsvRow, Report};
use crate::Failure;

const Z_LIMIT: f64 = 5.0;
const GEOMETRIC_TOL: f64 = 0.05;
const SUCCESSIVE_TOL: f64 = 0.02;
const STIRLING_MIN_DEGREE: u32 = 10;

fn core_err(e: bqs_core::Error) -> Failure {
    Failure::Config(e.to_string())
}

#[derive(Serialize)]
pub struct MomentRow {
    k: MultiIndex,
    closed_form: f64,
    estimate: f64,
    standard_error: f64,
    z_score: f64,
}

impl CsvRow for MomentRow {
    fn header() -> Vec<&'static str> {
        vec!["k", "closed_form", "estimate", "standard_error", "z_score"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            real(self.closed_form),
            real(self.estimate),
            real(self.standard_error),
            real(self.z_score),
        ]
    }
}

pub fn moments(cfg: RunConfig) -> Result<bool, Failure> {
    if cfg.samples < 1 {
        return Err(Failure::Config("samples must be >= 1".into()));
    }
    let p = cfg.params;
    let idx = enumerate_upto(p.dim(), cfg.max_degree);
    let pairs: Vec<_> = idx.iter().map(|k| (k.clone(), k.clone())).collect();
    let est = mc_moments(&pairs, &p, cfg.samples, cfg.seed).map_err(core_err)?;
    let mut rows = Vec::with_capacity(idx.len());
    for (k, e) in idx.into_iter().zip(est) {
        let closed_form = monomial_norm_sq(&k, &p).map_err(core_err)?.value();
        rows.push(MomentRow {
            z_score: e.z_score(closed_form),
            k,
            closed_form,
            estimate: e.value,
            standard_error: e.standard_error,
        });
    }
    let worst = rows.iter().map(|r| r.z_score.abs()).fold(0.0, f64::max);
    let checks = vec![Check::new(
        "moments",
        worst <= Z_LIMIT,
        format!("{} moments, max |z| = {worst:.3} (limit {Z_LIMIT})", rows.len()),
    )];
    finish(Report::new(cfg, Vec::new(), rows, checks))
}

#[derive(Serialize)]
pub struct ClassResidualRow {
    j: MultiIndex,
    count: usize,
    max_residual_x: f64,
    max_residual_y: f64,
}

impl CsvRow for ClassResidualRow {
    fn header() -> Vec<&'static str> {
        vec!["j", "count", "max_residual_x", "max_residual_y"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.j.to_string(),
            self.count.to_string(),
            real(self.max_residual_x),
            real(self.max_residual_y),
        ]
    }
}

fn trivial_notes(n: &ShiftExponent) -> Vec<String> {
    if n.is_trivial() {
        vec!["trivial case: n = (1,...,1), every intertwiner is the identity".to_string()]
    } else {
        Vec::new()
    }
}

pub fn intertwine(cfg: RunConfig) -> Result<bool, Failure> {
    let n = cfg.require_shift()?.clone();
    let report = intertwine_sweep(&n, &cfg.params, SweepRange::TargetDegree(cfg.max_degree)).map_err(core_err)?;
    let rows: Vec<ClassResidualRow> = report
        .classes
        .into_iter()
        .filter(|c| cfg.class.as_ref().is_none_or(|j| *j == c.j))
        .map(|c| ClassResidualRow {
            j: c.j.as_index().clone(),
            count: c.count,
            max_residual_x: c.max_residual_x,
            max_residual_y: c.max_residual_y,
        })
        .collect();
    let max_x = rows.iter().map(|r| r.max_residual_x).fold(0.0, f64::max);
    let max_y = rows.iter().map(|r| r.max_residual_y).fold(0.0, f64::max);
    let count: usize = rows.iter().map(|r| r.count).sum();
    let checks = vec![
        Check::new(
            "intertwine_x",
            max_x <= cfg.tol,
            format!("X_j M_z = M_j X_j over {count} indices, max residual {max_x:.3e}"),
        ),
        Check::new(
            "intertwine_y",
            max_y <= cfg.tol,
            format!("Y_j M_j = M_z Y_j over {count} indices, max residual {max_y:.3e}"),
        ),
    ];
    finish(Report::new(cfg, trivial_notes(&n), rows, checks))
}

#[derive(Serialize)]
pub struct ClassDimensionRow {
    j: MultiIndex,
    dimension: usize,
}

impl CsvRow for ClassDimensionRow {
    fn header() -> Vec<&'static str> {
        vec!["j", "dimension"]
    }

    fn fields(&self) -> Vec<String> {
        vec![self.j.to_string(), self.dimension.to_string()]
    }
}

pub fn decompose(cfg: RunConfig) -> Result<bool, Failure> {
    let n = cfg.require_shift()?.clone();
    let r = reducing_check(&n, cfg.max_degree, &cfg.params).map_err(core_err)?;
    let rows: Vec<ClassDimensionRow> = r
        .class_sizes
        .iter()
        .map(|c| ClassDimensionRow {
            j: c.j.as_index().clone(),
            dimension: c.dimension,
        })
        .collect();
    let total: usize = rows.iter().map(|r| r.dimension).sum();
    let expected = truncation_size(cfg.dim, cfg.max_degree);
    let checks = vec![
        Check::new(
            "class_count",
            r.class_count == n.class_count(),
            format!("{} classes, product of n = {}", r.class_count, n.class_count()),
        ),
        Check::new("partition", r.partition, format!("unique l = nk + j for all |l| <= {}", cfg.max_degree)),
        Check::new("class_closure", r.class_closure, "l + n stays in the class of l".into()),
        Check::new("block_diagonal", r.block_diagonal, "M_{z^n} block diagonal by class".into()),
        Check::new(
            "dimension_sum",
            total as u64 == expected,
            format!("sum of class dimensions {total}, binomial(N+D, N) = {expected}"),
        ),
    ];
    finish(Report::new(cfg, trivial_notes(&n), rows, checks))
}

#[derive(Default)]
struct Tally {
    checked: usize,
    failed: usize,
    worst: f64,
    example: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, value: f64, what: impl FnOnce() -> String) {
        self.checked += 1;
        self.worst = self.worst.max(value);
        if !ok {
            self.failed += 1;
            if self.example.is_none() {
                self.example = Some(what());
            }
        }
    }

    fn check(self, name: &str, summary: String) -> Check {
        let mut detail = format!("{} indices, {} failures, {summary}", self.checked, self.failed);
        if let Some(e) = self.example {
            detail.push_str(&format!(", first failure {e}"));
        }
        Check::new(name, self.failed == 0, detail)
    }
}

fn at(r: &AsymptoticsRecord) -> String {
    format!("k={} j={}", r.k, r.j)
}

struct ClassSweep {
    j: ResidueClass,
    diagonal: Vec<AsymptoticsRecord>,
    grid: Vec<AsymptoticsRecord>,
}

pub fn asymptotics(cfg: RunConfig) -> Result<bool, Failure> {
    if cfg.dim < 2 {
        return Err(Failure::Config("asymptotics requires N >= 2".into()));
    }
    if cfg.diagonal_max < 1 {
        return Err(Failure::Config("diagonal-max must be >= 1".into()));
    }
    let n = cfg.require_shift()?.clone();
    let p = cfg.params;
    let trivial = n.is_trivial();
    let grid_ks = enumerate_upto(cfg.dim, cfg.max_degree);
    let sweeps: Vec<ClassSweep> = cfg
        .classes()?
        .into_iter()
        .map(|j| {
            let dir = if trivial {
                MultiIndex::ones(cfg.dim)
            } else {
                diagonal_index(1, &n, &j)?
            };
            let diagonal = direction_sweep(&dir, &j, &n, &p, cfg.diagonal_max)?;
            let grid = grid_ks
                .par_iter()
                .map(|k| factor_c_squared(k, &j, &n, &p))
                .collect::<bqs_core::Result<Vec<_>>>()?;
            Ok(ClassSweep { j, diagonal, grid })
        })
        .collect::<bqs_core::Result<_>>()
        .map_err(core_err)?;

    let mut notes = trivial_notes(&n);
    let (m, n_m) = n.min_coordinate();
    notes.push(format!("m = {m} (0-based, first minimizing coordinate), n_m = {n_m}; j_m is the entry of j at m"));

    let mut identity = Tally::default();
    let mut bounds = Tally::default();
    let mut bracket = Tally::default();
    let mut inequality = Tally::default();
    for s in &sweeps {
        for r in s.diagonal.iter().chain(&s.grid) {
            let res = r.factorization_residual().max(r.i1_identity_residual());
            identity.record(res <= cfg.tol, res, || at(r));
            let a = check_a_bounds(r).map_err(core_err)?;
            bounds.record(a.pass, -a.lower_slack.min(a.upper_slack), || at(r));
            bracket.record(check_i1_bracket(r).pass, 0.0, || at(r));
            let ineq = check_factorial_inequality(&r.k, &s.j, &n).map_err(core_err)?;
            inequality.record(ineq.holds, 0.0, || format!("{}: {} > {}", at(r), ineq.lhs, ineq.rhs));
        }
    }
    let worst = identity.worst;
    let mut checks = vec![
        identity.check("identities", format!("max log residual {worst:.3e}")),
        bounds.check("a_bounds", "log slack >= -1e-12 required".into()),
        bracket.check("i1_bracket", "ratio bracket and I1 envelope".into()),
        inequality.check("factorial_inequality", "exact comparison with (n_m, j_m)".into()),
    ];
    if trivial {
        notes.push("diagonal limit and liminf checks skipped: no entry of n is >= 2".into());
    } else {
        checks.push(stirling_check(&sweeps, &n, cfg.diagonal_max, &mut notes)?);
        checks.push(liminf_check(&sweeps));
    }

    let rows: Vec<SweepRow> = sweeps
        .iter()
        .flat_map(|s| s.diagonal.iter().enumerate().map(|(i, r)| SweepRow::new(i as u32 + 1, r)))
        .collect();
    finish(Report::new(cfg, notes, rows, checks))
}

fn stirling_check(
    sweeps: &[ClassSweep],
    n: &ShiftExponent,
    d: u32,
    notes: &mut Vec<String>,
) -> Result<Check, Failure> {
    if d < STIRLING_MIN_DEGREE {
        notes.push(format!("diagonal limit not evaluated: diagonal-max {d} < {STIRLING_MIN_DEGREE}"));
        return Ok(Check::new("stirling", true, "not evaluated".into()));
    }
    let mut pass = true;
    let mut parts = Vec::new();
    for s in sweeps {
        let pred = |k1: u32| diagonal_prediction(u64::from(k1), n, &s.j, n.dim()).map_err(core_err);
        let target = |k1: u32| stirling_target_exact(k1, n, &s.j).map_err(core_err);
        let head = pred(d)?;
        match head.branch {
            StirlingBranch::Geometric => {
                let ratio = (target(d)?.to_log_value() / head.value).value();
                pass &= (ratio - 1.0).abs() <= GEOMETRIC_TOL;
                parts.push(format!("j={}: exact/prediction {ratio:.6} at k1={d}", s.j));
            }
            StirlingBranch::UnitMinimum => {
                let exact = (target(d)? / target(d - 1)?).to_f64();
                let limit = (head.value / pred(d - 1)?.value).value();
                pass &= (exact / limit - 1.0).abs() <= SUCCESSIVE_TOL;
                parts.push(format!(
                    "j={}: successive ratio {exact:.6} vs {limit:.6} at k1={d}, active coordinates {:?}",
                    s.j, head.active
                ));
            }
        }
    }
    Ok(Check::new("stirling", pass, parts.join("; ")))
}

fn liminf_check(sweeps: &[ClassSweep]) -> Check {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in sweeps {
        let log_c: Vec<f64> = s.diagonal.iter().map(AsymptoticsRecord::log_c).collect();
        let t = trend(&log_c);
        pass &= matches!(t, Trend::Decreasing { .. });
        let last = log_c.last().copied().unwrap_or(0.0).exp();
        parts.push(format!("j={}: {t:?}, c at d={} is {last:.3e}", s.j, log_c.len()));
    }
    Check::new("liminf", pass, parts.join("; "))
}

impl CsvRow for SweepRow {
    fn header() -> Vec<&'static str> {
        vec![
            "d", "k", "j", "log_c", "log_I1", "log_I2", "log_a", "ratio_term", "log_lb_a", "log_ub_a",
            "log_prefactor", "ratio_lower", "ratio_upper",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.d.to_string(),
            self.k.to_string(),
            self.j.to_string(),
            real(self.log_c),
            real(self.log_i1),
            real(self.log_i2),
            real(self.log_a),
            real(self.ratio_term),
            real(self.log_lb_a),
            real(self.log_ub_a),
            real(self.log_prefactor),
            real(self.ratio_lower),
            real(self.ratio_upper),
        ]
    }
}

fn finish<R: Serialize + CsvRow>(report: Report<R>) -> Result<bool, Failure> {
    report.emit()?;
    Ok(report.pass)
}
