//! Per-index certification of the factorization `c_kj² = P_j · I_1 · I_2`
//! and of the estimates that force `liminf c_kj = 0`.
//!
//! With `K = |k|`, `L = |nk + j|`:
//!
//! ```text
//! P_j = Γ(N+|j|+α+1) / (j! Γ(N+α+1))
//! I_1 = L! Γ(N+K+α+1) / (K! Γ(N+L+α+1)) = (K+1)/(N+L+α) / a_kj
//! I_2 = (nk+j)! K! / (L! k!)
//! a_kj = prod_{t=K+2}^{L} (1 + (N+α-1)/t)
//! ```
//!
//! `a_kj` is bracketed per index by `(1 + (N+α-1)/L)^e <= a_kj <= (1 + (N+α-1)/(K+2))^e`
//! with `e = L - K - 1`. When `L = K` (only possible with `j = 0` and
//! `n_i = 1` on the support of `k`) the product runs backwards and takes the
//! extended value `1 / (1 + (N+α-1)/(K+1))`, `e = -1`.

use std::io::Write;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::bergman::SpaceParams;
use crate::error::{Error, Result};
use crate::lattice::{compose, MultiIndex, ResidueClass, ShiftExponent};
use crate::operators::c_coeff;
use crate::special::{cmp_fractions, log_factorial, log_factorial_multi, ExactRational, FactorialTable, LogValue};

/// Log-domain tolerance for identities and one-sided bounds.
pub const LOG_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticsRecord {
    pub k: MultiIndex,
    pub j: ResidueClass,
    pub n: ShiftExponent,
    pub params: SpaceParams,
    pub log_c_sq: f64,
    pub log_prefactor: f64,
    pub log_i1: f64,
    pub log_i2: f64,
    pub log_a: f64,
    pub log_lb_a: f64,
    pub log_ub_a: f64,
    /// `(|k|+1) / (N + |nk+j| + α)`
    pub ratio_term: f64,
    /// `|nk+j| - |k| - 1`: the number of factors in `a_kj`, or -1.
    pub exponent: i64,
}

impl AsymptoticsRecord {
    pub fn log_c(&self) -> f64 {
        0.5 * self.log_c_sq
    }

    /// `|log c² - (log P_j + log I_1 + log I_2)|`
    pub fn factorization_residual(&self) -> f64 {
        (self.log_c_sq - (self.log_prefactor + self.log_i1 + self.log_i2)).abs()
    }

    /// `|log I_1 - log ratio_term + log a_kj|`
    pub fn i1_identity_residual(&self) -> f64 {
        (self.log_i1 - self.ratio_term.ln() + self.log_a).abs()
    }
}

/// Every quantity of the `c_kj²` factorization at one index.
pub fn factor_c_squared(
    k: &MultiIndex,
    j: &ResidueClass,
    n: &ShiftExponent,
    p: &SpaceParams,
) -> Result<AsymptoticsRecord> {
    let log_c_sq = c_coeff(k, j, n, p)?.squared().ln();
    let l = compose(k, j, n)?;
    let (kd, ld) = (k.degree(), l.degree());
    let dim = p.dim() as f64;
    let shifted = |d: u64| p.ln_gamma_shifted(d);

    let log_prefactor = shifted(j.as_index().degree()) - log_factorial_multi(j.as_index()) - shifted(0);
    let log_i1 = log_factorial(ld) + shifted(kd) - log_factorial(kd) - shifted(ld);
    let log_i2 = log_factorial_multi(&l) + log_factorial(kd) - log_factorial(ld) - log_factorial_multi(k);

    let step = dim + p.alpha() - 1.0;
    let exponent = ld as i64 - kd as i64 - 1;
    let log_a: f64 = if ld > kd {
        (kd + 2..=ld).map(|t| (step / t as f64).ln_1p()).sum()
    } else {
        -(step / (kd + 1) as f64).ln_1p()
    };
    let (log_lb_a, log_ub_a) = if exponent == 0 {
        (0.0, 0.0)
    } else {
        let e = exponent as f64;
        let lb = if ld == 0 {
            f64::NEG_INFINITY
        } else {
            e * (step / ld as f64).ln_1p()
        };
        (lb, e * (step / (kd + 2) as f64).ln_1p())
    };

    Ok(AsymptoticsRecord {
        k: k.clone(),
        j: j.clone(),
        n: n.clone(),
        params: *p,
        log_c_sq,
        log_prefactor,
        log_i1,
        log_i2,
        log_a,
        log_lb_a,
        log_ub_a,
        ratio_term: (kd as f64 + 1.0) / (dim + ld as f64 + p.alpha()),
        exponent,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub pass: bool,
    /// `log a - log lb`
    pub lower_slack: f64,
    /// `log ub - log a`
    pub upper_slack: f64,
}

/// Per-index upper and lower bounds on `a_kj`. Requires `N + α - 1 > 0`.
pub fn check_a_bounds(record: &AsymptoticsRecord) -> Result<BoundCheck> {
    let p = &record.params;
    let step = p.dim() as f64 + p.alpha() - 1.0;
    if step.is_nan() || step <= 0.0 {
        return Err(Error::Precondition(format!(
            "N + alpha - 1 must be positive (N = {}, alpha = {})",
            p.dim(),
            p.alpha()
        )));
    }
    let lower_slack = record.log_a - record.log_lb_a;
    let upper_slack = record.log_ub_a - record.log_a;
    Ok(BoundCheck {
        pass: lower_slack >= -LOG_SLACK && upper_slack >= -LOG_SLACK,
        lower_slack,
        upper_slack,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketCheck {
    pub pass: bool,
    /// `(|k|+1) / (N + |n||k| + |j| + α)`
    pub ratio_lower: f64,
    /// `(|k|+1) / (N + n_m |k| + α)`
    pub ratio_upper: f64,
    /// `log(ratio_term) - log ub_a`
    pub log_i1_lower: f64,
    /// `log(ratio_term) - log lb_a`
    pub log_i1_upper: f64,
}

/// The ratio bracket around `(|k|+1)/(N+|nk+j|+α)` and the induced
/// envelope for `I_1`.
pub fn check_i1_bracket(record: &AsymptoticsRecord) -> BracketCheck {
    let p = &record.params;
    let kd = record.k.degree() as f64;
    let (_, n_min) = record.n.min_coordinate();
    let ratio_lower = (kd + 1.0)
        / (p.dim() as f64 + record.n.as_index().degree() as f64 * kd + record.j.as_index().degree() as f64 + p.alpha());
    let ratio_upper = (kd + 1.0) / (p.dim() as f64 + f64::from(n_min) * kd + p.alpha());
    let log_ratio = record.ratio_term.ln();
    let log_i1_lower = log_ratio - record.log_ub_a;
    let log_i1_upper = log_ratio - record.log_lb_a;
    let pass = ratio_lower.ln() <= log_ratio + LOG_SLACK
        && log_ratio <= ratio_upper.ln() + LOG_SLACK
        && log_i1_lower <= record.log_i1 + LOG_SLACK
        && record.log_i1 <= log_i1_upper + LOG_SLACK;
    BracketCheck {
        pass,
        ratio_lower,
        ratio_upper,
        log_i1_lower,
        log_i1_upper,
    }
}

/// Exact `I_2 = (nk+j)! |k|! / (|nk+j|! k!)`.
pub fn exact_i2(k: &MultiIndex, j: &ResidueClass, n: &ShiftExponent) -> Result<ExactRational> {
    let l = compose(k, j, n)?;
    let table = FactorialTable::new(l.degree().max(k.degree()));
    let wide = |x: &MultiIndex| x.entries().iter().map(|&e| u64::from(e)).collect::<Vec<_>>();
    let num = table.multi(wide(&l)) * table.get(k.degree());
    let den = table.get(l.degree()) * table.multi(wide(k));
    Ok(ExactRational::new(num.into(), den.into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorialInequality {
    /// Coordinate of the smallest `n_i` (first on ties).
    pub m: usize,
    pub n_sub: u32,
    pub j_sub: u32,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

// (prod a_i!, (sum a)!, prod b_i!, (sum b)!) with a = nk + j, b_i = n_sub k_i + j_sub
fn inequality_parts(
    k: &[u32],
    j: &[u32],
    n: &[u32],
    n_sub: u32,
    j_sub: u32,
    table: &FactorialTable,
) -> (BigUint, BigUint, BigUint, BigUint) {
    let a: Vec<u64> = (0..k.len())
        .map(|i| u64::from(n[i]) * u64::from(k[i]) + u64::from(j[i]))
        .collect();
    let b: Vec<u64> = k.iter().map(|&ki| u64::from(n_sub) * u64::from(ki) + u64::from(j_sub)).collect();
    (
        table.multi(a.iter().copied()),
        table.get(a.iter().sum()).clone(),
        table.multi(b.iter().copied()),
        table.get(b.iter().sum()).clone(),
    )
}

fn inequality_table(k: &MultiIndex, j: &ResidueClass, n: &ShiftExponent, j_sub: u32) -> FactorialTable {
    let (_, n_min) = n.min_coordinate();
    let a: u64 = k
        .entries()
        .iter()
        .zip(n.entries())
        .zip(j.entries())
        .map(|((&ki, &ni), &ji)| u64::from(ni) * u64::from(ki) + u64::from(ji))
        .sum();
    let b: u64 = k.entries().iter().map(|&ki| u64::from(n_min) * u64::from(ki) + u64::from(j_sub)).sum();
    FactorialTable::new(a.max(b))
}

/// `prod (nk+j)_i! / |nk+j|! <= prod (n_m k_i + j_sub)! / (sum_i (n_m k_i + j_sub))!`
/// in exact arithmetic, for a caller-chosen substitute residue `j_sub`.
pub fn factorial_inequality_with_residue(
    k: &MultiIndex,
    j: &ResidueClass,
    n: &ShiftExponent,
    j_sub: u32,
) -> Result<FactorialInequality> {
    k.check_dim(n.dim())?;
    let j = ResidueClass::new(j.as_index().clone(), n)?;
    let (m, n_m) = n.min_coordinate();
    let table = inequality_table(k, &j, n, j_sub);
    let (ln, ld, rn, rd) = inequality_parts(k.entries(), j.entries(), n.entries(), n_m, j_sub, &table);
    let holds = cmp_fractions(&ln, &ld, &rn, &rd) != std::cmp::Ordering::Greater;
    Ok(FactorialInequality {
        m,
        n_sub: n_m,
        j_sub,
        lhs: ExactRational::new(ln.into(), ld.into()).to_string(),
        rhs: ExactRational::new(rn.into(), rd.into()).to_string(),
        holds,
    })
}

/// The factorial comparison used to bound `I_2`, with `n_m` and `j_m` taken
/// at the coordinate of the smallest entry of `n`.
///
/// This is not true for every residue: if some `j_i < j_m` the left side
/// can exceed the right (`n = (2,2)`, `j = (1,0)`, `k = 0` gives `1 > 1/2`).
pub fn check_factorial_inequality(k: &MultiIndex, j: &ResidueClass, n: &ShiftExponent) -> Result<FactorialInequality> {
    let (m, _) = n.min_coordinate();
    let j_m = j.entries().get(m).copied().ok_or(Error::DimensionMismatch {
        expected: n.dim(),
        found: j.dim(),
    })?;
    factorial_inequality_with_residue(k, j, n, j_m)
}

/// Which residue replaces `j` on the right-hand side of the comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ResidueChoice {
    /// `j_m`, the residue at the smallest entry of `n`.
    ArgminCoordinate,
    /// `min_i j_i`.
    Smallest,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityScan {
    pub checked: u64,
    pub violations: u64,
    /// Up to 10 failing `(n, j, k)` triples.
    pub examples: Vec<(MultiIndex, MultiIndex, MultiIndex)>,
}

fn boxes(dim: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v| {
                (lo..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Exhaustive exact scan over `1 <= n_i <= max_n`, `0 <= j < n`,
/// `0 <= k_i <= max_k`.
pub fn scan_factorial_inequality(dim: usize, max_k: u32, max_n: u32, choice: ResidueChoice) -> InequalityScan {
    let table = FactorialTable::new(u64::from(max_n * max_k + max_n) * dim as u64);
    let ks = boxes(dim, 0, max_k);
    let per_n: Vec<InequalityScan> = boxes(dim, 1, max_n)
        .par_iter()
        .map(|nv| {
            let n = ShiftExponent::new(MultiIndex::new(nv.clone()).expect("nonempty")).expect("entries >= 1");
            let (m, n_m) = n.min_coordinate();
            let mut scan = InequalityScan {
                checked: 0,
                violations: 0,
                examples: Vec::new(),
            };
            for j in n.classes() {
                let j_sub = match choice {
                    ResidueChoice::ArgminCoordinate => j.entries()[m],
                    ResidueChoice::Smallest => *j.entries().iter().min().expect("nonempty"),
                };
                for k in &ks {
                    let (ln, ld, rn, rd) = inequality_parts(k, j.entries(), nv, n_m, j_sub, &table);
                    scan.checked += 1;
                    if cmp_fractions(&ln, &ld, &rn, &rd) == std::cmp::Ordering::Greater {
                        scan.violations += 1;
                        if scan.examples.len() < 10 {
                            scan.examples.push((
                                n.as_index().clone(),
                                j.as_index().clone(),
                                MultiIndex::new(k.clone()).expect("nonempty"),
                            ));
                        }
                    }
                }
            }
            scan
        })
        .collect();
    let mut total = InequalityScan {
        checked: 0,
        violations: 0,
        examples: Vec::new(),
    };
    for s in per_n {
        total.checked += s.checked;
        total.violations += s.violations;
        for e in s.examples {
            if total.examples.len() < 10 {
                total.examples.push(e);
            }
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StirlingBranch {
    /// `min n_i > 1`
    Geometric,
    /// `min n_i = 1`
    UnitMinimum,
}

/// The closed-form diagonal limit of the bound on `I_2`, with the choices
/// it was evaluated under.
#[derive(Clone, Debug, Serialize)]
pub struct DiagonalPrediction {
    pub value: LogValue,
    pub branch: StirlingBranch,
    /// Coordinate of `n_m` (first on ties).
    pub m: usize,
    /// Coordinate of `n_s`, the smallest non-unit entry (unit branch only).
    pub s: Option<usize>,
    /// Coordinates that stay on the diagonal; other unit coordinates are
    /// pinned to `k_i = 0`.
    pub active: Vec<usize>,
}

impl DiagonalPrediction {
    pub fn effective_dim(&self) -> usize {
        self.active.len()
    }
}

fn unit_branch_layout(n: &ShiftExponent) -> Result<(usize, usize, Vec<usize>)> {
    let units: Vec<usize> = (0..n.dim()).filter(|&i| n.entries()[i] == 1).collect();
    let rest: Vec<usize> = (0..n.dim()).filter(|&i| n.entries()[i] > 1).collect();
    let m = units[0];
    let s = *rest
        .iter()
        .min_by_key(|&&i| (n.entries()[i], i))
        .ok_or_else(|| Error::InvalidBranch(format!("n = {n} has no entry >= 2 (trivial case)")))?;
    let mut active: Vec<usize> = rest.clone();
    active.push(m);
    active.sort_unstable();
    Ok((m, s, active))
}

/// Closed-form diagonal prediction, with branch details.
pub fn diagonal_prediction(k1: u64, n: &ShiftExponent, j: &ResidueClass, dim: usize) -> Result<DiagonalPrediction> {
    n.as_index().check_dim(dim)?;
    let j = ResidueClass::new(j.as_index().clone(), n)?;
    if k1 < 1 {
        return Err(Error::Precondition("k1 must be >= 1".into()));
    }
    let (m, n_m) = n.min_coordinate();
    let k1f = k1 as f64;
    if n_m > 1 {
        let nf = dim as f64;
        let nm = f64::from(n_m);
        let j_m = f64::from(j.entries()[m]);
        let log = 0.5 * (nf - 1.0) * nm.ln() + ((1.0 - nm) * k1f - j_m) * nf * nf.ln();
        return Ok(DiagonalPrediction {
            value: LogValue::from_ln(log),
            branch: StirlingBranch::Geometric,
            m,
            s: None,
            active: (0..dim).collect(),
        });
    }
    if dim < 2 {
        return Err(Error::InvalidBranch("n_m = 1 needs N >= 2".into()));
    }
    let (m, s, active) = unit_branch_layout(n)?;
    let nf = active.len() as f64;
    let ns = f64::from(n.entries()[s]);
    let j_s = f64::from(j.entries()[s]);
    let j_m = f64::from(j.entries()[m]);
    let inner = nf - 1.0 + 1.0 / ns;
    let outer = 1.0 + (nf - 1.0) * ns;
    let log = (nf - 1.0) * k1f * (nf.ln() - ns * inner.ln())
        + k1f * (nf.ln() - outer.ln())
        + 0.5 * (nf.ln() + (nf - 1.0) * ns.ln() - ((nf - 1.0) * ns + 1.0).ln())
        - j_s * inner.ln()
        - j_m * outer.ln();
    Ok(DiagonalPrediction {
        value: LogValue::from_ln(log),
        branch: StirlingBranch::UnitMinimum,
        m,
        s: Some(s),
        active,
    })
}

/// Closed-form diagonal prediction of `I_2` at `k = (k1, ..., k1)`.
pub fn diagonal_i2_prediction(k1: u64, n: &ShiftExponent, j: &ResidueClass, dim: usize) -> Result<LogValue> {
    Ok(diagonal_prediction(k1, n, j, dim)?.value)
}

/// The diagonal index the prediction refers to: `k1` on active coordinates,
/// zero on the unit coordinates that were pinned.
pub fn diagonal_index(k1: u32, n: &ShiftExponent, j: &ResidueClass) -> Result<MultiIndex> {
    let pred = diagonal_prediction(u64::from(k1.max(1)), n, j, n.dim())?;
    let mut v = vec![0; n.dim()];
    for &i in &pred.active {
        v[i] = k1;
    }
    MultiIndex::new(v)
}

/// The exact finite-`k1` quantity whose Stirling limit is the prediction:
/// the substituted factorial bound times `(N' k1)! / (k1!)^N'`.
pub fn stirling_target_exact(k1: u32, n: &ShiftExponent, j: &ResidueClass) -> Result<ExactRational> {
    let pred = diagonal_prediction(u64::from(k1.max(1)), n, j, n.dim())?;
    let (m, n_m) = n.min_coordinate();
    let k = u64::from(k1);
    let b: Vec<u64> = pred
        .active
        .iter()
        .map(|&i| match (pred.branch, pred.s) {
            (StirlingBranch::Geometric, _) => u64::from(n_m) * k + u64::from(j.entries()[m]),
            (StirlingBranch::UnitMinimum, Some(s)) if i != pred.m => {
                u64::from(n.entries()[s]) * k + u64::from(j.entries()[s])
            }
            _ => k + u64::from(j.entries()[pred.m]),
        })
        .collect();
    let na = pred.active.len() as u64;
    let bsum: u64 = b.iter().sum();
    let table = FactorialTable::new(bsum.max(na * k));
    let num = table.multi(b.iter().copied()) * table.get(na * k);
    let den = table.get(bsum) * table.multi(std::iter::repeat_n(k, na as usize));
    Ok(ExactRational::new(num.into(), den.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Trend {
    /// Fewer than two points.
    Undefined,
    /// `c` strictly decreasing from `d = onset` to the end of the sweep.
    Decreasing { onset: u32 },
    /// The last step did not decrease.
    NotDecreasing,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiminfReport {
    /// Records for `d = 1..=d_max`.
    pub records: Vec<AsymptoticsRecord>,
    pub trend: Trend,
    pub threshold: f64,
    pub first_below_threshold: Option<u32>,
    pub min_c: LogValue,
    /// `max b_kj = 1 / min c_kj`.
    pub max_b: LogValue,
}

/// Records along `k = d · direction`, `d = 1..=d_max`.
pub fn direction_sweep(
    direction: &MultiIndex,
    j: &ResidueClass,
    n: &ShiftExponent,
    p: &SpaceParams,
    d_max: u32,
) -> Result<Vec<AsymptoticsRecord>> {
    direction.check_dim(p.dim())?;
    (1..=d_max)
        .into_par_iter()
        .map(|d| {
            let k = MultiIndex::new(direction.entries().iter().map(|&x| x * d).collect())?;
            factor_c_squared(&k, j, n, p)
        })
        .collect()
}

/// Trend of a `log c` sequence whose first entry is `d = 1`.
pub fn trend(log_c: &[f64]) -> Trend {
    if log_c.len() < 2 {
        return Trend::Undefined;
    }
    let mut onset = log_c.len();
    for i in (1..log_c.len()).rev() {
        if log_c[i] < log_c[i - 1] {
            onset = i;
        } else {
            break;
        }
    }
    if onset == log_c.len() {
        Trend::NotDecreasing
    } else {
        // log_c[0] is d = 1
        Trend::Decreasing { onset: onset as u32 }
    }
}

/// Sweep `c_kj` along the diagonal `k = (d, ..., d)`.
pub fn liminf_sweep(
    j: &ResidueClass,
    n: &ShiftExponent,
    p: &SpaceParams,
    d_max: u32,
    threshold: f64,
) -> Result<LiminfReport> {
    if d_max < 1 {
        return Err(Error::Precondition("d_max must be >= 1".into()));
    }
    let records = direction_sweep(&MultiIndex::ones(p.dim()), j, n, p, d_max)?;
    let log_c: Vec<f64> = records.iter().map(AsymptoticsRecord::log_c).collect();
    let min_log_c = log_c.iter().copied().fold(f64::INFINITY, f64::min);
    let first_below_threshold = log_c
        .iter()
        .position(|&c| c < threshold.ln())
        .map(|i| i as u32 + 1);
    Ok(LiminfReport {
        trend: trend(&log_c),
        threshold,
        first_below_threshold,
        min_c: LogValue::from_ln(min_log_c),
        max_b: LogValue::from_ln(-min_log_c),
        records,
    })
}

/// One row of a sweep: the record at step `d` with its bracket.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub d: u32,
    pub k: MultiIndex,
    pub j: MultiIndex,
    pub log_c: f64,
    pub log_i1: f64,
    pub log_i2: f64,
    pub log_a: f64,
    pub ratio_term: f64,
    pub log_lb_a: f64,
    pub log_ub_a: f64,
    pub log_prefactor: f64,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
}

impl SweepRow {
    pub fn new(d: u32, r: &AsymptoticsRecord) -> Self {
        let b = check_i1_bracket(r);
        SweepRow {
            d,
            k: r.k.clone(),
            j: r.j.as_index().clone(),
            log_c: r.log_c(),
            log_i1: r.log_i1,
            log_i2: r.log_i2,
            log_a: r.log_a,
            ratio_term: r.ratio_term,
            log_lb_a: r.log_lb_a,
            log_ub_a: r.log_ub_a,
            log_prefactor: r.log_prefactor,
            ratio_lower: b.ratio_lower,
            ratio_upper: b.ratio_upper,
        }
    }
}

/// CSV with a header row; reals with 17 significant digits.
pub fn write_sweep_csv<'a, W: Write>(
    rows: impl IntoIterator<Item = (u32, &'a AsymptoticsRecord)>,
    w: W,
) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "d", "k", "j", "log_c", "log_I1", "log_I2", "log_a", "ratio_term", "log_lb_a", "log_ub_a",
        "log_prefactor", "ratio_lower", "ratio_upper",
    ])?;
    for (d, r) in rows {
        let row = SweepRow::new(d, r);
        let f = |x: f64| format!("{x:.16e}");
        out.write_record([
            d.to_string(),
            row.k.to_string(),
            row.j.to_string(),
            f(row.log_c),
            f(row.log_i1),
            f(row.log_i2),
            f(row.log_a),
            f(row.ratio_term),
            f(row.log_lb_a),
            f(row.log_ub_a),
            f(row.log_prefactor),
            f(row.ratio_lower),
            f(row.ratio_upper),
        ])?;
    }
    out.flush()?;
    Ok(())
}
