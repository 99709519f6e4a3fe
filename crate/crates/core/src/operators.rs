//! Weighted shifts and diagonal intertwiners on the orthonormal basis `e_k`.
//!
//! Every operator here sends a basis vector to a positive multiple of one
//! basis vector, so it is stored as an index map plus a log-coefficient
//! rule ([`LatticeOperator`]) and only materialized as a matrix on demand.
//!
//! `M_z` denotes multiplication by `z_1 z_2 ... z_N`, i.e. the shift by
//! `(1, ..., 1)`: the weight `(k+1)! Γ(N+|k|+α+1) / (k! Γ(N+|k+1|+α+1))`
//! only makes sense with `|k+1| = |k| + N`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::bergman::SpaceParams;
use crate::error::{Error, Result};
use crate::lattice::{compose, enumerate_class, enumerate_upto, residue_decompose, truncation_size};
use crate::lattice::{MultiIndex, ResidueClass, ShiftExponent};
use crate::special::{factorial_big, log_factorial_multi, ExactRational, FactorialTable, LogValue};

fn check_class(j: &ResidueClass, n: &ShiftExponent, p: &SpaceParams) -> Result<()> {
    n.as_index().check_dim(p.dim())?;
    ResidueClass::new(j.as_index().clone(), n)?;
    Ok(())
}

/// Coefficient of `e_{k+m}` in `M_{z^m} e_k`:
/// `sqrt((k+m)!/k! · Γ(N+|k|+α+1) / Γ(N+|k+m|+α+1))`.
pub fn shift_weight(k: &MultiIndex, m: &MultiIndex, p: &SpaceParams) -> Result<LogValue> {
    k.check_dim(p.dim())?;
    let km = k.checked_add(m)?;
    let log_sq = log_factorial_multi(&km) - log_factorial_multi(k) + p.ln_gamma_shifted(k.degree())
        - p.ln_gamma_shifted(km.degree());
    Ok(LogValue::from_ln(0.5 * log_sq))
}

/// `c_kj`, the weight of `X_j e_k = c_kj e_{nk+j}`.
pub fn c_coeff(k: &MultiIndex, j: &ResidueClass, n: &ShiftExponent, p: &SpaceParams) -> Result<LogValue> {
    check_class(j, n, p)?;
    k.check_dim(p.dim())?;
    let l = compose(k, j, n)?;
    let log_sq = log_factorial_multi(&l) + p.ln_gamma_shifted(k.degree())
        + p.ln_gamma_shifted(j.as_index().degree())
        - log_factorial_multi(k)
        - log_factorial_multi(j.as_index())
        - p.ln_gamma_shifted(l.degree())
        - p.ln_gamma_shifted(0);
    Ok(LogValue::from_ln(0.5 * log_sq))
}

/// `b_kj = 1 / c_kj`, the weight of `Y_j e_{nk+j} = b_kj e_k`.
pub fn b_coeff(k: &MultiIndex, j: &ResidueClass, n: &ShiftExponent, p: &SpaceParams) -> Result<LogValue> {
    Ok(c_coeff(k, j, n, p)?.recip())
}

/// Exact `c_kj²` when `α` is a nonnegative integer, where every Gamma value
/// is a factorial: `Γ(N+d+α+1) = (N+d+α)!`.
pub fn c_squared_exact(
    k: &MultiIndex,
    j: &ResidueClass,
    n: &ShiftExponent,
    dim: usize,
    alpha: u32,
) -> Result<ExactRational> {
    n.as_index().check_dim(dim)?;
    k.check_dim(dim)?;
    let l = compose(k, j, n)?;
    let shift = dim as u64 + u64::from(alpha);
    let max = l.degree().max(k.degree()).max(j.as_index().degree()) + shift;
    let table = FactorialTable::new(max);
    let widen = |x: &MultiIndex| x.entries().iter().map(|&e| u64::from(e)).collect::<Vec<_>>();
    let num = table.multi(widen(&l))
        * table.get(shift + k.degree())
        * table.get(shift + j.as_index().degree());
    let den = table.multi(widen(k))
        * table.multi(widen(j.as_index()))
        * table.get(shift + l.degree())
        * table.get(shift);
    Ok(ExactRational::new(num.into(), den.into()))
}

/// Exact `||z^k||²` for integer `α`.
pub fn monomial_norm_sq_exact(k: &MultiIndex, dim: usize, alpha: u32) -> Result<ExactRational> {
    k.check_dim(dim)?;
    let shift = dim as u64 + u64::from(alpha);
    let num = k
        .entries()
        .iter()
        .fold(factorial_big(shift), |acc, &x| acc * factorial_big(u64::from(x)));
    Ok(ExactRational::new(num.into(), factorial_big(shift + k.degree()).into()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorKind {
    /// `M_{z^m}` on the whole space.
    Multiplication { m: MultiIndex },
    /// `M_j`: `M_{z^n}` restricted to `A_j`.
    Restricted { n: ShiftExponent, j: ResidueClass },
    /// `X_j: e_k -> c_kj e_{nk+j}`, whole space onto `A_j`.
    Embed { n: ShiftExponent, j: ResidueClass },
    /// `Y_j: e_{nk+j} -> b_kj e_k`, `A_j` into the whole space.
    Extract { n: ShiftExponent, j: ResidueClass },
}

/// A basis-to-basis operator with positive weights computed on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeOperator {
    kind: OperatorKind,
    params: SpaceParams,
    label: String,
}

impl LatticeOperator {
    pub fn multiplication(m: MultiIndex, p: &SpaceParams) -> Result<Self> {
        m.check_dim(p.dim())?;
        let label = if m == MultiIndex::ones(p.dim()) {
            "M_z".to_string()
        } else {
            format!("M_z^{m}")
        };
        Ok(LatticeOperator {
            kind: OperatorKind::Multiplication { m },
            params: *p,
            label,
        })
    }

    /// `M_z`, the shift by `(1, ..., 1)`.
    pub fn mz(p: &SpaceParams) -> Self {
        Self::multiplication(MultiIndex::ones(p.dim()), p).expect("dimension matches")
    }

    /// `M_{z^n}` on the whole space.
    pub fn power(n: &ShiftExponent, p: &SpaceParams) -> Result<Self> {
        Self::multiplication(n.as_index().clone(), p)
    }

    pub fn restricted(n: &ShiftExponent, j: &ResidueClass, p: &SpaceParams) -> Result<Self> {
        check_class(j, n, p)?;
        Ok(LatticeOperator {
            label: format!("M_{j}"),
            kind: OperatorKind::Restricted {
                n: n.clone(),
                j: j.clone(),
            },
            params: *p,
        })
    }

    pub fn embed(n: &ShiftExponent, j: &ResidueClass, p: &SpaceParams) -> Result<Self> {
        check_class(j, n, p)?;
        Ok(LatticeOperator {
            label: format!("X_{j}"),
            kind: OperatorKind::Embed {
                n: n.clone(),
                j: j.clone(),
            },
            params: *p,
        })
    }

    pub fn extract(n: &ShiftExponent, j: &ResidueClass, p: &SpaceParams) -> Result<Self> {
        check_class(j, n, p)?;
        Ok(LatticeOperator {
            label: format!("Y_{j}"),
            kind: OperatorKind::Extract {
                n: n.clone(),
                j: j.clone(),
            },
            params: *p,
        })
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> &SpaceParams {
        &self.params
    }

    fn in_class(l: &MultiIndex, n: &ShiftExponent, j: &ResidueClass) -> bool {
        l.dim() == n.dim()
            && residue_decompose(l, n)
                .map(|(_, r)| &r == j)
                .unwrap_or(false)
    }

    pub fn in_domain(&self, l: &MultiIndex) -> bool {
        if l.dim() != self.params.dim() {
            return false;
        }
        match &self.kind {
            OperatorKind::Multiplication { .. } | OperatorKind::Embed { .. } => true,
            OperatorKind::Restricted { n, j } | OperatorKind::Extract { n, j } => Self::in_class(l, n, j),
        }
    }

    pub fn in_codomain(&self, l: &MultiIndex) -> bool {
        if l.dim() != self.params.dim() {
            return false;
        }
        match &self.kind {
            OperatorKind::Multiplication { .. } | OperatorKind::Extract { .. } => true,
            OperatorKind::Restricted { n, j } | OperatorKind::Embed { n, j } => Self::in_class(l, n, j),
        }
    }

    /// Image of `e_l`: target index and weight.
    pub fn apply(&self, l: &MultiIndex) -> Result<(MultiIndex, LogValue)> {
        if !self.in_domain(l) {
            return Err(Error::OutsideDomain {
                operator: self.label.clone(),
                index: l.to_string(),
            });
        }
        let p = &self.params;
        match &self.kind {
            OperatorKind::Multiplication { m } => Ok((l.checked_add(m)?, shift_weight(l, m, p)?)),
            OperatorKind::Restricted { n, .. } => {
                Ok((l.checked_add(n.as_index())?, shift_weight(l, n.as_index(), p)?))
            }
            OperatorKind::Embed { n, j } => Ok((compose(l, j, n)?, c_coeff(l, j, n, p)?)),
            OperatorKind::Extract { n, j } => {
                let (k, _) = residue_decompose(l, n)?;
                let w = b_coeff(&k, j, n, p)?;
                Ok((k, w))
            }
        }
    }

    /// Apply `ops` right to left (`ops[0]` last), multiplying weights.
    pub fn apply_chain(ops: &[&LatticeOperator], l: &MultiIndex) -> Result<(MultiIndex, LogValue)> {
        let mut idx = l.clone();
        let mut w = LogValue::ONE;
        for op in ops.iter().rev() {
            let (next, step) = op.apply(&idx)?;
            idx = next;
            w = w * step;
        }
        Ok((idx, w))
    }
}

fn residual(left: (MultiIndex, LogValue), right: (MultiIndex, LogValue)) -> Result<f64> {
    if left.0 != right.0 {
        return Err(Error::TargetMismatch {
            left: left.0.to_string(),
            right: right.0.to_string(),
        });
    }
    Ok(left.1.rel_diff(right.1))
}

/// Relative gap between the coefficients of `X_j M_z e_k` and `M_j X_j e_k`.
pub fn intertwine_residual_x(k: &MultiIndex, j: &ResidueClass, n: &ShiftExponent, p: &SpaceParams) -> Result<f64> {
    let mz = LatticeOperator::mz(p);
    let x = LatticeOperator::embed(n, j, p)?;
    let mj = LatticeOperator::restricted(n, j, p)?;
    residual(
        LatticeOperator::apply_chain(&[&x, &mz], k)?,
        LatticeOperator::apply_chain(&[&mj, &x], k)?,
    )
}

/// Relative gap between the coefficients of `Y_j M_j e_{nk+j}` and
/// `M_z Y_j e_{nk+j}`.
pub fn intertwine_residual_y(k: &MultiIndex, j: &ResidueClass, n: &ShiftExponent, p: &SpaceParams) -> Result<f64> {
    let mz = LatticeOperator::mz(p);
    let y = LatticeOperator::extract(n, j, p)?;
    let mj = LatticeOperator::restricted(n, j, p)?;
    let l = compose(k, j, n)?;
    residual(
        LatticeOperator::apply_chain(&[&y, &mj], &l)?,
        LatticeOperator::apply_chain(&[&mz, &y], &l)?,
    )
}

/// Which `k` an intertwining sweep visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SweepRange {
    /// `|k| <= d`.
    IndexDegree(u32),
    /// `|n(k+1) + j| <= d`, i.e. both sides stay inside a degree-`d` truncation.
    TargetDegree(u32),
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassResidual {
    pub j: ResidueClass,
    pub count: usize,
    pub max_residual_x: f64,
    pub max_residual_y: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntertwineReport {
    pub classes: Vec<ClassResidual>,
    pub max_residual_x: f64,
    pub max_residual_y: f64,
    pub checked: usize,
}

impl IntertwineReport {
    pub fn max_residual(&self) -> f64 {
        self.max_residual_x.max(self.max_residual_y)
    }
}

/// Both intertwining residuals over every class of `n`.
pub fn intertwine_sweep(n: &ShiftExponent, p: &SpaceParams, range: SweepRange) -> Result<IntertwineReport> {
    n.as_index().check_dim(p.dim())?;
    let classes: Vec<ClassResidual> = n
        .classes()
        .par_iter()
        .map(|j| -> Result<ClassResidual> {
            let ks: Vec<MultiIndex> = match range {
                SweepRange::IndexDegree(d) => enumerate_upto(p.dim(), d),
                SweepRange::TargetDegree(d) => {
                    // |n(k+1)+j| = |nk+j| + |n|
                    let nd = n.as_index().degree();
                    if nd > u64::from(d) {
                        Vec::new()
                    } else {
                        enumerate_class(n, j, d - nd as u32)?
                    }
                }
            };
            let mut out = ClassResidual {
                j: j.clone(),
                count: ks.len(),
                max_residual_x: 0.0,
                max_residual_y: 0.0,
            };
            for k in &ks {
                out.max_residual_x = out.max_residual_x.max(intertwine_residual_x(k, j, n, p)?);
                out.max_residual_y = out.max_residual_y.max(intertwine_residual_y(k, j, n, p)?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(IntertwineReport {
        max_residual_x: classes.iter().map(|c| c.max_residual_x).fold(0.0, f64::max),
        max_residual_y: classes.iter().map(|c| c.max_residual_y).fold(0.0, f64::max),
        checked: classes.iter().map(|c| c.count).sum(),
        classes,
    })
}

/// Dense finite section of a [`LatticeOperator`], row-major, rows indexed
/// by `codomain_basis` and columns by `domain_basis`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMatrix {
    pub domain_basis: Vec<MultiIndex>,
    pub codomain_basis: Vec<MultiIndex>,
    entries: Vec<f64>,
}

impl TruncatedMatrix {
    pub fn rows(&self) -> usize {
        self.codomain_basis.len()
    }

    pub fn cols(&self) -> usize {
        self.domain_basis.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols() + col]
    }

    pub fn column_nonzeros(&self, col: usize) -> Vec<usize> {
        (0..self.rows()).filter(|&r| self.get(r, col) != 0.0).collect()
    }

    pub fn row_nonzeros(&self, row: usize) -> Vec<usize> {
        (0..self.cols()).filter(|&c| self.get(row, c) != 0.0).collect()
    }

    /// `rows cols` header, then one line per row, 17 significant digits.
    pub fn write_dense<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{} {}", self.rows(), self.cols())?;
        let mut line = String::new();
        for r in 0..self.rows() {
            line.clear();
            for c in 0..self.cols() {
                if c > 0 {
                    line.push(' ');
                }
                write!(line, "{:.16e}", self.get(r, c)).expect("write to string");
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_dense_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_dense(&mut buf).expect("write to vec");
        String::from_utf8(buf).expect("ascii")
    }
}

/// Finite section in explicitly given bases.
pub fn truncated_matrix_in_bases(
    op: &LatticeOperator,
    domain_basis: Vec<MultiIndex>,
    codomain_basis: Vec<MultiIndex>,
) -> Result<TruncatedMatrix> {
    let row_of: HashMap<&MultiIndex, usize> =
        codomain_basis.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let (rows, cols) = (codomain_basis.len(), domain_basis.len());
    let mut entries = vec![0.0; rows * cols];
    for (c, l) in domain_basis.iter().enumerate() {
        let (target, w) = op.apply(l)?;
        let r = *row_of.get(&target).ok_or_else(|| Error::CodomainTooSmall {
            source_index: l.to_string(),
            index: target.to_string(),
        })?;
        entries[r * cols + c] = w.value();
    }
    Ok(TruncatedMatrix {
        domain_basis,
        codomain_basis,
        entries,
    })
}

/// Finite section over the graded-lex bases `|l| <= domain_degree` of the
/// domain and `|l| <= codomain_degree` of the codomain.
pub fn truncated_matrix(op: &LatticeOperator, domain_degree: u32, codomain_degree: u32) -> Result<TruncatedMatrix> {
    let dim = op.params().dim();
    let domain = enumerate_upto(dim, domain_degree)
        .into_iter()
        .filter(|l| op.in_domain(l))
        .collect();
    let codomain = enumerate_upto(dim, codomain_degree)
        .into_iter()
        .filter(|l| op.in_codomain(l))
        .collect();
    truncated_matrix_in_bases(op, domain, codomain)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSize {
    pub j: ResidueClass,
    pub dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducingReport {
    pub pass: bool,
    pub class_count: u64,
    pub class_sizes: Vec<ClassSize>,
    /// Every `|l| <= D` split uniquely as `nk + j`.
    pub partition: bool,
    /// `M_{z^n}` is block diagonal with the basis grouped by class.
    pub block_diagonal: bool,
    /// `l + n` stays in the class of `l` for every `|l| <= D`.
    pub class_closure: bool,
    pub truncation_size: u64,
}

fn grouped_basis(n: &ShiftExponent, degree: u32) -> Result<Vec<(usize, MultiIndex)>> {
    let mut out = Vec::new();
    for (ci, j) in n.classes().iter().enumerate() {
        for k in enumerate_class(n, j, degree)? {
            out.push((ci, compose(&k, j, n)?));
        }
    }
    Ok(out)
}

/// Checks that each `A_j` reduces `M_{z^n}` at truncation degree `D`.
pub fn reducing_check(n: &ShiftExponent, max_degree: u32, p: &SpaceParams) -> Result<ReducingReport> {
    n.as_index().check_dim(p.dim())?;
    let classes = n.classes();
    let domain = grouped_basis(n, max_degree)?;
    let codomain = grouped_basis(n, max_degree + n.as_index().degree() as u32)?;

    let mut class_sizes: Vec<ClassSize> = classes
        .iter()
        .map(|j| ClassSize {
            j: j.clone(),
            dimension: 0,
        })
        .collect();
    for (ci, _) in &domain {
        class_sizes[*ci].dimension += 1;
    }

    let full = enumerate_upto(p.dim(), max_degree);
    let mut seen: HashMap<&MultiIndex, usize> = HashMap::new();
    for (_, l) in &domain {
        *seen.entry(l).or_default() += 1;
    }
    let partition = domain.len() == full.len()
        && full.iter().all(|l| seen.get(l) == Some(&1))
        && full.iter().all(|l| {
            residue_decompose(l, n)
                .and_then(|(k, j)| compose(&k, &j, n))
                .map(|back| &back == l)
                .unwrap_or(false)
        });

    let class_closure = full.iter().all(|l| {
        let here = residue_decompose(l, n).map(|(_, j)| j);
        let there = l
            .checked_add(n.as_index())
            .and_then(|img| residue_decompose(&img, n))
            .map(|(_, j)| j);
        matches!((here, there), (Ok(a), Ok(b)) if a == b)
    });

    let op = LatticeOperator::power(n, p)?;
    let col_class: Vec<usize> = domain.iter().map(|(c, _)| *c).collect();
    let row_class: Vec<usize> = codomain.iter().map(|(c, _)| *c).collect();
    let matrix = truncated_matrix_in_bases(
        &op,
        domain.into_iter().map(|(_, l)| l).collect(),
        codomain.into_iter().map(|(_, l)| l).collect(),
    )?;
    let block_diagonal = (0..matrix.cols()).all(|c| {
        let nz = matrix.column_nonzeros(c);
        nz.len() == 1 && nz.iter().all(|&r| row_class[r] == col_class[c])
    });

    Ok(ReducingReport {
        pass: partition && block_diagonal && class_closure && classes.len() as u64 == n.class_count(),
        class_count: classes.len() as u64,
        class_sizes,
        partition,
        block_diagonal,
        class_closure,
        truncation_size: truncation_size(p.dim(), max_degree),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiInvertibilityReport {
    pub j: ResidueClass,
    pub count: usize,
    pub min_c: Option<LogValue>,
    pub max_c: Option<LogValue>,
    pub min_b: Option<LogValue>,
    pub max_b: Option<LogValue>,
    pub argmin_c: Option<MultiIndex>,
    pub all_positive: bool,
    /// Truncated `X_j`: one positive entry per column, distinct rows.
    pub x_injective: bool,
    /// Truncated `X_j`: every basis vector of the truncated `A_j` is hit.
    pub x_dense_range: bool,
    pub y_injective: bool,
    pub y_dense_range: bool,
}

impl QuasiInvertibilityReport {
    pub fn pass(&self) -> bool {
        self.all_positive && self.x_injective && self.x_dense_range && self.y_injective && self.y_dense_range
    }
}

fn one_per_line(m: &TruncatedMatrix) -> (bool, bool) {
    let cols = (0..m.cols()).all(|c| {
        let nz = m.column_nonzeros(c);
        nz.len() == 1 && m.get(nz[0], c) > 0.0
    });
    let rows = (0..m.rows()).all(|r| m.row_nonzeros(r).len() == 1);
    (cols, rows)
}

/// Truncated witness that `X_j` and `Y_j` have zero kernel and dense range,
/// over every `k` with `|nk + j| <= D`.
pub fn quasi_invertibility_report(
    j: &ResidueClass,
    n: &ShiftExponent,
    p: &SpaceParams,
    max_degree: u32,
) -> Result<QuasiInvertibilityReport> {
    check_class(j, n, p)?;
    let ks = enumerate_class(n, j, max_degree)?;
    let ls = ks
        .iter()
        .map(|k| compose(k, j, n))
        .collect::<Result<Vec<_>>>()?;

    let mut min_c: Option<(LogValue, MultiIndex)> = None;
    let mut max_c: Option<LogValue> = None;
    let mut all_positive = true;
    for k in &ks {
        let c = c_coeff(k, j, n, p)?;
        all_positive &= c.is_positive_finite();
        if min_c.as_ref().is_none_or(|(m, _)| c.ln() < m.ln()) {
            min_c = Some((c, k.clone()));
        }
        if max_c.is_none_or(|m| c.ln() > m.ln()) {
            max_c = Some(c);
        }
    }

    let x = truncated_matrix_in_bases(&LatticeOperator::embed(n, j, p)?, ks.clone(), ls.clone())?;
    let y = truncated_matrix_in_bases(&LatticeOperator::extract(n, j, p)?, ls, ks.clone())?;
    let (x_injective, x_dense_range) = one_per_line(&x);
    let (y_injective, y_dense_range) = one_per_line(&y);

    Ok(QuasiInvertibilityReport {
        j: j.clone(),
        count: ks.len(),
        min_b: max_c.map(LogValue::recip),
        max_b: min_c.as_ref().map(|(c, _)| c.recip()),
        min_c: min_c.as_ref().map(|(c, _)| *c),
        max_c,
        argmin_c: min_c.map(|(_, k)| k),
        all_positive,
        x_injective,
        x_dense_range,
        y_injective,
        y_dense_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    fn sx(v: &[u32]) -> ShiftExponent {
        ShiftExponent::new(mi(v)).unwrap()
    }

    fn rc(v: &[u32], n: &ShiftExponent) -> ResidueClass {
        ResidueClass::new(mi(v), n).unwrap()
    }

    fn p(dim: usize, a: f64) -> SpaceParams {
        SpaceParams::new(dim, a).unwrap()
    }

    #[test]
    fn shift_weight_examples() {
        let q = p(2, 0.0);
        for k in enumerate_upto(2, 5) {
            assert_eq!(shift_weight(&k, &mi(&[0, 0]), &q).unwrap().value(), 1.0);
        }
        let w = shift_weight(&mi(&[0, 0]), &mi(&[2, 1]), &q).unwrap();
        assert!((w.value() - (1.0f64 / 30.0).sqrt()).abs() < 1e-15);
        let nrm = crate::bergman::monomial_norm_sq(&mi(&[2, 1]), &q).unwrap();
        assert!(w.squared().rel_diff(nrm) < 1e-14);
        let w = shift_weight(&mi(&[1, 1]), &mi(&[1, 1]), &q).unwrap();
        assert!((w.value() - (2.0f64 / 15.0).sqrt()).abs() < 1e-15);
        assert!((w.value() - 0.365148).abs() < 1e-6);
    }

    #[test]
    fn c_coeff_examples() {
        let n = sx(&[2, 2]);
        let q = p(2, 0.0);
        for j in n.classes() {
            assert!(c_coeff(&mi(&[0, 0]), &j, &n, &q).unwrap().rel_diff(LogValue::ONE) < 1e-14);
        }
        let c = c_coeff(&mi(&[1, 1]), &rc(&[0, 0], &n), &n, &q).unwrap();
        assert!((c.value() - (2.0f64 / 15.0).sqrt()).abs() < 1e-15);
        let c = c_coeff(&mi(&[1, 0]), &rc(&[1, 0], &n), &n, &q).unwrap();
        assert!((c.value() - 0.9f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exact_c_squared_examples() {
        let n = sx(&[2, 2]);
        let c2 = c_squared_exact(&mi(&[1, 1]), &rc(&[0, 0], &n), &n, 2, 0).unwrap();
        assert_eq!(c2, ExactRational::new(2.into(), 15.into()));
        let c2 = c_squared_exact(&mi(&[1, 0]), &rc(&[1, 0], &n), &n, 2, 0).unwrap();
        assert_eq!(c2, ExactRational::new(9.into(), 10.into()));
    }

    #[test]
    fn b_coeff_is_reciprocal() {
        let n = sx(&[2, 2]);
        let q = p(2, 0.0);
        let b = b_coeff(&mi(&[1, 1]), &rc(&[0, 0], &n), &n, &q).unwrap();
        assert!((b.value() - 7.5f64.sqrt()).abs() < 1e-14);
        assert_eq!(b_coeff(&mi(&[0, 0]), &rc(&[1, 0], &n), &n, &q).unwrap().value(), 1.0);
    }

    #[test]
    fn residual_example() {
        let n = sx(&[2, 2]);
        let j = rc(&[0, 0], &n);
        let q = p(2, 0.0);
        let k = mi(&[0, 0]);
        assert!(intertwine_residual_x(&k, &j, &n, &q).unwrap() <= 1e-12);
        assert!(intertwine_residual_y(&k, &j, &n, &q).unwrap() <= 1e-12);
        let mz = LatticeOperator::mz(&q);
        let x = LatticeOperator::embed(&n, &j, &q).unwrap();
        let (idx, w) = LatticeOperator::apply_chain(&[&x, &mz], &k).unwrap();
        assert_eq!(idx, mi(&[2, 2]));
        assert!((w.value() - (1.0f64 / 90.0).sqrt()).abs() < 1e-15);
        assert!((w.value() - 0.105409).abs() < 1e-6);
    }

    #[test]
    fn trivial_exponent_y_sides_are_shift_weights() {
        let n = sx(&[1, 1]);
        let j = rc(&[0, 0], &n);
        let q = p(2, 0.3);
        let y = LatticeOperator::extract(&n, &j, &q).unwrap();
        let mj = LatticeOperator::restricted(&n, &j, &q).unwrap();
        let mz = LatticeOperator::mz(&q);
        for k in enumerate_upto(2, 6) {
            let sw = shift_weight(&k, &MultiIndex::ones(2), &q).unwrap();
            let (_, left) = LatticeOperator::apply_chain(&[&y, &mj], &k).unwrap();
            let (_, right) = LatticeOperator::apply_chain(&[&mz, &y], &k).unwrap();
            assert!(left.rel_diff(sw) < 1e-13);
            assert!(right.rel_diff(sw) < 1e-13);
        }
    }

    #[test]
    fn sweep_residuals_small() {
        let report = intertwine_sweep(&sx(&[2, 3]), &p(2, 1.5), SweepRange::IndexDegree(12)).unwrap();
        assert_eq!(report.classes.len(), 6);
        assert!(report.max_residual() <= 1e-12, "{}", report.max_residual());
    }

    #[test]
    fn target_degree_sweep_counts() {
        let n = sx(&[2, 2]);
        let report = intertwine_sweep(&n, &p(2, 0.0), SweepRange::TargetDegree(12)).unwrap();
        // class (0,0): |2k| <= 8 -> |k| <= 4 -> 15 indices
        assert_eq!(report.classes[0].count, 15);
        assert!(report.max_residual() <= 1e-12);
    }

    #[test]
    fn mz_matrix_example() {
        let q = p(2, 0.0);
        let m = truncated_matrix(&LatticeOperator::mz(&q), 0, 2).unwrap();
        assert_eq!(m.cols(), 1);
        assert_eq!(m.rows(), 6);
        let r = m.codomain_basis.iter().position(|l| l == &mi(&[1, 1])).unwrap();
        assert_eq!(m.column_nonzeros(0), vec![r]);
        assert!((m.get(r, 0) - (1.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert!((m.get(r, 0) - 0.288675).abs() < 1e-6);
    }

    #[test]
    fn identity_shift_matrix() {
        let q = p(3, 0.7);
        let op = LatticeOperator::multiplication(MultiIndex::zeros(3), &q).unwrap();
        let m = truncated_matrix(&op, 3, 3).unwrap();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                assert_eq!(m.get(r, c), if r == c { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn codomain_too_small_is_an_error() {
        let q = p(2, 0.0);
        let err = truncated_matrix(&LatticeOperator::mz(&q), 2, 3).unwrap_err();
        assert!(matches!(err, Error::CodomainTooSmall { .. }));
    }

    #[test]
    fn x_matrix_columns_single_entry() {
        let n = sx(&[2, 3]);
        let q = p(2, 0.5);
        let x = LatticeOperator::embed(&n, &rc(&[1, 2], &n), &q).unwrap();
        // max |nk+j| for |k| <= 3 is 3*3 + 3 = 12
        let m = truncated_matrix(&x, 3, 12).unwrap();
        for c in 0..m.cols() {
            let nz = m.column_nonzeros(c);
            assert_eq!(nz.len(), 1);
            assert!(m.get(nz[0], c) > 0.0);
        }
    }

    #[test]
    fn y_rejects_indices_outside_class() {
        let n = sx(&[2, 2]);
        let q = p(2, 0.0);
        let y = LatticeOperator::extract(&n, &rc(&[1, 0], &n), &q).unwrap();
        assert!(matches!(y.apply(&mi(&[2, 0])), Err(Error::OutsideDomain { .. })));
        let (k, _) = y.apply(&mi(&[3, 2])).unwrap();
        assert_eq!(k, mi(&[1, 1]));
    }

    #[test]
    fn dense_export_format() {
        let q = p(2, 0.0);
        let m = truncated_matrix(&LatticeOperator::mz(&q), 0, 2).unwrap();
        let s = m.to_dense_string();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("6 1"));
        let rest: Vec<&str> = lines.collect();
        assert_eq!(rest.len(), 6);
        assert_eq!(rest[0], "0.0000000000000000e0");
        let r = m.codomain_basis.iter().position(|l| l == &mi(&[1, 1])).unwrap();
        let parsed: f64 = rest[r].parse().unwrap();
        assert_eq!(parsed, m.get(r, 0));
        assert_eq!(rest[r].split('e').next().unwrap().replace('.', "").len(), 17);
    }

    #[test]
    fn reducing_examples() {
        let cases: [(&[u32], u32, u64); 3] = [(&[2, 2], 10, 4), (&[2, 3], 10, 6), (&[3, 1, 2], 8, 6)];
        for (nv, d, classes) in cases {
            let n = sx(nv);
            let r = reducing_check(&n, d, &p(nv.len(), 0.0)).unwrap();
            assert!(r.pass, "{nv:?}");
            assert_eq!(r.class_count, classes);
            let total: usize = r.class_sizes.iter().map(|c| c.dimension).sum();
            assert_eq!(total as u64, truncation_size(nv.len(), d));
        }
    }

    #[test]
    fn quasi_invertibility_examples() {
        let n = sx(&[2, 2]);
        let q = p(2, 0.0);
        let j = rc(&[0, 0], &n);
        let r = quasi_invertibility_report(&j, &n, &q, 8).unwrap();
        assert!(r.pass());
        assert_eq!(r.count, 15);
        let arg = r.argmin_c.clone().unwrap();
        assert!(arg.entries().iter().all(|&x| x == arg.entries()[0]), "{arg}");
        assert_eq!(r.max_b.unwrap().ln(), -r.min_c.unwrap().ln());

        let r = quasi_invertibility_report(&j, &n, &q, 1).unwrap();
        assert_eq!(r.count, 1);
        assert_eq!(r.min_c.unwrap().value(), 1.0);
        assert_eq!(r.max_c.unwrap().value(), 1.0);

        let r = quasi_invertibility_report(&rc(&[1, 1], &n), &n, &q, 1).unwrap();
        assert_eq!(r.count, 0);
        assert!(r.min_c.is_none());
    }

    #[test]
    fn diagonal_c_decreasing() {
        let n = sx(&[2, 2]);
        let q = p(2, 0.0);
        let j = rc(&[0, 0], &n);
        let mut prev = c_coeff(&mi(&[1, 1]), &j, &n, &q).unwrap().ln();
        for d in 2..=12 {
            let c = c_coeff(&mi(&[d, d]), &j, &n, &q).unwrap().ln();
            assert!(c < prev);
            prev = c;
        }
        assert!(prev.exp() < 1e-3);
    }
}
