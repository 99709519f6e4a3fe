//! Scalar kernels: log-gamma, log-factorials, and exact big-integer
//! factorials for cross-checking the floating-point path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::MultiIndex;

/// A strictly positive quantity stored as its natural logarithm.
///
/// Every coefficient in this crate (norms, weights, `c_kj`, `I_1`, `I_2`,
/// `a_kj`) is positive, so no sign is tracked. `is_zero` only marks an
/// explicit zero (log magnitude `-inf`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogValue {
    pub log_magnitude: f64,
    pub is_zero: bool,
}

impl LogValue {
    pub const ONE: LogValue = LogValue {
        log_magnitude: 0.0,
        is_zero: false,
    };

    pub const ZERO: LogValue = LogValue {
        log_magnitude: f64::NEG_INFINITY,
        is_zero: true,
    };

    pub fn from_ln(log_magnitude: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogValue {
            log_magnitude,
            is_zero: false,
        }
    }

    /// `None` for negative or NaN input.
    pub fn from_value(x: f64) -> Option<Self> {
        if x.is_nan() || x < 0.0 {
            None
        } else if x == 0.0 {
            Some(Self::ZERO)
        } else {
            Some(Self::from_ln(x.ln()))
        }
    }

    pub fn ln(self) -> f64 {
        self.log_magnitude
    }

    pub fn value(self) -> f64 {
        if self.is_zero {
            0.0
        } else {
            self.log_magnitude.exp()
        }
    }

    pub fn sqrt(self) -> Self {
        Self::from_ln(0.5 * self.log_magnitude)
    }

    pub fn squared(self) -> Self {
        Self::from_ln(2.0 * self.log_magnitude)
    }

    pub fn recip(self) -> Self {
        assert!(!self.is_zero, "reciprocal of zero LogValue");
        Self::from_ln(-self.log_magnitude)
    }

    /// Finite and not zero.
    pub fn is_positive_finite(self) -> bool {
        !self.is_zero && self.log_magnitude.is_finite()
    }

    /// `|self / other - 1|`, evaluated without leaving the log domain.
    pub fn rel_diff(self, other: LogValue) -> f64 {
        (self.log_magnitude - other.log_magnitude).exp_m1().abs()
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: LogValue) -> LogValue {
        LogValue::from_ln(self.log_magnitude + rhs.log_magnitude)
    }
}

impl Div for LogValue {
    type Output = LogValue;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: LogValue) -> LogValue {
        assert!(!rhs.is_zero, "division by zero LogValue");
        LogValue::from_ln(self.log_magnitude - rhs.log_magnitude)
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// zeta(k) - 1 for k = 2..=41
const ZETA_MINUS_ONE: [f64; 40] = [
    0.6449340668482264,
    0.2020569031595943,
    0.08232323371113819,
    0.03692775514336993,
    0.01734306198444914,
    0.008349277381922827,
    0.00407735619794434,
    0.0020083928260822143,
    0.0009945751278180853,
    0.0004941886041194645,
    0.0002460865533080483,
    0.00012271334757848915,
    6.124813505870483e-05,
    3.058823630702049e-05,
    1.528225940865187e-05,
    7.637197637899763e-06,
    3.81729326499984e-06,
    1.908212716553939e-06,
    9.539620338727962e-07,
    4.769329867878064e-07,
    2.38450502727733e-07,
    1.1921992596531106e-07,
    5.960818905125948e-08,
    2.980350351465228e-08,
    1.4901554828365043e-08,
    7.45071178983543e-09,
    3.725334024788457e-09,
    1.862659723513049e-09,
    9.313274324196682e-10,
    4.656629065033784e-10,
    2.3283118336765053e-10,
    1.164155017270052e-10,
    5.820772087902701e-11,
    2.9103850444971e-11,
    1.4551921891041985e-11,
    7.275959835057482e-12,
    3.637979547378651e-12,
    1.818989650307066e-12,
    9.094947840263888e-13,
    4.547473783042154e-13,
];

// B_{2k} / (2k (2k - 1)), k = 1..=10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln Γ(1 + eps)` for `|eps| <= 1/2`.
///
/// Taylor series about 1 with the `ln(1 + eps)` part summed in closed form,
/// so the remaining coefficients `(zeta(k) - 1) / k` decay like `2^-k`.
fn ln_gamma_1p(eps: f64) -> f64 {
    let mut tail = 0.0;
    for (i, zm1) in ZETA_MINUS_ONE.iter().enumerate().rev() {
        let k = (i + 2) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        tail = tail * eps + sign * zm1 / k;
    }
    tail *= eps * eps;
    -EULER_GAMMA * eps + (eps - eps.ln_1p()) + tail
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series * inv
}

/// `ln Γ(x)` for `x > 0`, assumed valid.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        ln_gamma_1p(x) - x.ln()
    } else if x < 1.5 {
        ln_gamma_1p(x - 1.0)
    } else if x < 2.5 {
        let eps = x - 2.0;
        eps.ln_1p() + ln_gamma_1p(eps)
    } else if x < 10.0 {
        // Γ(y + 1) = y Γ(y), stepping down into [1.5, 2.5)
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        prod.ln() + ln_gamma(y)
    } else {
        ln_gamma_stirling(x)
    }
}

/// Natural log of Γ(x).
///
/// Relative error stays below 1e-13 on (0, 1e6], including near the zeros
/// of `ln Γ` at 1 and 2.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::NonPositiveArgument(x));
    }
    Ok(ln_gamma(x))
}

/// `ln(m!)`.
pub fn log_factorial(m: u64) -> f64 {
    ln_gamma(m as f64 + 1.0)
}

/// `ln(k!) = sum_i ln(k_i!)`.
pub fn log_factorial_multi(k: &MultiIndex) -> f64 {
    k.entries().iter().map(|&x| log_factorial(u64::from(x))).sum()
}

/// An exact rational number with arbitrary-precision parts, kept reduced
/// with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numerator: BigInt, denominator: BigInt) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        ExactRational(BigRational::new(numerator, denominator))
    }

    pub fn from_integer(x: BigUint) -> Self {
        ExactRational(BigRational::from_integer(BigInt::from(x)))
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Natural log; the value must be positive.
    pub fn ln(&self) -> f64 {
        assert!(self.is_positive(), "ln of non-positive rational");
        ln_bigint(self.0.numer()) - ln_bigint(self.0.denom())
    }

    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            0.0
        } else {
            let v = self.ln().exp();
            if self.0.is_negative() {
                -v
            } else {
                v
            }
        }
    }

    /// The same value in the log representation.
    pub fn to_log_value(&self) -> LogValue {
        LogValue::from_ln(self.ln())
    }

    pub fn recip(&self) -> Self {
        ExactRational(self.0.recip())
    }
}

impl Mul for ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: ExactRational) -> ExactRational {
        ExactRational(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: &'a ExactRational) -> ExactRational {
        ExactRational(&self.0 * &rhs.0)
    }
}

impl Div for ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: ExactRational) -> ExactRational {
        ExactRational(self.0 / rhs.0)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn ln_bigint(x: &BigInt) -> f64 {
    let mag = x.magnitude();
    let bits = mag.bits();
    if bits <= 1000 {
        return mag.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (mag >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `m!` as a big integer.
pub fn factorial_big(m: u64) -> BigUint {
    (2..=m).fold(BigUint::one(), |acc, i| acc * i)
}

/// Exact `m!`.
pub fn exact_factorial(m: u64) -> ExactRational {
    ExactRational::from_integer(factorial_big(m))
}

/// Precomputed `0!, 1!, ..., max!` for exhaustive exact scans.
#[derive(Clone, Debug)]
pub struct FactorialTable {
    table: Vec<BigUint>,
}

impl FactorialTable {
    pub fn new(max: u64) -> Self {
        let mut table = Vec::with_capacity(max as usize + 1);
        table.push(BigUint::one());
        for i in 1..=max {
            let next = table.last().expect("nonempty") * i;
            table.push(next);
        }
        FactorialTable { table }
    }

    pub fn max(&self) -> u64 {
        self.table.len() as u64 - 1
    }

    pub fn get(&self, m: u64) -> &BigUint {
        &self.table[m as usize]
    }

    /// `prod_i k_i!`.
    pub fn multi(&self, k: impl IntoIterator<Item = u64>) -> BigUint {
        k.into_iter()
            .fold(BigUint::one(), |acc, x| acc * self.get(x))
    }
}

/// Compare two exact fractions `a/b` and `c/d` with positive parts.
pub fn cmp_fractions(a: &BigUint, b: &BigUint, c: &BigUint, d: &BigUint) -> Ordering {
    (a * d).cmp(&(c * b))
}
