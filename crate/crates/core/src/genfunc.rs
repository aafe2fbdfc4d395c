//! Rational generating functions with integer coefficients.
//!
//! A [`RationalGF`] is kept in canonical form: numerator and denominator
//! share no nonconstant factor, the denominator has constant term 1, and
//! both have integer coefficients. Every rational power series with integer
//! coefficients has exactly one such representation, so structural equality
//! is equality of series.

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::poly::{QPoly, ZPoly};
use crate::semilinear::{LinearSet, SemilinearSet};

/// Largest quasi-polynomial period accepted by [`to_quasi_polynomial`].
pub const DEFAULT_PERIOD_CAP: u64 = 360;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("denominator vanishes at z = 0")]
    ZeroConstantTerm,
    #[error("series does not have integer coefficients")]
    NotIntegral,
    #[error("axis {axis} is out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("period {period:?} has projection {value} on axis {axis}; need >= 1")]
    NonPositivePeriod {
        axis: usize,
        period: Vec<i64>,
        value: i64,
    },
    #[error("base {base:?} has negative projection on axis {axis}")]
    NegativeBase { axis: usize, base: Vec<i64> },
    #[error("semilinear set is not certified disjoint and unambiguous")]
    NotCertified,
    #[error("prefix of length {len} is too short for window {window}")]
    PrefixTooShort { len: usize, window: usize },
    #[error("no rational function with denominator degree <= {0} explains the prefix")]
    NoFit(usize),
    #[error("denominator has a root that is not a root of unity")]
    NotQuasiPolynomial,
    #[error("quasi-polynomial period {period} exceeds cap {cap}")]
    PeriodCapExceeded { period: BigInt, cap: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalGF {
    num: ZPoly,
    den: ZPoly,
}

impl RationalGF {
    /// Canonical form of `num / den`.
    pub fn new(num: ZPoly, den: ZPoly) -> Result<Self, GfError> {
        Self::from_rational(num.to_rational(), den.to_rational())
    }

    fn from_rational(num: QPoly, den: QPoly) -> Result<Self, GfError> {
        if den.coeff(0).is_zero() {
            return Err(GfError::ZeroConstantTerm);
        }
        if num.is_zero() {
            return Ok(RationalGF::zero());
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let c = den.coeff(0).recip();
        let num = num.scale(&c).to_integral().ok_or(GfError::NotIntegral)?;
        let den = den.scale(&c).to_integral().ok_or(GfError::NotIntegral)?;
        Ok(RationalGF { num, den })
    }

    pub fn from_i64s(num: &[i64], den: &[i64]) -> Result<Self, GfError> {
        Self::new(ZPoly::from_i64s(num), ZPoly::from_i64s(den))
    }

    pub fn zero() -> Self {
        RationalGF {
            num: ZPoly::zero(),
            den: ZPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::polynomial(ZPoly::one())
    }

    pub fn polynomial(p: ZPoly) -> Self {
        RationalGF {
            num: p,
            den: ZPoly::one(),
        }
    }

    pub fn numerator(&self) -> &ZPoly {
        &self.num
    }

    pub fn denominator(&self) -> &ZPoly {
        &self.den
    }

    /// Degree of the denominator.
    pub fn order(&self) -> usize {
        self.den.degree().unwrap_or(0)
    }

    /// Coefficients `c_0..=c_n` by exact long division.
    pub fn series_coeffs(&self, n: usize) -> Vec<BigInt> {
        let d = self.den.coeffs();
        let mut c: Vec<BigInt> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut v = self.num.coeff(k);
            for (i, di) in d.iter().enumerate().skip(1).take(k) {
                v -= di * &c[k - i];
            }
            c.push(v);
        }
        c
    }

    /// Multiplication by `1 - z`: cumulative counts become exact counts.
    pub fn cumulative_to_exact(&self) -> RationalGF {
        let num = &self.num * &ZPoly::one_minus_power(1);
        Self::new(num, self.den.clone()).expect("product of integral series is integral")
    }
}

impl Add for &RationalGF {
    type Output = RationalGF;
    fn add(self, rhs: &RationalGF) -> RationalGF {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalGF::new(num, &self.den * &rhs.den).expect("sum of integral series is integral")
    }
}

impl Add for RationalGF {
    type Output = RationalGF;
    fn add(self, rhs: RationalGF) -> RationalGF {
        &self + &rhs
    }
}

pub fn gf_add(a: &RationalGF, b: &RationalGF) -> RationalGF {
    a + b
}

impl fmt::Display for RationalGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

/// JSON coefficient: a plain number when it fits in `i64`, else a string.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for JsonInt {
    fn from(c: &BigInt) -> Self {
        match c.to_i64() {
            Some(v) => JsonInt::Small(v),
            None => JsonInt::Big(c.to_string()),
        }
    }
}

impl TryFrom<JsonInt> for BigInt {
    type Error = String;
    fn try_from(c: JsonInt) -> Result<Self, String> {
        match c {
            JsonInt::Small(v) => Ok(BigInt::from(v)),
            JsonInt::Big(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GfRepr {
    num: Vec<JsonInt>,
    den: Vec<JsonInt>,
}

impl Serialize for RationalGF {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GfRepr {
            num: self.num.coeffs().iter().map(JsonInt::from).collect(),
            den: self.den.coeffs().iter().map(JsonInt::from).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalGF {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = GfRepr::deserialize(d)?;
        let conv = |v: Vec<JsonInt>| -> Result<ZPoly, D::Error> {
            let cs: Result<Vec<BigInt>, String> = v.into_iter().map(BigInt::try_from).collect();
            Ok(ZPoly::new(cs.map_err(D::Error::custom)?))
        };
        RationalGF::new(conv(r.num)?, conv(r.den)?).map_err(D::Error::custom)
    }
}

/// `z^{b_i} / prod_j (1 - z^{a_j,i})` for an unambiguous linear set; its
/// coefficient of `z^y` counts the members with coordinate `axis` equal
/// to `y`. Unambiguity is the caller's responsibility.
pub fn gf_unambiguous_linear(l: &LinearSet, axis: usize) -> Result<RationalGF, GfError> {
    if axis >= l.dim() {
        return Err(GfError::AxisOutOfRange { axis, dim: l.dim() });
    }
    let b = l.base()[axis];
    if b < 0 {
        return Err(GfError::NegativeBase {
            axis,
            base: l.base().to_vec(),
        });
    }
    let mut den = ZPoly::one();
    for p in l.periods() {
        if p[axis] < 1 {
            return Err(GfError::NonPositivePeriod {
                axis,
                period: p.clone(),
                value: p[axis],
            });
        }
        den = &den * &ZPoly::one_minus_power(p[axis] as usize);
    }
    RationalGF::new(ZPoly::monomial(BigInt::one(), b as usize), den)
}

/// Sum of the part formulas of a certified disjoint unambiguous set.
pub fn gf_semilinear_slice(s: &SemilinearSet, axis: usize) -> Result<RationalGF, GfError> {
    if !s.is_certified() {
        return Err(GfError::NotCertified);
    }
    let mut total = RationalGF::zero();
    for part in s.parts() {
        total = &total + &gf_unambiguous_linear(part, axis)?;
    }
    Ok(total)
}

/// Lowest-order rational function reproducing `prefix`.
///
/// Orders `t = 0, 1, ..., max_order` are tried in turn, and for each order
/// numerator degrees `e` in increasing order. The recurrence
/// `sum_{i=0..t} q_i c_{k-i} = 0` (`q_0 = 1`) is solved exactly over the
/// indices `e < k < len - window` only; the final `window` terms must then
/// come out right as predictions. An order is only tried when the prefix
/// has at least `2t + window` terms.
pub fn fit_rational(prefix: &[BigInt], max_order: usize, verify_window: usize) -> Result<RationalGF, GfError> {
    let n = prefix.len();
    if n < verify_window + 1 {
        return Err(GfError::PrefixTooShort {
            len: n,
            window: verify_window,
        });
    }
    let fit_len = n - verify_window;
    let c = |k: isize| -> BigRational {
        if k < 0 {
            BigRational::zero()
        } else {
            BigRational::from_integer(prefix[k as usize].clone())
        }
    };
    for t in 0..=max_order {
        if 2 * t + verify_window > n {
            break;
        }
        // need at least t equations: fit_len - 1 - e >= t
        let Some(e_max) = (fit_len - 1).checked_sub(t) else {
            break;
        };
        for e in 0..=e_max {
            let rows: Vec<Vec<BigRational>> = (e + 1..fit_len)
                .map(|k| (1..=t).map(|i| c(k as isize - i as isize)).collect())
                .collect();
            let rhs: Vec<BigRational> = (e + 1..fit_len).map(|k| -c(k as isize)).collect();
            let q = if t == 0 {
                if rhs.iter().all(Zero::is_zero) {
                    Some(Vec::new())
                } else {
                    None
                }
            } else {
                linalg::solve(&rows, &rhs, t)
            };
            let Some(q) = q else { continue };
            let mut den = vec![BigRational::one()];
            den.extend(q);
            let den = QPoly::new(den);
            let series = QPoly::new((0..=e).map(|k| c(k as isize)).collect());
            let num = (&series * &den).truncate(e + 1);
            let Ok(gf) = RationalGF::from_rational(num, den) else {
                continue;
            };
            if gf.series_coeffs(n - 1) == prefix {
                return Ok(gf);
            }
        }
    }
    Err(GfError::NoFit(max_order))
}

pub fn fit_rational_i64(prefix: &[i64], max_order: usize, verify_window: usize) -> Result<RationalGF, GfError> {
    let p: Vec<BigInt> = prefix.iter().map(|&x| BigInt::from(x)).collect();
    fit_rational(&p, max_order, verify_window)
}

/// `c_k` given by a polynomial in `k` that depends on `k mod period`, except
/// for `k < exceptional_prefix.len()` where the listed values apply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPolynomial {
    pub period: usize,
    /// Entry `r` applies to `k ≡ r (mod period)`; polynomials in `k`.
    pub residue_polynomials: Vec<QPoly>,
    pub exceptional_prefix: Vec<BigInt>,
}

impl QuasiPolynomial {
    pub fn eval(&self, k: usize) -> BigRational {
        if let Some(v) = self.exceptional_prefix.get(k) {
            return BigRational::from_integer(v.clone());
        }
        let p = &self.residue_polynomials[k % self.period];
        let x = BigRational::from_integer(BigInt::from(k));
        p.coeffs()
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, a| acc * &x + a)
    }
}

fn cyclotomic(n: usize, memo: &mut Vec<Option<QPoly>>) -> QPoly {
    if memo.len() <= n {
        memo.resize(n + 1, None);
    }
    if let Some(p) = &memo[n] {
        return p.clone();
    }
    let mut p = -&QPoly::one_minus_power(n);
    for d in 1..n {
        if n.is_multiple_of(d) {
            let (q, _) = p.div_rem(&cyclotomic(d, memo));
            p = q;
        }
    }
    memo[n] = Some(p.clone());
    p
}

pub fn to_quasi_polynomial(q: &RationalGF) -> Result<QuasiPolynomial, GfError> {
    to_quasi_polynomial_with_cap(q, DEFAULT_PERIOD_CAP)
}

/// Quasi-polynomial form of the coefficients. Cyclotomic factors are
/// divided out of the denominator; anything left over is a pole off the
/// unit roots. Residue polynomials are interpolated from `deg den` terms of
/// each residue class past the exceptional prefix.
pub fn to_quasi_polynomial_with_cap(q: &RationalGF, cap: u64) -> Result<QuasiPolynomial, GfError> {
    let dd = q.order();
    let dn = q.num.degree().unwrap_or(0);
    let mut rest = q.den.to_rational();
    let mut period = BigInt::one();
    let mut memo = Vec::new();
    // phi(n) <= dd forces n <= 2 dd^2 (phi(n) >= sqrt(n/2))
    for n in 1..=(2 * dd * dd + 2) {
        if rest.degree().unwrap_or(0) == 0 {
            break;
        }
        let phi = cyclotomic(n, &mut memo);
        loop {
            let (quot, rem) = rest.div_rem(&phi);
            if !rem.is_zero() {
                break;
            }
            rest = quot;
            period = period.lcm(&BigInt::from(n));
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        return Err(GfError::NotQuasiPolynomial);
    }
    if period > BigInt::from(cap) {
        return Err(GfError::PeriodCapExceeded { period, cap });
    }
    let p = period.to_usize().expect("period below cap");
    let k0 = if q.num.is_zero() { 0 } else { (dn + 1).saturating_sub(dd) };
    let series = q.series_coeffs(k0 + p * (dd + 1));
    let mut residue_polynomials = Vec::with_capacity(p);
    for r in 0..p {
        let start = k0 + (r + p - k0 % p) % p;
        let pts: Vec<(BigRational, BigRational)> = (0..dd)
            .map(|j| {
                let k = start + j * p;
                (
                    BigRational::from_integer(BigInt::from(k)),
                    BigRational::from_integer(series[k].clone()),
                )
            })
            .collect();
        residue_polynomials.push(interpolate(&pts));
    }
    Ok(QuasiPolynomial {
        period: p,
        residue_polynomials,
        exceptional_prefix: series[..k0].to_vec(),
    })
}

fn interpolate(pts: &[(BigRational, BigRational)]) -> QPoly {
    let mut out = QPoly::zero();
    for (i, (xi, yi)) in pts.iter().enumerate() {
        let mut basis = QPoly::constant(yi.clone());
        for (j, (xj, _)) in pts.iter().enumerate() {
            if i != j {
                let lin = QPoly::new(vec![-xj.clone(), BigRational::one()]);
                basis = (&basis * &lin).scale(&(xi - xj).recip());
            }
        }
        out = &out + &basis;
    }
    out
}

/// Coefficients as `i64`, when they all fit.
pub fn coeffs_i64(c: &[BigInt]) -> Option<Vec<i64>> {
    c.iter().map(|x| x.to_i64()).collect()
}
