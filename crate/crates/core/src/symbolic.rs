//! Exact univariate computer algebra in the sparsity `p0`: dense
//! polynomials with arbitrary-precision rational coefficients, and
//! quotients of two such polynomials kept in a canonical form (GCD-reduced,
//! monic denominator) so that equality is plain coefficient equality.
//!
//! Every probability expression in this crate is carried symbolically by
//! these types; floating point only ever appears at the final evaluation
//! step.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymbolicError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd of two zero polynomials is undefined")]
    GcdOfZeroInputs,
    #[error("denominator vanishes at p0 = {at}")]
    PoleAtPoint { at: String },
    #[error("cannot parse rational number {0:?}")]
    ParseRational(String),
    #[error("malformed polynomial serialization: {0}")]
    Deserialize(String),
}

/// Convenience constructor for exact rationals in tests and literals.
pub fn rat(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parse an exact rational from `"a/b"`, a decimal such as `"0.7"` (taken
/// as the exact rational it denotes, not the nearest float), or an integer.
pub fn parse_rational(text: &str) -> Result<BigRational, SymbolicError> {
    let bad = || SymbolicError::ParseRational(text.to_string());
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: BigInt = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac: BigInt = frac_part.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mut value = BigRational::new(int.abs() * &scale + frac, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Dense univariate polynomial in `p0` with exact rational coefficients,
/// stored ascending by degree with no trailing zero (the zero polynomial is
/// the empty list).
#[derive(Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalPoly[{}]", self.render())
    }
}

impl RationalPoly {
    pub fn zero() -> RationalPoly {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn one() -> RationalPoly {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> RationalPoly {
        Self::from_coeffs(vec![c])
    }

    /// The indeterminate `p0` itself.
    pub fn p0() -> RationalPoly {
        Self::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn monomial(coeff: BigRational, degree: usize) -> RationalPoly {
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        coeffs[degree] = coeff;
        Self::from_coeffs(coeffs)
    }

    /// Ascending-degree coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> RationalPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `p0^degree` (zero beyond the stored length).
    pub fn coeff(&self, degree: usize) -> BigRational {
        self.coeffs.get(degree).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> RationalPoly {
        RationalPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &RationalPoly) -> RationalPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, factor: &BigRational) -> RationalPoly {
        if factor.is_zero() {
            return Self::zero();
        }
        RationalPoly {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Multiply by `p0^shift`.
    pub fn shift_up(&self, shift: usize) -> RationalPoly {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        RationalPoly { coeffs }
    }

    pub fn pow(&self, exp: usize) -> RationalPoly {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn monic(&self) -> RationalPoly {
        match self.leading_coeff() {
            None => Self::zero(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    /// Quotient and remainder of division by `divisor`.
    pub fn div_rem(
        &self,
        divisor: &RationalPoly,
    ) -> Result<(RationalPoly, RationalPoly), SymbolicError> {
        let d_deg = divisor.degree().ok_or(SymbolicError::DivisionByZero)?;
        let d_lc = divisor.leading_coeff().expect("nonzero divisor");
        let mut rem = self.coeffs.clone();
        if rem.len() <= d_deg {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![BigRational::zero(); rem.len() - d_deg];
        while rem.len() > d_deg {
            let r_deg = rem.len() - 1;
            let factor = rem.last().expect("nonempty") / d_lc;
            let offset = r_deg - d_deg;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[offset + i] -= &factor * c;
            }
            quot[offset] = factor;
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Division known to be exact; panics if a remainder is left, which
    /// would indicate a broken GCD.
    fn div_exact(&self, divisor: &RationalPoly) -> RationalPoly {
        let (q, r) = self.div_rem(divisor).expect("nonzero divisor");
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor by the Euclidean algorithm. Each
    /// remainder is rescaled to monic to keep coefficient growth down.
    pub fn gcd(&self, other: &RationalPoly) -> Result<RationalPoly, SymbolicError> {
        if self.is_zero() && other.is_zero() {
            return Err(SymbolicError::GcdOfZeroInputs);
        }
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        Ok(a.monic())
    }

    /// Render in descending powers, e.g. `-24p0^9 + 144p0^8 - 90p0^3`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (degree, coeff) in self.coeffs.iter().enumerate().rev() {
            if coeff.is_zero() {
                continue;
            }
            let negative = coeff.is_negative();
            let magnitude = coeff.abs();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            match degree {
                0 => out.push_str(&if magnitude.is_integer() {
                    magnitude.numer().to_string()
                } else {
                    format!("{}/{}", magnitude.numer(), magnitude.denom())
                }),
                _ => {
                    if !magnitude.is_one() {
                        // Parenthesized when fractional so the coefficient
                        // reads unambiguously next to p0.
                        out.push_str(&if magnitude.is_integer() {
                            magnitude.numer().to_string()
                        } else {
                            format!("({}/{})", magnitude.numer(), magnitude.denom())
                        });
                    }
                    out.push_str("p0");
                    if degree > 1 {
                        out.push('^');
                        out.push_str(&degree.to_string());
                    }
                }
            }
        }
        out
    }
}

/// Quotient of two [`RationalPoly`]. Canonical: the denominator is monic
/// and coprime to the numerator, and zero is represented as `0/1`, so two
/// equal rational functions have identical coefficient lists.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFn {
    num: RationalPoly,
    den: RationalPoly,
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFn[{}]", self.render())
    }
}

impl RationalFn {
    pub fn new(num: RationalPoly, den: RationalPoly) -> Result<RationalFn, SymbolicError> {
        if den.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RationalFn {
                num: RationalPoly::zero(),
                den: RationalPoly::one(),
            });
        }
        let g = num.gcd(&den)?;
        let mut num = num.div_exact(&g);
        let mut den = den.div_exact(&g);
        let lc = den.leading_coeff().expect("nonzero denominator").clone();
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RationalFn { num, den })
    }

    pub fn from_poly(p: RationalPoly) -> RationalFn {
        RationalFn {
            num: p,
            den: RationalPoly::one(),
        }
    }

    pub fn zero() -> RationalFn {
        Self::from_poly(RationalPoly::zero())
    }

    pub fn one() -> RationalFn {
        Self::from_poly(RationalPoly::one())
    }

    pub fn constant(c: BigRational) -> RationalFn {
        Self::from_poly(RationalPoly::constant(c))
    }

    pub fn num(&self) -> &RationalPoly {
        &self.num
    }

    pub fn den(&self) -> &RationalPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the canonical denominator is the constant 1.
    pub fn is_polynomial(&self) -> bool {
        self.den == RationalPoly::one()
    }

    pub fn as_polynomial(&self) -> Option<&RationalPoly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn add(&self, other: &RationalFn) -> RationalFn {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("nonzero denominators")
    }

    pub fn sub(&self, other: &RationalFn) -> RationalFn {
        let num = self.num.mul(&other.den).sub(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("nonzero denominators")
    }

    pub fn mul(&self, other: &RationalFn) -> RationalFn {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominators")
    }

    pub fn div(&self, other: &RationalFn) -> Result<RationalFn, SymbolicError> {
        if other.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        Self::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    /// `1 - self`, the complement used by the full-rank product.
    pub fn one_minus(&self) -> RationalFn {
        Self::one().sub(self)
    }

    /// Exact evaluation; a vanishing denominator is reported as a pole,
    /// which for the probability expressions marks a conditioning event of
    /// probability zero.
    pub fn eval(&self, x: &BigRational) -> Result<BigRational, SymbolicError> {
        let den = self.den.eval(x);
        if den.is_zero() {
            return Err(SymbolicError::PoleAtPoint { at: x.to_string() });
        }
        Ok(self.num.eval(x) / den)
    }

    /// Evaluate at the exact rational a float denotes, rounding the exact
    /// result to the nearest float.
    pub fn eval_f64(&self, x: f64) -> Result<f64, SymbolicError> {
        let exact_x = BigRational::from_float(x)
            .ok_or_else(|| SymbolicError::ParseRational(x.to_string()))?;
        let value = self.eval(&exact_x)?;
        Ok(value.to_f64().expect("finite rational"))
    }

    pub fn render(&self) -> String {
        if self.is_polynomial() {
            self.num.render()
        } else {
            format!("({}) / ({})", self.num.render(), self.den.render())
        }
    }

    /// Machine-readable JSON form: ascending-degree coefficient lists with
    /// each coefficient as an exact `["numerator", "denominator"]` pair.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "num": poly_to_json(&self.num),
            "den": poly_to_json(&self.den),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<RationalFn, SymbolicError> {
        let num = poly_from_json(
            value
                .get("num")
                .ok_or_else(|| SymbolicError::Deserialize("missing \"num\"".into()))?,
        )?;
        let den = poly_from_json(
            value
                .get("den")
                .ok_or_else(|| SymbolicError::Deserialize("missing \"den\"".into()))?,
        )?;
        Self::new(num, den)
    }
}

fn poly_to_json(p: &RationalPoly) -> serde_json::Value {
    serde_json::Value::Array(
        p.coeffs()
            .iter()
            .map(|c| {
                serde_json::Value::Array(vec![
                    serde_json::Value::String(c.numer().to_string()),
                    serde_json::Value::String(c.denom().to_string()),
                ])
            })
            .collect(),
    )
}

fn poly_from_json(value: &serde_json::Value) -> Result<RationalPoly, SymbolicError> {
    let arr = value
        .as_array()
        .ok_or_else(|| SymbolicError::Deserialize("expected coefficient array".into()))?;
    let mut coeffs = Vec::with_capacity(arr.len());
    for pair in arr {
        let parts = pair
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| SymbolicError::Deserialize("expected [num, den] pair".into()))?;
        let numer: BigInt = parts[0]
            .as_str()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| SymbolicError::Deserialize("bad numerator".into()))?;
        let denom: BigInt = parts[1]
            .as_str()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| SymbolicError::Deserialize("bad denominator".into()))?;
        if denom.is_zero() {
            return Err(SymbolicError::Deserialize("zero denominator".into()));
        }
        coeffs.push(BigRational::new(numer, denom));
    }
    Ok(RationalPoly::from_coeffs(coeffs))
}
