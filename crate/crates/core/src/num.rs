//! Multiprecision complex scalar.
//!
//! Every quantity in the crate is a [`BigComplex`]: a pair of MPFR floats
//! sharing one precision. Binary operations round to the larger of the two
//! operand precisions, so a computation started at `p` bits stays at `p`
//! bits unless a caller explicitly raises it with [`BigComplex::with_prec`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::{Constant, Special};
use rug::Float;

use crate::error::{Error, Result};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;
/// Smallest working precision accepted by the public entry points.
pub const MIN_PRECISION: u32 = 64;
/// Largest working precision accepted by the public entry points.
pub const MAX_PRECISION: u32 = 4096;

/// Number of significant decimal digits used when serializing a value held
/// at `prec` bits. Enough to re-parse to the same binary value.
pub fn decimal_digits(prec: u32) -> usize {
    (f64::from(prec) * 0.302).ceil() as usize + 2
}

/// Relative equality tolerance `2^(-prec/2)`.
pub fn rel_tolerance(prec: u32) -> Float {
    let e = -((prec / 2) as i32);
    Float::with_val(64, Float::i_exp(1, e))
}

/// Absolute equality floor `2^(-prec+8)`.
pub fn abs_tolerance(prec: u32) -> Float {
    let e = 8 - prec as i32;
    Float::with_val(64, Float::i_exp(1, e))
}

#[derive(Clone, Debug)]
pub struct BigComplex {
    re: Float,
    im: Float,
}

impl BigComplex {
    pub fn zero(prec: u32) -> Self {
        Self {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    /// The imaginary unit.
    pub fn i(prec: u32) -> Self {
        Self {
            re: Float::new(prec),
            im: Float::with_val(prec, 1),
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, v),
            im: Float::new(prec),
        }
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, v),
            im: Float::new(prec),
        }
    }

    /// Exact rational `num/den` rounded once to `prec` bits.
    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        let mut re = Float::with_val(prec, num);
        re /= den;
        Self {
            re,
            im: Float::new(prec),
        }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        let mut out = Self { re, im };
        out.set_prec(prec);
        out
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        Self {
            re,
            im: Float::new(prec),
        }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    fn set_prec(&mut self, prec: u32) {
        self.re.set_prec(prec);
        self.im.set_prec(prec);
    }

    /// Copy rounded (or exactly widened) to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Modulus `|z|` at the value's own precision.
    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// Modulus as an `f64`; saturates to 0 or infinity outside its range.
    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    /// `log2 |z|`, usable for magnitudes far outside the `f64` range.
    pub fn log2_abs(&self) -> f64 {
        let a = self.abs();
        if a.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (m, e) = a.to_f64_exp();
        m.log2() + f64::from(e)
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn recip(&self) -> Self {
        Self::one(self.prec()) / self
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Integer power by repeated squaring; negative exponents go through the
    /// reciprocal.
    pub fn powi(&self, n: i64) -> Self {
        let prec = self.prec();
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = Self::one(prec);
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result *= &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        result
    }

    /// Argument in `(-pi, pi]`.
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let prec = self.prec();
        if self.is_zero() {
            return Self::zero(prec);
        }
        let wp = prec + 32;
        let re = Float::with_val(wp, &self.re);
        let m = Float::with_val(wp, self.re.hypot_ref(&self.im));
        // sqrt((|z| + re)/2) and sqrt((|z| - re)/2), picking the stable one.
        if re.is_sign_negative() {
            let mut t = Float::with_val(wp, &m - &re);
            t /= 2;
            let t = t.sqrt();
            let mut u = Float::with_val(wp, &self.im);
            u /= &t;
            u /= 2;
            let im = if self.im.is_sign_negative() { -t } else { t };
            let re = u.abs();
            Self::from_parts(Float::with_val(prec, re), Float::with_val(prec, im))
        } else {
            let mut t = Float::with_val(wp, &m + &re);
            t /= 2;
            let t = t.sqrt();
            let mut im = Float::with_val(wp, &self.im);
            im /= &t;
            im /= 2;
            Self::from_parts(Float::with_val(prec, t), Float::with_val(prec, im))
        }
    }

    /// Principal cube root, `|z|^(1/3) · exp(i·arg(z)/3)`.
    pub fn cbrt(&self) -> Self {
        let prec = self.prec();
        if self.is_zero() {
            return Self::zero(prec);
        }
        if self.im.is_zero() && !self.re.is_sign_negative() {
            return Self::from_real(Float::with_val(prec, &self.re).cbrt());
        }
        let wp = prec + 32;
        let m = Float::with_val(wp, self.re.hypot_ref(&self.im)).cbrt();
        let mut a = Float::with_val(wp, self.im.atan2_ref(&self.re));
        a /= 3;
        let (s, c) = a.sin_cos(Float::new(wp));
        Self::from_parts(Float::with_val(prec, &m * &c), Float::with_val(prec, &m * &s))
    }

    /// Complex exponential.
    pub fn exp(&self) -> Self {
        let prec = self.prec();
        let wp = prec + 16;
        let m = Float::with_val(wp, self.re.exp_ref());
        let (s, c) = Float::with_val(wp, &self.im).sin_cos(Float::new(wp));
        Self::from_parts(Float::with_val(prec, &m * &c), Float::with_val(prec, &m * &s))
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let prec = self.prec();
        let wp = prec + 16;
        let m = Float::with_val(wp, self.re.hypot_ref(&self.im)).ln();
        Self::from_parts(Float::with_val(prec, m), self.arg())
    }

    /// Principal power `exp(w · ln z)`; `0^w = 0` for `w ≠ 0`.
    pub fn pow(&self, w: &Self) -> Self {
        if w.is_zero() {
            return Self::one(self.prec());
        }
        if self.is_zero() {
            return Self::zero(self.prec());
        }
        (w * &self.ln()).exp()
    }

    pub fn pi(prec: u32) -> Self {
        Self::from_real(Float::with_val(prec, Constant::Pi))
    }

    pub fn nan(prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, Special::Nan),
            im: Float::with_val(prec, Special::Nan),
        }
    }

    /// `self + n` for a small integer.
    pub fn add_i64(&self, n: i64) -> Self {
        let mut out = self.clone();
        out.re += n;
        out
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        let mut out = self.clone();
        out.re *= n;
        out.im *= n;
        out
    }

    pub fn div_i64(&self, n: i64) -> Self {
        let mut out = self.clone();
        out.re /= n;
        out.im /= n;
        out
    }

    /// Equality under the crate-wide rule: relative `2^(-prec/2)` with an
    /// absolute floor of `2^(-prec+8)`.
    pub fn approx_eq(&self, other: &Self) -> bool {
        let prec = self.prec().min(other.prec());
        let diff = (self - other).abs();
        let scale = self.abs().max(&other.abs()).clone();
        let rel = Float::with_val(prec, &scale * &rel_tolerance(prec));
        let bound = if rel > abs_tolerance(prec) {
            rel
        } else {
            abs_tolerance(prec)
        };
        diff <= bound
    }

    /// True when `self` is zero relative to `scale` under the crate rule.
    pub fn negligible_against(&self, scale: &Float) -> bool {
        let prec = self.prec();
        let rel = Float::with_val(prec, scale * &rel_tolerance(prec));
        let bound = if rel > abs_tolerance(prec) {
            rel
        } else {
            abs_tolerance(prec)
        };
        self.abs() <= bound
    }

    /// `a + b`, snapped to exact zero when the two summands cancel to within
    /// the equality tolerance.
    pub fn cancelling_sum(a: &Self, b: &Self) -> Self {
        let s = a + b;
        let scale = a.abs().max(&b.abs()).clone();
        if !scale.is_zero() && s.negligible_against(&scale) {
            Self::zero(s.prec())
        } else {
            s
        }
    }

    /// If the value is (to tolerance) an integer `n <= 0`, returns `-n`.
    pub fn nonpositive_integer(&self) -> Option<u64> {
        let n = self.nearest_integer()?;
        if n <= 0 {
            Some(n.unsigned_abs())
        } else {
            None
        }
    }

    /// The nearest integer, when the value is within tolerance of it.
    pub fn nearest_integer(&self) -> Option<i64> {
        let prec = self.prec();
        if !self.is_finite() {
            return None;
        }
        let rounded = Float::with_val(prec, self.re.round_ref());
        let n = rounded.to_f64();
        if n.abs() > 9.0e15 {
            return None;
        }
        let cand = Self::from_i64(n as i64, prec);
        if self.approx_eq(&cand) {
            Some(n as i64)
        } else {
            None
        }
    }

    /// Decimal strings for the real and imaginary parts using
    /// [`decimal_digits`] significant digits.
    pub fn to_decimal_strings(&self) -> (String, String) {
        let digits = decimal_digits(self.prec());
        (float_to_decimal(&self.re, digits), float_to_decimal(&self.im, digits))
    }

    /// Parses `"1.5"`, `"-3/4"`, `"2i"`, `"-i"`, `"0.5+2.25i"`, `"1/2-1/3i"`.
    pub fn parse(src: &str, prec: u32) -> Result<Self> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse(src.to_string()));
        }
        let bad = || Error::Parse(src.to_string());
        let (re_part, im_part) = if let Some(body) = s.strip_suffix(['i', 'I']) {
            let bytes = body.as_bytes();
            let mut split = None;
            for idx in (1..bytes.len()).rev() {
                let c = bytes[idx];
                if (c == b'+' || c == b'-') && !matches!(bytes[idx - 1], b'e' | b'E' | b'/') {
                    split = Some(idx);
                    break;
                }
            }
            match split {
                Some(idx) => (&body[..idx], &body[idx..]),
                None => ("0", body),
            }
        } else {
            (s.as_str(), "0")
        };
        let im_part = match im_part {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        let im_part = im_part.strip_suffix('*').unwrap_or(im_part);
        let re = parse_real(re_part, prec).ok_or_else(bad)?;
        let im = parse_real(im_part, prec).ok_or_else(bad)?;
        Ok(Self { re, im })
    }
}

fn parse_real(s: &str, prec: u32) -> Option<Float> {
    let s = s.strip_prefix('+').unwrap_or(s);
    if let Some((num, den)) = s.split_once('/') {
        let n = Float::with_val(prec + 64, Float::parse(num).ok()?);
        let d = Float::with_val(prec + 64, Float::parse(den).ok()?);
        if d.is_zero() {
            return None;
        }
        return Some(Float::with_val(prec, &n / &d));
    }
    let v = Float::with_val(prec, Float::parse(s).ok()?);
    v.is_finite().then_some(v)
}

fn float_to_decimal(f: &Float, digits: usize) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    f.to_string_radix(10, Some(digits))
}

impl PartialEq for BigComplex {
    /// Exact (bitwise-value) equality; use [`BigComplex::approx_eq`] for
    /// tolerance-based comparison.
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or_else(|| decimal_digits(self.prec()));
        let re = float_to_decimal(&self.re, digits);
        if self.im.is_zero() {
            return write!(f, "{re}");
        }
        let im = float_to_decimal(&Float::with_val(self.im.prec(), self.im.abs_ref()), digits);
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        write!(f, "{re}{sign}{im}i")
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -(self.clone())
    }
}

fn add_ref(a: &BigComplex, b: &BigComplex) -> BigComplex {
    let p = a.prec().max(b.prec());
    BigComplex {
        re: Float::with_val(p, &a.re + &b.re),
        im: Float::with_val(p, &a.im + &b.im),
    }
}

fn sub_ref(a: &BigComplex, b: &BigComplex) -> BigComplex {
    let p = a.prec().max(b.prec());
    BigComplex {
        re: Float::with_val(p, &a.re - &b.re),
        im: Float::with_val(p, &a.im - &b.im),
    }
}

fn mul_ref(a: &BigComplex, b: &BigComplex) -> BigComplex {
    let p = a.prec().max(b.prec());
    if a.im.is_zero() && b.im.is_zero() {
        return BigComplex {
            re: Float::with_val(p, &a.re * &b.re),
            im: Float::new(p),
        };
    }
    BigComplex {
        re: Float::with_val(p, &a.re * &b.re - &a.im * &b.im),
        im: Float::with_val(p, &a.re * &b.im + &a.im * &b.re),
    }
}

fn div_ref(a: &BigComplex, b: &BigComplex) -> BigComplex {
    let p = a.prec().max(b.prec());
    if b.im.is_zero() {
        return BigComplex {
            re: Float::with_val(p, &a.re / &b.re),
            im: Float::with_val(p, &a.im / &b.re),
        };
    }
    let wp = p + 16;
    let den = Float::with_val(wp, &b.re * &b.re + &b.im * &b.im);
    let mut re = Float::with_val(wp, &a.re * &b.re + &a.im * &b.im);
    let mut im = Float::with_val(wp, &a.im * &b.re - &a.re * &b.im);
    re /= &den;
    im /= &den;
    BigComplex {
        re: Float::with_val(p, re),
        im: Float::with_val(p, im),
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $f:ident, $atr:ident, $amethod:ident) => {
        impl $tr<&BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &BigComplex) -> BigComplex {
                $f(self, rhs)
            }
        }
        impl $tr<BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                $f(self, &rhs)
            }
        }
        impl $tr<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &BigComplex) -> BigComplex {
                $f(&self, rhs)
            }
        }
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                $f(&self, &rhs)
            }
        }
        impl $atr<&BigComplex> for BigComplex {
            fn $amethod(&mut self, rhs: &BigComplex) {
                *self = $f(self, rhs);
            }
        }
        impl $atr<BigComplex> for BigComplex {
            fn $amethod(&mut self, rhs: BigComplex) {
                *self = $f(self, &rhs);
            }
        }
    };
}

binop!(Add, add, add_ref, AddAssign, add_assign);
binop!(Sub, sub, sub_ref, SubAssign, sub_assign);
binop!(Mul, mul, mul_ref, MulAssign, mul_assign);
binop!(Div, div, div_ref, DivAssign, div_assign);

/// Compensated (Kahan–Babuška) accumulator for long sums.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    sum: BigComplex,
    carry: BigComplex,
}

impl CompensatedSum {
    pub fn new(prec: u32) -> Self {
        Self {
            sum: BigComplex::zero(prec),
            carry: BigComplex::zero(prec),
        }
    }

    pub fn add(&mut self, term: &BigComplex) {
        let t = &self.sum + term;
        let (re_c, im_c) = (
            neumaier(&self.sum.re, &term.re, &t.re),
            neumaier(&self.sum.im, &term.im, &t.im),
        );
        self.carry.re += re_c;
        self.carry.im += im_c;
        self.sum = t;
    }

    pub fn value(&self) -> BigComplex {
        &self.sum + &self.carry
    }
}

fn neumaier(s: &Float, x: &Float, t: &Float) -> Float {
    let p = t.prec();
    if s.cmp_abs(x) != Some(Ordering::Less) {
        let d = Float::with_val(p, s - t);
        Float::with_val(p, &d + x)
    } else {
        let d = Float::with_val(p, x - t);
        Float::with_val(p, &d + s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn c(s: &str) -> BigComplex {
        BigComplex::parse(s, P).unwrap()
    }

    #[test]
    fn parse_forms() {
        assert_eq!(c("3"), BigComplex::from_i64(3, P));
        assert_eq!(c("-3/4"), BigComplex::from_ratio(-3, 4, P));
        assert_eq!(c("i"), BigComplex::i(P));
        assert_eq!(c("-i"), -BigComplex::i(P));
        let z = c("1/2-2.5i");
        assert_eq!(z.re().to_f64(), 0.5);
        assert_eq!(z.im().to_f64(), -2.5);
        let z = c("1e-3+2e+1i");
        assert_eq!(z.re().to_f64(), 1e-3);
        assert_eq!(z.im().to_f64(), 20.0);
        assert!(BigComplex::parse("abc", P).is_err());
        assert!(BigComplex::parse("1/0", P).is_err());
        assert!(BigComplex::parse("", P).is_err());
    }

    #[test]
    fn field_ops() {
        let a = c("1+2i");
        let b = c("3-4i");
        assert_eq!(&a * &b, c("11+2i"));
        assert!((&(&a * &b) / &b).approx_eq(&a));
        assert_eq!(&a - &a, BigComplex::zero(P));
        assert_eq!(a.powi(3), c("-11-2i"));
        assert!(a.powi(-2).approx_eq(&(&a * &a).recip()));
    }

    #[test]
    fn roots_and_exp() {
        for s in ["4", "-4", "3+4i", "-3-4i", "2i", "-7+0.5i"] {
            let z = c(s);
            assert!(z.sqrt().square().approx_eq(&z), "sqrt {s}");
            assert!(z.cbrt().powi(3).approx_eq(&z), "cbrt {s}");
        }
        assert!(c("-4").sqrt().approx_eq(&c("2i")));
        let e = c("1").exp();
        assert!((e.re().to_f64() - std::f64::consts::E).abs() < 1e-15);
        // exp(i pi) = -1
        let ipi = &BigComplex::i(P) * &BigComplex::pi(P);
        assert!(ipi.exp().approx_eq(&c("-1")));
        for s in ["2", "1/3+i", "-5"] {
            assert!(c(s).ln().exp().approx_eq(&c(s)), "ln {s}");
        }
        assert!(c("9").pow(&c("1/2")).approx_eq(&c("3")));
        assert!(c("1/2").pow(&c("3")).approx_eq(&c("1/8")));
    }

    #[test]
    fn tolerance_rule() {
        let one = c("1");
        let mut near = one.clone();
        near += BigComplex::from_real(Float::with_val(P, Float::i_exp(1, -200)));
        assert!(one.approx_eq(&near));
        let mut far = one.clone();
        far += BigComplex::from_real(Float::with_val(P, Float::i_exp(1, -100)));
        assert!(!one.approx_eq(&far));
        assert!(BigComplex::zero(P).approx_eq(&BigComplex::from_real(Float::with_val(P, Float::i_exp(1, -250)))));
    }

    #[test]
    fn integer_detection() {
        assert_eq!(c("-3").nonpositive_integer(), Some(3));
        assert_eq!(c("0").nonpositive_integer(), Some(0));
        assert_eq!(c("2").nonpositive_integer(), None);
        assert_eq!(c("-2.5").nonpositive_integer(), None);
        assert_eq!(c("-2+1i").nonpositive_integer(), None);
        let almost = &c("-5") + &BigComplex::from_real(Float::with_val(P, Float::i_exp(1, -220)));
        assert_eq!(almost.nonpositive_integer(), Some(5));
    }

    #[test]
    fn decimal_round_trip() {
        let z = &c("1/3") + &(&c("2/7") * &BigComplex::i(P));
        let (re, im) = z.to_decimal_strings();
        let back = BigComplex::parse(&format!("{re}{}{im}i", if im.starts_with('-') { "" } else { "+" }), P).unwrap();
        assert_eq!(back, z);
        assert_eq!(decimal_digits(256), 80);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::new(64);
        let big = BigComplex::from_f64(1e30, 64);
        acc.add(&big);
        for _ in 0..1000 {
            acc.add(&BigComplex::one(64));
        }
        acc.add(&-big);
        assert_eq!(acc.value().re().to_f64(), 1000.0);
    }
}
