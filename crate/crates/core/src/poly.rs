//! Low-degree polynomials over [`BigComplex`] and a closed-form root finder
//! for degree at most three.

use crate::num::BigComplex;

/// Coefficients in ascending order: `coeffs[i]` multiplies `X^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<BigComplex>,
}

impl Poly {
    pub fn new(coeffs: Vec<BigComplex>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: BigComplex) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `c0 + c1 X + c2 X²` evaluated at `X + shift` for integer `shift`,
    /// re-expanded in powers of `X`.
    pub fn quadratic_shifted(c0: &BigComplex, c1: &BigComplex, c2: &BigComplex, shift: i64) -> Self {
        // c2 (X+s)² + c1 (X+s) + c0
        let s = shift;
        let k0 = &(c0 + &c1.mul_i64(s)) + &c2.mul_i64(s).mul_i64(s);
        let k1 = c1 + &c2.mul_i64(2 * s);
        Self::new(vec![k0, k1, c2.clone()])
    }

    pub fn prec(&self) -> u32 {
        self.coeffs
            .iter()
            .map(|c| c.prec())
            .max()
            .unwrap_or(crate::num::DEFAULT_PRECISION)
    }

    /// Drops leading coefficients that are zero or negligible against the
    /// largest coefficient.
    pub fn trimmed(&self) -> Self {
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.abs())
            .fold(None::<rug::Float>, |acc, a| match acc {
                Some(m) if m >= a => Some(m),
                _ => Some(a),
            });
        let mut coeffs = self.coeffs.clone();
        if let Some(scale) = scale {
            while coeffs.len() > 1 {
                let last = coeffs.last().unwrap();
                if last.is_zero() || (!scale.is_zero() && last.negligible_against(&scale)) {
                    coeffs.pop();
                } else {
                    break;
                }
            }
        }
        Self { coeffs }
    }

    /// Degree after trimming; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.trimmed().coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.trimmed().coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, x: &BigComplex) -> BigComplex {
        let mut acc = BigComplex::zero(self.prec().max(x.prec()));
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let prec = self.prec().max(other.prec());
        let zero = BigComplex::zero(prec);
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                BigComplex::cancelling_sum(a, b)
            })
            .collect();
        Poly { coeffs }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let prec = self.prec().max(other.prec());
        let mut coeffs = vec![BigComplex::zero(prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly { coeffs }
    }

    /// Leading coefficient and the one below it (zero if absent), after
    /// trimming.
    pub fn leading_pair(&self) -> (BigComplex, BigComplex) {
        let t = self.trimmed();
        let n = t.coeffs.len();
        let lead = t.coeffs[n - 1].clone();
        let sub = if n >= 2 {
            t.coeffs[n - 2].clone()
        } else {
            BigComplex::zero(lead.prec())
        };
        (lead, sub)
    }

    /// All roots (with multiplicity) of a polynomial of degree at most 3.
    /// Returns `None` for higher degree or for the zero polynomial.
    pub fn roots(&self) -> Option<Vec<BigComplex>> {
        let t = self.trimmed();
        match t.coeffs.len() {
            1 => {
                if t.coeffs[0].is_zero() {
                    None
                } else {
                    Some(Vec::new())
                }
            }
            2 => Some(vec![-(&t.coeffs[0] / &t.coeffs[1])]),
            3 => {
                let a = &t.coeffs[2];
                Some(quadratic_roots(&(&t.coeffs[1] / a), &(&t.coeffs[0] / a)))
            }
            4 => {
                let a = &t.coeffs[3];
                Some(cubic_roots(
                    &(&t.coeffs[2] / a),
                    &(&t.coeffs[1] / a),
                    &(&t.coeffs[0] / a),
                ))
            }
            _ => None,
        }
    }
}

/// Roots of `w² + b w + c`, computed without cancellation.
pub fn quadratic_roots(b: &BigComplex, c: &BigComplex) -> Vec<BigComplex> {
    let prec = b.prec().max(c.prec());
    let disc = (&b.square() - &c.mul_i64(4)).sqrt();
    // q = -(b + sign·sqrt(disc))/2 with the sign avoiding cancellation
    let plus = b + &disc;
    let minus = b - &disc;
    let big = if plus.abs() >= minus.abs() { plus } else { minus };
    if big.is_zero() {
        let z = BigComplex::zero(prec);
        return vec![z.clone(), z];
    }
    let q = (-big).div_i64(2);
    vec![q.clone(), c / &q]
}

/// Roots of the monic cubic `s³ + b s² + c s + d` by Cardano's formula.
pub fn cubic_roots(b: &BigComplex, c: &BigComplex, d: &BigComplex) -> Vec<BigComplex> {
    let prec = b.prec().max(c.prec()).max(d.prec());
    let shift = b.div_i64(3);
    // s = w - b/3:  w³ + P w + Q = 0
    let p = c - &b.square().div_i64(3);
    let q = &(&(&b.square() * b).mul_i64(2).div_i64(27) - &(b * c).div_i64(3)) + d;
    let half_q = q.div_i64(2);
    let disc = (&half_q.square() + &(&p.square() * &p).div_i64(27)).sqrt();
    let u3a = &(-&half_q) + &disc;
    let u3b = &(-&half_q) - &disc;
    let u3 = if u3a.abs() >= u3b.abs() { u3a } else { u3b };
    let omega = {
        // e^{2πi/3}
        let half = BigComplex::from_ratio(-1, 2, prec);
        let s3 = BigComplex::from_i64(3, prec).sqrt().div_i64(2);
        &half + &(&BigComplex::i(prec) * &s3)
    };
    if u3.is_zero() {
        let r = -&shift;
        return vec![r.clone(), r.clone(), r];
    }
    let u = u3.cbrt();
    let mut roots = Vec::with_capacity(3);
    let mut uk = u;
    for _ in 0..3 {
        let w = &uk - &(&p / &uk.mul_i64(3));
        roots.push(polish_cubic(&(&w - &shift), b, c, d));
        uk = &uk * &omega;
    }
    roots
}

/// Two Newton steps on `s³ + b s² + c s + d`, skipped near a multiple root.
fn polish_cubic(s: &BigComplex, b: &BigComplex, c: &BigComplex, d: &BigComplex) -> BigComplex {
    let mut s = s.clone();
    for _ in 0..2 {
        let f = &(&(&(&s + b) * &s + c) * &s) + d;
        let df = &(&s.square().mul_i64(3) + &(b * &s).mul_i64(2)) + c;
        if df.is_zero() {
            break;
        }
        let step = &f / &df;
        if step.abs_f64().is_nan() || step.abs() > s.abs() {
            break;
        }
        s -= step;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn c(s: &str) -> BigComplex {
        BigComplex::parse(s, P).unwrap()
    }

    fn contains(roots: &[BigComplex], v: &BigComplex) -> bool {
        roots.iter().any(|r| r.approx_eq(v))
    }

    #[test]
    fn cubic_with_distinct_roots() {
        // (s-1)(s-2)(s+3) = s³ - 7s + 6
        let r = cubic_roots(&c("0"), &c("-7"), &c("6"));
        for v in ["1", "2", "-3"] {
            assert!(contains(&r, &c(v)), "missing {v}");
        }
    }

    #[test]
    fn cubic_with_complex_roots() {
        // (s - i)(s + i)(s - 2) = s³ - 2s² + s - 2
        let r = cubic_roots(&c("-2"), &c("1"), &c("-2"));
        for v in ["i", "-i", "2"] {
            assert!(contains(&r, &c(v)));
        }
    }

    #[test]
    fn cubic_with_triple_root() {
        // (s-2)³ = s³ - 6s² + 12s - 8
        let r = cubic_roots(&c("-6"), &c("12"), &c("-8"));
        for v in &r {
            assert!((v - &c("2")).abs_f64() < 1e-20);
        }
    }

    #[test]
    fn quadratic_roots_without_cancellation() {
        // w² - 1e20 w + 1: small root ≈ 1e-20
        let r = quadratic_roots(&c("-1e20"), &c("1"));
        let small = r.iter().map(|v| v.abs_f64()).fold(f64::INFINITY, f64::min);
        assert!((small - 1e-20).abs() < 1e-35);
    }

    #[test]
    fn poly_roots_by_degree() {
        let lin = Poly::new(vec![c("4"), c("2")]);
        assert_eq!(lin.roots().unwrap(), vec![c("-2")]);
        let padded = Poly::new(vec![c("4"), c("2"), c("0"), c("0")]);
        assert_eq!(padded.degree(), 1);
        assert!(Poly::new(vec![c("0")]).roots().is_none());
    }

    #[test]
    fn shifted_quadratic_matches_direct_eval() {
        let (c0, c1, c2) = (c("3"), c("-2"), c("1/2"));
        let p = Poly::quadratic_shifted(&c0, &c1, &c2, -1);
        let x = c("7");
        let direct = {
            let y = c("6");
            &(&c0 + &(&c1 * &y)) + &(&c2 * &y.square())
        };
        assert!(p.eval(&x).approx_eq(&direct));
    }

    #[test]
    fn mul_and_add() {
        let a = Poly::new(vec![c("1"), c("1")]);
        let b = Poly::new(vec![c("-1"), c("1")]);
        assert_eq!(a.mul(&b).coeffs, vec![c("-1"), c("0"), c("1")]);
        assert_eq!(a.add(&b).coeffs, vec![c("0"), c("2")]);
    }
}
