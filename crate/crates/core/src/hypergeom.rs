//! Generalized hypergeometric series
//! `prefactor · t^power · Σ_j ∏(upper)_j / ∏(lower)_j · (scale t)^j / j!`.

use crate::error::{Error, Result};
use crate::num::BigComplex;
use crate::summation::{sum_series, Regime, SeriesValue, SummationOptions, TermSource, Terms};

/// Shifted factorial `(a)_k = a (a+1) ⋯ (a+k-1)`.
pub fn shifted_factorial(a: &BigComplex, k: usize) -> BigComplex {
    let mut acc = BigComplex::one(a.prec());
    for i in 0..k {
        acc *= a.add_i64(i as i64);
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypSeries {
    pub upper: Vec<BigComplex>,
    pub lower: Vec<BigComplex>,
    pub scale: BigComplex,
    pub prefactor: BigComplex,
    pub prefactor_power: usize,
}

impl HypSeries {
    /// Series with unit prefactor.
    pub fn new(upper: Vec<BigComplex>, lower: Vec<BigComplex>, scale: BigComplex) -> Self {
        let prec = upper
            .iter()
            .chain(&lower)
            .map(|v| v.prec())
            .chain(std::iter::once(scale.prec()))
            .max()
            .unwrap();
        Self {
            upper,
            lower,
            scale,
            prefactor: BigComplex::one(prec),
            prefactor_power: 0,
        }
    }

    pub fn with_prefactor(mut self, prefactor: BigComplex, power: usize) -> Self {
        self.prefactor = prefactor;
        self.prefactor_power = power;
        self
    }

    pub fn prec(&self) -> u32 {
        self.upper
            .iter()
            .chain(&self.lower)
            .chain([&self.scale, &self.prefactor])
            .map(|v| v.prec())
            .max()
            .unwrap()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self {
            upper: self.upper.iter().map(|v| v.with_prec(prec)).collect(),
            lower: self.lower.iter().map(|v| v.with_prec(prec)).collect(),
            scale: self.scale.with_prec(prec),
            prefactor: self.prefactor.with_prec(prec),
            prefactor_power: self.prefactor_power,
        }
    }

    /// `Σ lower - Σ upper`.
    pub fn parametric_excess(&self) -> BigComplex {
        let mut e = BigComplex::zero(self.prec());
        for l in &self.lower {
            e += l;
        }
        for u in &self.upper {
            e -= u;
        }
        e
    }

    /// Smallest `n` such that some upper parameter equals `-n`.
    pub fn termination_degree(&self) -> Option<usize> {
        self.upper
            .iter()
            .filter_map(|u| u.nonpositive_integer())
            .min()
            .map(|n| n as usize)
    }

    /// Fails when some lower parameter `-m` is hit before the series
    /// terminates, i.e. `m < termination degree`.
    pub fn check_defined(&self) -> Result<()> {
        let stop = self.termination_degree();
        for l in &self.lower {
            if let Some(m) = l.nonpositive_integer() {
                if stop.is_none_or(|n| (m as usize) < n) {
                    return Err(Error::UndefinedSeries(format!(
                        "lower parameter {} is a nonpositive integer reached before termination",
                        l
                    )));
                }
            }
        }
        Ok(())
    }

    /// Raw coefficient of `w^j` (without prefactor): `∏(u)_j/∏(l)_j / j!`.
    fn ratio_at(&self, j: usize, stop: Option<usize>) -> BigComplex {
        let prec = self.prec();
        if stop == Some(j) {
            return BigComplex::zero(prec);
        }
        let mut num = BigComplex::one(prec);
        for u in &self.upper {
            num *= u.add_i64(j as i64);
        }
        let mut den = BigComplex::from_i64(j as i64 + 1, prec);
        for l in &self.lower {
            den *= l.add_i64(j as i64);
        }
        &num / &den
    }

    /// First `n` Taylor coefficients in `t` of the full expression,
    /// including `prefactor · t^power`.
    pub fn taylor_coeffs(&self, n: usize) -> Vec<BigComplex> {
        let prec = self.prec();
        let mut out = vec![BigComplex::zero(prec); n];
        let stop = self.termination_degree();
        let mut c = self.prefactor.clone();
        let mut j = 0;
        while self.prefactor_power + j < n {
            out[self.prefactor_power + j] = c.clone();
            c = &(&c * &self.ratio_at(j, stop)) * &self.scale;
            j += 1;
        }
        out
    }

    /// The series of `D_t^k` of the inner sum: parameters shifted by `k`,
    /// prefactor times `∏(upper)_k / ∏(lower)_k · scale^k`.
    pub fn derivative_series(&self, k: usize) -> Result<HypSeries> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.prefactor_power != 0 {
            return Err(Error::Unsupported(
                "derivative of a series carrying a power of t".into(),
            ));
        }
        let mut factor = self.scale.powi(k as i64);
        for u in &self.upper {
            factor *= shifted_factorial(u, k);
        }
        let mut den = BigComplex::one(self.prec());
        for l in &self.lower {
            den *= shifted_factorial(l, k);
        }
        if den.is_zero()
            || self
                .lower
                .iter()
                .any(|l| l.nonpositive_integer().is_some_and(|m| (m as usize) < k))
        {
            return Err(Error::UndefinedSeries(format!(
                "lower parameter collides with a nonpositive integer within {k} derivatives"
            )));
        }
        let shifted = HypSeries {
            upper: self.upper.iter().map(|u| u.add_i64(k as i64)).collect(),
            lower: self.lower.iter().map(|l| l.add_i64(k as i64)).collect(),
            scale: self.scale.clone(),
            prefactor: &(&self.prefactor * &factor) / &den,
            prefactor_power: 0,
        };
        shifted.check_defined()?;
        Ok(shifted)
    }

    /// Asymptotic class of the series at argument `t`.
    pub fn regime_at(&self, t: &BigComplex) -> Regime {
        let w = &self.scale * t;
        if let Some(n) = self.termination_degree() {
            return Regime::Terminating { last: n };
        }
        if w.is_zero() {
            return Regime::Terminating { last: 0 };
        }
        let (p, q) = (self.upper.len(), self.lower.len());
        if p <= q {
            return Regime::Entire;
        }
        if p > q + 1 {
            return Regime::Divergent {
                reason: format!("{p}F{q} series with nonzero argument"),
            };
        }
        let one = BigComplex::one(w.prec());
        let w_abs = BigComplex::from_real(w.abs());
        if w_abs.approx_eq(&one) {
            Regime::UnitArgument {
                excess: self.parametric_excess(),
            }
        } else if w.abs_f64() < 1.0 {
            Regime::Geometric { z_abs: w.abs_f64() }
        } else {
            Regime::Divergent {
                reason: format!("|argument| = {} > 1", w.abs_f64()),
            }
        }
    }

    /// Sums the series at `t`.
    pub fn eval_at(&self, t: &BigComplex, opts: &SummationOptions) -> Result<SeriesValue> {
        self.check_defined()?;
        let src = AtPoint {
            series: self,
            t: t.clone(),
        };
        Ok(sum_series(&src, opts))
    }
}

struct AtPoint<'a> {
    series: &'a HypSeries,
    t: BigComplex,
}

impl TermSource for AtPoint<'_> {
    fn precision(&self) -> u32 {
        self.series.prec().max(self.t.prec())
    }

    fn regime(&self) -> Regime {
        let r = self.series.regime_at(&self.t);
        if let Regime::UnitArgument { excess } = &r {
            if excess.re().is_sign_negative() || excess.re().is_zero() {
                return Regime::Divergent {
                    reason: format!("unit argument with parametric excess {excess}"),
                };
            }
        }
        r
    }

    fn prefactor(&self, prec: u32) -> BigComplex {
        let t = self.t.with_prec(prec);
        &self.series.prefactor.with_prec(prec) * &t.powi(self.series.prefactor_power as i64)
    }

    fn terms(&self, prec: u32) -> Terms<'_> {
        let s = self.series.with_prec(prec);
        let w = &s.scale * &self.t.with_prec(prec);
        let stop = s.termination_degree();
        Terms {
            first: BigComplex::one(prec),
            ratio: Box::new(move |j| &s.ratio_at(j, stop) * &w),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summation::SeriesStatus;

    const P: u32 = 256;

    fn c(s: &str) -> BigComplex {
        BigComplex::parse(s, P).unwrap()
    }

    fn one() -> BigComplex {
        c("1")
    }

    fn close(a: &BigComplex, b: &BigComplex, tol: f64) -> bool {
        (a - b).abs_f64() <= tol * b.abs_f64().max(1.0)
    }

    #[test]
    fn shifted_factorial_examples() {
        assert_eq!(shifted_factorial(&c("3/7+2i"), 0), c("1"));
        assert_eq!(shifted_factorial(&c("1"), 5), c("120"));
        assert!(shifted_factorial(&c("-2"), 3).is_zero());
    }

    #[test]
    fn excess_examples() {
        // 3F2(y1, y2, p+r-y1-y2-1; r, p)
        let (y1, y2, r, p) = (c("1/3"), c("2+i"), c("5/2"), c("7/4"));
        let y3 = &(&(&p + &r) - &(&y1 + &y2)) - &one();
        let s = HypSeries::new(
            vec![y1.clone(), y2.clone(), y3.clone()],
            vec![r.clone(), p.clone()],
            one(),
        );
        assert!(s.parametric_excess().approx_eq(&one()));
        // lower p + k gives excess k + 1
        let k = 4;
        let sk = HypSeries::new(vec![y1, y2, y3], vec![r, p.add_i64(k)], one());
        assert!(sk.parametric_excess().approx_eq(&c("5")));
    }

    #[test]
    fn terminating_examples() {
        let opts = SummationOptions::default();
        let s = HypSeries::new(vec![c("-2"), one()], vec![c("2")], one());
        let v = s.eval_at(&one(), &opts).unwrap();
        assert_eq!(v.status, SeriesStatus::Terminated);
        assert_eq!(v.terms_used, 3);
        assert!(close(&v.value, &c("1/3"), 1e-70));
        // Krawtchouk f0(1) = (1-p)^N
        let k = HypSeries::new(vec![c("-7"), one()], vec![one()], c("3/10"));
        let v = k.eval_at(&one(), &opts).unwrap();
        assert!(close(&v.value, &c("7/10").powi(7), 1e-70));
        assert_eq!(v.tail_estimate, 0.0);
    }

    #[test]
    fn value_at_zero() {
        let s = HypSeries::new(vec![c("1/2"), c("1/3")], vec![c("3/2")], one()).with_prefactor(c("5"), 0);
        let v = s.eval_at(&c("0"), &SummationOptions::default()).unwrap();
        assert_eq!(v.value, c("5"));
    }

    #[test]
    fn derivative_examples() {
        let s = HypSeries::new(vec![c("1/3"), one()], vec![one()], c("2/5"));
        assert_eq!(s.derivative_series(0).unwrap(), s);
        let d = s.derivative_series(1).unwrap();
        assert_eq!(d.upper, vec![c("4/3"), c("2")]);
        assert_eq!(d.lower, vec![c("2")]);
        assert!(d.prefactor.approx_eq(&(&c("1/3") * &c("2/5"))));
    }

    fn formal_derivative(coeffs: &[BigComplex], k: usize) -> Vec<BigComplex> {
        (0..coeffs.len() - k)
            .map(|j| {
                let mut f = coeffs[j + k].clone();
                for i in 0..k {
                    f = f.mul_i64((j + k - i) as i64);
                }
                f
            })
            .collect()
    }

    fn termwise_check(s: &HypSeries) {
        let base = s.taylor_coeffs(36);
        for k in 0..=5 {
            let d = s.derivative_series(k).unwrap().taylor_coeffs(30);
            let expect = formal_derivative(&base, k);
            for (a, b) in d.iter().zip(&expect) {
                assert!(a.approx_eq(b), "k = {k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn derivative_matches_termwise_differentiation() {
        termwise_check(&HypSeries::new(vec![c("1/3"), one()], vec![one()], c("2/5")));
        termwise_check(&HypSeries::new(
            vec![c("1/2+i"), c("3/4"), c("-1/3")],
            vec![c("5/2"), c("7/3-i")],
            one(),
        ));
        termwise_check(&HypSeries::new(vec![], vec![], c("-3")));
    }

    #[test]
    fn second_derivative_prefactor_for_3f2() {
        let (y1, y2, y3, r, p) = (c("1/3"), c("2/3"), c("5/4"), c("2"), c("3/2"));
        let s = HypSeries::new(
            vec![y1.clone(), y2.clone(), y3.clone()],
            vec![r.clone(), p.clone()],
            one(),
        );
        let d = s.derivative_series(2).unwrap();
        let expect = &(&(&shifted_factorial(&y1, 2) * &shifted_factorial(&y2, 2)) * &shifted_factorial(&y3, 2))
            / &(&shifted_factorial(&r, 2) * &shifted_factorial(&p, 2));
        assert!(d.prefactor.approx_eq(&expect));
    }

    #[test]
    fn undefined_series_is_rejected() {
        let s = HypSeries::new(vec![c("1/2")], vec![c("-3")], one());
        assert!(matches!(
            s.eval_at(&c("1/2"), &SummationOptions::default()),
            Err(Error::UndefinedSeries(_))
        ));
        // terminates before reaching the bad lower parameter
        let ok = HypSeries::new(vec![c("-2")], vec![c("-3")], one());
        assert!(ok.check_defined().is_ok());
    }

    #[test]
    fn exponential_series() {
        let s = HypSeries::new(vec![], vec![], c("-1"));
        let v = s.eval_at(&one(), &SummationOptions::default()).unwrap();
        let e = c("-1").exp();
        assert!(close(&v.value, &e, 1e-30));
        assert_eq!(v.status, SeriesStatus::ConvergedByTail);
    }

    #[test]
    fn divergent_unit_argument_fails() {
        let s = HypSeries::new(vec![one(), one()], vec![c("2")], one());
        let v = s.eval_at(&one(), &SummationOptions::default()).unwrap();
        assert_eq!(v.status, SeriesStatus::FailedToConverge);
        let big = HypSeries::new(vec![c("1/2"), one()], vec![c("3")], c("3/2"));
        assert_eq!(
            big.eval_at(&one(), &SummationOptions::default()).unwrap().status,
            SeriesStatus::FailedToConverge
        );
    }

    /// Direct summation at 4x precision with a generous term budget; valid
    /// as an oracle when the excess is large enough for plain summation.
    fn oracle_sum(a: &str, b: &str, cc: &str) -> BigComplex {
        let hp = 4 * P;
        let (a, b, cc) = (
            BigComplex::parse(a, hp).unwrap(),
            BigComplex::parse(b, hp).unwrap(),
            BigComplex::parse(cc, hp).unwrap(),
        );
        let mut sum = crate::num::CompensatedSum::new(hp);
        let mut t = BigComplex::one(hp);
        for j in 0..20_000i64 {
            sum.add(&t);
            t = &(&t * &(&a.add_i64(j) * &b.add_i64(j))) / &(&cc.add_i64(j) * &BigComplex::from_i64(j + 1, hp));
        }
        sum.value()
    }

    #[test]
    fn gauss_sums_against_high_precision_direct_summation() {
        // excess >= 9 so that 20000 direct terms leave < 1e-34 of tail
        let sets = [
            ("1/2", "1/3", "10"),
            ("1/4", "-1/2", "9"),
            ("2", "3", "15"),
            ("1/2+i", "1/2-i", "11"),
            ("-1/3", "1/5", "12"),
            ("3/2", "5/2", "14"),
            ("1", "1", "12"),
            ("2/3", "i", "10+i"),
            ("1/7", "2/7", "10"),
            ("5", "-5/2", "13"),
        ];
        let opts = SummationOptions::default();
        for (a, b, cc) in sets {
            let s = HypSeries::new(vec![c(a), c(b)], vec![c(cc)], one());
            let v = s.eval_at(&one(), &opts).unwrap();
            assert!(v.status.is_ok());
            let o = oracle_sum(a, b, cc).with_prec(P);
            assert!(close(&v.value, &o, 1e-30), "{a},{b};{cc}: {} vs {}", v.value, o);
        }
    }

    #[test]
    fn gauss_sum_with_small_excess_uses_acceleration() {
        // 2F1(1/2, 1/2; 2; 1) = Γ(2)Γ(1)/Γ(3/2)² = 4/π
        let s = HypSeries::new(vec![c("1/2"), c("1/2")], vec![c("2")], one());
        let v = s.eval_at(&one(), &SummationOptions::default()).unwrap();
        assert_eq!(v.status, SeriesStatus::AcceleratedConverged);
        let expect = &c("4") / &BigComplex::pi(P);
        assert!(close(&v.value, &expect, 1e-30), "{}", v.value);
    }
}
