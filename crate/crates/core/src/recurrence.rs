//! Three-term recurrence `u_{n+1} = (t - β_n) u_n - α_n u_{n-1}` of the
//! monic family, and the norm constants `K_n = α_1 ⋯ α_n`.
//!
//! A term whose `g` factor is zero is dropped before its denominator is
//! looked at. This covers the `h_{-1}` that would otherwise appear in `β_0`
//! and `α_1`, and the last step of a finite family.

use crate::connection::{Family, NewtonPoly};
use crate::error::Result;
use crate::num::BigComplex;

impl Family {
    /// `g_i / (h_j - h_l)`, or exact zero when `g_i = 0`.
    fn g_over_hdiff(&self, i: usize, j: usize, l: usize) -> Result<BigComplex> {
        let g = self.g(i);
        if g.is_zero() {
            return Ok(g);
        }
        Ok(&g / &self.h_diff(j, l)?)
    }

    /// `β_n = x_n + g_{n+1}/(h_n - h_{n+1}) - g_n/(h_{n-1} - h_n)`.
    pub fn beta(&self, n: usize) -> Result<BigComplex> {
        let mut b = &self.x(n) + &self.g_over_hdiff(n + 1, n, n + 1)?;
        if n >= 1 {
            b -= self.g_over_hdiff(n, n - 1, n)?;
        }
        Ok(b)
    }

    /// `α_n` for `n >= 1`; zero when `g_n = 0`.
    pub fn alpha(&self, n: usize) -> Result<BigComplex> {
        assert!(n >= 1, "alpha is defined for n >= 1");
        let lead = self.g_over_hdiff(n, n - 1, n)?;
        if lead.is_zero() {
            return Ok(lead);
        }
        let mut inner = &self.x(n) - &self.x(n - 1);
        if n >= 2 {
            inner += self.g_over_hdiff(n - 1, n - 2, n)?;
        }
        inner -= &lead;
        inner += self.g_over_hdiff(n + 1, n - 1, n + 1)?;
        Ok(&lead * &inner)
    }

    /// Monic `u_n(t)` by the forward recurrence.
    pub fn u_eval(&self, n: usize, t: &BigComplex) -> Result<BigComplex> {
        let prec = self.prec().max(t.prec());
        let mut prev = BigComplex::one(prec);
        if n == 0 {
            return Ok(prev);
        }
        let mut cur = t - &self.beta(0)?;
        for k in 1..n {
            let next = &(&(t - &self.beta(k)?) * &cur) - &(&self.alpha(k)? * &prev);
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// `u_0(t), …, u_n(t)` in one pass.
    pub fn u_values(&self, n: usize, t: &BigComplex) -> Result<Vec<BigComplex>> {
        let prec = self.prec().max(t.prec());
        let mut out = Vec::with_capacity(n + 1);
        out.push(BigComplex::one(prec));
        if n >= 1 {
            out.push(t - &self.beta(0)?);
        }
        for k in 1..n {
            let next = &(&(t - &self.beta(k)?) * &out[k]) - &(&self.alpha(k)? * &out[k - 1]);
            out.push(next);
        }
        Ok(out)
    }

    /// `u_n = Σ_k c_{n,k} v_k`.
    pub fn u_newton_coeffs(&self, n: usize) -> Result<NewtonPoly> {
        Ok(NewtonPoly::new(self.connection_row(n)?))
    }

    /// `K_n = α_1 ⋯ α_n`, with `K_0 = 1`.
    pub fn norm_k(&self, n: usize) -> Result<BigComplex> {
        let mut k = BigComplex::one(self.prec());
        for i in 1..=n {
            k *= self.alpha(i)?;
        }
        Ok(k)
    }

    /// Action of the lattice operator on Newton coordinates:
    /// `D v_k = h_k v_k + g_k v_{k-1}`.
    pub fn apply_operator(&self, coeffs: &[BigComplex]) -> Vec<BigComplex> {
        let n = coeffs.len();
        (0..n)
            .map(|k| {
                let mut v = &coeffs[k] * &self.h(k);
                if k + 1 < n {
                    v += &coeffs[k + 1] * &self.g(k + 1);
                }
                v
            })
            .collect()
    }
}

/// `β_0..β_{n}` and `α_1..α_{n}` up to a horizon, plus the finite-family
/// flag.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceCoeffs {
    pub beta: Vec<BigComplex>,
    /// `alpha[i]` holds `α_{i+1}`.
    pub alpha: Vec<BigComplex>,
    /// Set when some `α_{N+1}` vanishes because `g_{N+1} = 0`: the family
    /// has `N + 1` members and orthogonality only holds up to degree `N`.
    pub finite_size: Option<usize>,
}

impl RecurrenceCoeffs {
    pub fn compute(family: &Family, nmax: usize) -> Result<Self> {
        let mut beta = Vec::with_capacity(nmax + 1);
        let mut alpha = Vec::with_capacity(nmax);
        let mut finite_size = None;
        for n in 0..=nmax {
            beta.push(family.beta(n)?);
            if n >= 1 {
                let a = family.alpha(n)?;
                if a.is_zero() && finite_size.is_none() && family.g(n).is_zero() {
                    finite_size = Some(n);
                }
                alpha.push(a);
            }
        }
        Ok(Self {
            beta,
            alpha,
            finite_size,
        })
    }

    /// `K_0..K_nmax`.
    pub fn norms(&self) -> Vec<BigComplex> {
        let prec = self.beta[0].prec();
        let mut out = vec![BigComplex::one(prec)];
        for a in &self.alpha {
            let next = out.last().unwrap() * a;
            out.push(next);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilyName};
    use crate::lattice::FamilyParams;
    use proptest::prelude::*;

    const P: u32 = 256;

    fn c(s: &str) -> BigComplex {
        BigComplex::parse(s, P).unwrap()
    }

    fn charlier1() -> Family {
        Family::new(FamilyParams::new(c("1"), c("0"), c("0"), c("1"), c("0"), c("0"), c("-1")).unwrap())
    }

    fn preset(name: FamilyName, args: &[(&str, &str)]) -> Family {
        Family::new(make_family(name, args, P).unwrap().params)
    }

    #[test]
    fn beta_examples() {
        let f = charlier1();
        assert_eq!(f.beta(0).unwrap(), c("1"));
        // beta_n = n + a for Charlier
        assert_eq!(f.beta(2).unwrap(), c("3"));
        let first = &f.x(0) + &(&f.g(1) / &(&f.h(0) - &f.h(1)));
        assert_eq!(f.beta(0).unwrap(), first);
    }

    #[test]
    fn alpha_examples() {
        let f = charlier1();
        assert_eq!(f.alpha(1).unwrap(), c("1"));
        assert_eq!(f.alpha(3).unwrap(), c("3"));
        let hahn = preset(FamilyName::Hahn, &[("alpha", "0"), ("beta", "0"), ("N", "2")]);
        assert!(hahn.alpha(3).unwrap().is_zero());
        assert!(!hahn.alpha(2).unwrap().is_zero());
    }

    #[test]
    fn u_eval_examples() {
        let f = charlier1();
        assert_eq!(f.u_eval(0, &c("7+i")).unwrap(), c("1"));
        let b0 = f.beta(0).unwrap();
        assert!(f.u_eval(1, &b0).unwrap().is_zero());
        // beta_0 = 1, beta_1 = 2, alpha_1 = 1: u_2(0) = 2 - 1
        assert_eq!(f.u_eval(2, &c("0")).unwrap(), c("1"));
        let newton = f.u_newton_coeffs(2).unwrap();
        assert_eq!(newton.eval(&f, &c("0")), c("1"));
    }

    #[test]
    fn u_newton_examples() {
        let f = charlier1();
        assert_eq!(f.u_newton_coeffs(0).unwrap().coeffs, vec![c("1")]);
        assert_eq!(f.u_newton_coeffs(2).unwrap().coeffs, vec![c("1"), c("-2"), c("1")]);
        let w = preset(
            FamilyName::Wilson,
            &[("a", "1/2"), ("b", "1/3"), ("c", "1/5"), ("d", "2")],
        );
        let row = w.u_newton_coeffs(1).unwrap().coeffs;
        assert!(row[0].approx_eq(&(&w.g(1) / &(&w.h(1) - &w.h(0)))));
        assert_eq!(row[1], c("1"));
    }

    #[test]
    fn norm_examples() {
        let f = charlier1();
        assert_eq!(f.norm_k(0).unwrap(), c("1"));
        assert_eq!(f.norm_k(3).unwrap(), c("6"));
        let hahn = preset(FamilyName::Hahn, &[("alpha", "0"), ("beta", "0"), ("N", "2")]);
        assert!(hahn.norm_k(3).unwrap().is_zero());
        let rc = RecurrenceCoeffs::compute(&hahn, 4).unwrap();
        assert_eq!(rc.finite_size, Some(3));
        assert!(rc.norms()[3].is_zero());
    }

    #[test]
    fn monic_leading_coefficient() {
        let w = preset(
            FamilyName::ContinuousHahn,
            &[("a", "1/2"), ("b", "3/4"), ("c", "1/3"), ("d", "1")],
        );
        for n in 0..=15 {
            let coeffs = w.u_newton_coeffs(n).unwrap().coeffs;
            assert_eq!(coeffs[n], c("1"));
        }
    }

    fn eigen_check(f: &Family, nmax: usize) {
        for n in 0..=nmax {
            let u = f.u_newton_coeffs(n).unwrap().coeffs;
            let du = f.apply_operator(&u);
            let hn = f.h(n);
            for (a, b) in du.iter().zip(&u) {
                let expect = b * &hn;
                assert!(a.approx_eq(&expect) || (a - &expect).abs_f64() < 1e-60);
            }
        }
    }

    #[test]
    fn eigen_relation_for_presets() {
        eigen_check(&charlier1(), 10);
        eigen_check(
            &preset(
                FamilyName::Wilson,
                &[("a", "1/2"), ("b", "3/4"), ("c", "1"), ("d", "1/3")],
            ),
            10,
        );
        eigen_check(
            &preset(
                FamilyName::ContinuousDualHahn,
                &[("a", "1/4"), ("b", "1/3"), ("c", "1/2")],
            ),
            10,
        );
    }

    fn small_rational() -> impl Strategy<Value = String> {
        (-40i64..40, 1i64..9).prop_map(|(n, d)| format!("{n}/{d}"))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn recurrence_and_newton_evaluation_agree(
            a in prop::collection::vec(small_rational(), 7),
            tr in -5.0f64..5.0,
            ti in -5.0f64..5.0,
        ) {
            let v: Vec<BigComplex> = a.iter().map(|s| c(s)).collect();
            let params = FamilyParams::new(
                v[0].add_i64(41), v[1].clone(), v[2].clone(), v[3].add_i64(50),
                v[4].clone(), v[5].clone(), v[6].clone(),
            );
            prop_assume!(params.is_ok());
            let f = Family::new(params.unwrap());
            let t = BigComplex::from_parts(
                rug::Float::with_val(P, tr), rug::Float::with_val(P, ti));
            for n in 0..=15 {
                let (Ok(rec), Ok(newton)) = (f.u_eval(n, &t), f.u_newton_coeffs(n)) else {
                    return Ok(());
                };
                let nv = newton.eval(&f, &t);
                let scale = rec.abs_f64().max(1.0);
                prop_assert!((&rec - &nv).abs_f64() / scale < 1e-50, "n = {n}");
            }
        }
    }
}
