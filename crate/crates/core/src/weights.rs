//! Weights `r_k = f_k(1)` of the discrete orthogonality.
//!
//! Three independent routes are provided:
//! * the closed hypergeometric forms of `f_k`, after recovering the case's
//!   canonical parameters from the seven lattice parameters;
//! * the defining series `f_k(1) = Σ_{j≥k} m_j / v'_{j+1}(x_k)`, summed with
//!   its exact term ratio;
//! * back substitution in the truncated triangular moment system.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::connection::Family;
use crate::error::{Error, Result};
use crate::hypergeom::{shifted_factorial, HypSeries};
use crate::lattice::{CaseId, FamilyParams};
use crate::num::{BigComplex, CompensatedSum};
use crate::poly::{cubic_roots, quadratic_roots, Poly};
use crate::summation::{sum_series, Regime, SeriesStatus, SeriesValue, SummationOptions, TermSource, Terms};

/// Number of Taylor coefficients compared when certifying canonical
/// parameters.
const CERTIFY_COEFFS: usize = 12;

/// Parameters of the closed form of `f_0`, per case.
#[derive(Clone, Debug, PartialEq)]
pub enum CanonicalParams {
    /// `f_0 = 3F2(y1, y2, y3; r, p; t)` with `y3 = p + r - y1 - y2 - 1`.
    Case1 {
        p: BigComplex,
        r: BigComplex,
        y1: BigComplex,
        y2: BigComplex,
    },
    /// `f_0 = 2F1(y1, y2; r; t)`.
    Case2 {
        r: BigComplex,
        y1: BigComplex,
        y2: BigComplex,
    },
    /// `f_0 = 2F1(y1, y2; p; t)`.
    Case3 {
        p: BigComplex,
        y1: BigComplex,
        y2: BigComplex,
    },
    /// `f_0 = 2F1(y, 1; 1; z t) = (1 - z t)^(-y)`.
    Case4 { y: BigComplex, z: BigComplex },
    /// Case 4 with `z = 0`: `f_0 = exp(rate · t)`.
    Case4Exp { rate: BigComplex },
}

impl CanonicalParams {
    pub fn case_id(&self) -> CaseId {
        match self {
            CanonicalParams::Case1 { .. } => CaseId::Case1,
            CanonicalParams::Case2 { .. } => CaseId::Case2,
            CanonicalParams::Case3 { .. } => CaseId::Case3,
            CanonicalParams::Case4 { .. } | CanonicalParams::Case4Exp { .. } => CaseId::Case4,
        }
    }

    /// Named values, for reporting.
    pub fn named(&self) -> Vec<(&'static str, BigComplex)> {
        match self {
            CanonicalParams::Case1 { p, r, y1, y2 } => vec![
                ("p", p.clone()),
                ("r", r.clone()),
                ("y1", y1.clone()),
                ("y2", y2.clone()),
                ("y3", self.y3().unwrap()),
            ],
            CanonicalParams::Case2 { r, y1, y2 } => {
                vec![("r", r.clone()), ("y1", y1.clone()), ("y2", y2.clone())]
            }
            CanonicalParams::Case3 { p, y1, y2 } => {
                vec![("p", p.clone()), ("y1", y1.clone()), ("y2", y2.clone())]
            }
            CanonicalParams::Case4 { y, z } => vec![("y", y.clone()), ("z", z.clone())],
            CanonicalParams::Case4Exp { rate } => vec![("rate", rate.clone())],
        }
    }

    /// Third upper parameter of the Case-1 series.
    pub fn y3(&self) -> Option<BigComplex> {
        match self {
            CanonicalParams::Case1 { p, r, y1, y2 } => Some((&(p + r) - &(y1 + y2)).add_i64(-1)),
            _ => None,
        }
    }

    fn with_prec(&self, prec: u32) -> Self {
        let w = |v: &BigComplex| v.with_prec(prec);
        match self {
            CanonicalParams::Case1 { p, r, y1, y2 } => CanonicalParams::Case1 {
                p: w(p),
                r: w(r),
                y1: w(y1),
                y2: w(y2),
            },
            CanonicalParams::Case2 { r, y1, y2 } => CanonicalParams::Case2 {
                r: w(r),
                y1: w(y1),
                y2: w(y2),
            },
            CanonicalParams::Case3 { p, y1, y2 } => CanonicalParams::Case3 {
                p: w(p),
                y1: w(y1),
                y2: w(y2),
            },
            CanonicalParams::Case4 { y, z } => CanonicalParams::Case4 { y: w(y), z: w(z) },
            CanonicalParams::Case4Exp { rate } => CanonicalParams::Case4Exp { rate: w(rate) },
        }
    }
}

/// First `n` Taylor coefficients of `f_0` straight from its defining series:
/// `m_j / ∏_{i=1}^{j} (x_0 - x_i)`.
pub fn f0_direct_coeffs(family: &Family, n: usize) -> Result<Vec<BigComplex>> {
    (0..n)
        .map(|j| Ok(&family.moment(j)? / &family.v_prime_at_node(j, 0)?))
        .collect()
}

/// `f_k(t) = Σ_{j≥k} m_j / v'_{j+1}(x_k) t^j`, first `n` coefficients.
pub fn fk_direct_coeffs(family: &Family, k: usize, n: usize) -> Result<Vec<BigComplex>> {
    let prec = family.prec();
    (0..n)
        .map(|j| {
            if j < k {
                Ok(BigComplex::zero(prec))
            } else {
                Ok(&family.moment(j)? / &family.v_prime_at_node(j, k)?)
            }
        })
        .collect()
}

fn certify(candidate: &CanonicalParams, direct: &[BigComplex]) -> std::result::Result<(), f64> {
    let series = f0_series(candidate);
    if series.check_defined().is_err() {
        return Err(f64::INFINITY);
    }
    let closed = series.taylor_coeffs(direct.len());
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (a, b) in closed.iter().zip(direct) {
        let scale = a.abs_f64().max(b.abs_f64());
        let diff = (a - b).abs_f64();
        if scale > 0.0 {
            worst = worst.max(diff / scale);
        }
        if !a.approx_eq(b) {
            ok = false;
        }
    }
    if ok {
        Ok(())
    } else {
        Err(worst)
    }
}

/// Recovers the closed-form parameters of `f_0` and certifies them against
/// the first coefficients of the defining series.
pub fn canonicalize(params: &FamilyParams) -> Result<CanonicalParams> {
    let prec = params.prec();
    let family = Family::new(params.clone());
    let direct = f0_direct_coeffs(&family, CERTIFY_COEFFS)?;
    let candidates = candidates(params)?;
    let mut residuals = Vec::new();
    for cand in candidates {
        let cand = cand.with_prec(prec);
        match certify(&cand, &direct) {
            Ok(()) => return Ok(cand),
            Err(r) => residuals.push(r),
        }
    }
    Err(Error::NoRootCertifies { residuals })
}

fn nonzero(v: &BigComplex, what: &str) -> Result<()> {
    if v.is_zero() {
        return Err(Error::InvalidParams(format!("{what} vanishes")));
    }
    Ok(())
}

/// `y1, y2` as the roots of `w² - s w + q`.
fn pair_from_sym(s: &BigComplex, q: &BigComplex) -> (BigComplex, BigComplex) {
    let r = quadratic_roots(&-s, q);
    (r[0].clone(), r[1].clone())
}

fn candidates(params: &FamilyParams) -> Result<Vec<CanonicalParams>> {
    let prec = params.prec();
    match params.case_id() {
        CaseId::Case1 => {
            // extra bits: a near-triple root of the cubic loses two thirds
            let hp = params.with_prec(3 * prec);
            let FamilyParams {
                a1,
                a2,
                b0,
                b1,
                b2,
                d1,
                d2,
            } = &hp;
            nonzero(a2, "a2")?;
            nonzero(b2, "b2")?;
            let r = (a1 / a2).add_i64(1);
            let p = (b1 / b2).add_i64(1);
            let sigma = &p + &r;
            let rm1 = r.add_i64(-1);
            let dd1 = &(&(&(d1 / a2) + &(&rm1 * b0)) / b2) - &(&rm1 * &p.add_i64(-2));
            let dd2 = &(&(d2 / a2) + b0) / b2 + &(&r * &p.add_i64(-1));
            let a = dd2.add_i64(1);
            let sm2 = sigma.add_i64(-2);
            let cb = -(&sigma.mul_i64(2).add_i64(-2));
            let cc = &(&sigma * &sm2) + &a;
            let cd = &(-(&a * &sm2)) + &dd1;
            Ok(cubic_roots(&cb, &cc, &cd)
                .into_iter()
                .map(|s| {
                    let q = &dd2 - &(&s * &(&sigma - &s).add_i64(-1));
                    let (y1, y2) = pair_from_sym(&s, &q);
                    CanonicalParams::Case1 {
                        p: p.clone(),
                        r: r.clone(),
                        y1,
                        y2,
                    }
                })
                .collect())
        }
        CaseId::Case2 => {
            let FamilyParams {
                a1, a2, b0, b1, d1, d2, ..
            } = params;
            nonzero(a2, "a2")?;
            nonzero(b1, "b1")?;
            let r = (a1 / a2).add_i64(1);
            let s = &(&(d2 / a2) + b0) / b1 + &r;
            let rm1 = r.add_i64(-1);
            let q = &(&(&(&(d1 / a2) + &(b0 * &rm1)) / b1) - &rm1) + &s.add_i64(-1);
            let (y1, y2) = pair_from_sym(&s, &q);
            Ok(vec![CanonicalParams::Case2 { r, y1, y2 }])
        }
        CaseId::Case3 => {
            let FamilyParams {
                a1, b0, b1, b2, d1, d2, ..
            } = params;
            nonzero(a1, "a1")?;
            nonzero(b2, "b2")?;
            let p = (b1 / b2).add_i64(1);
            let s = &p.add_i64(-1) + &(d2 / &(a1 * b2));
            // q - s + 1 = (d1/a1 + b0)/b2 - p + 2
            let q = &(&(&(&(d1 / a1) + b0) / b2) - &p).add_i64(2) + &s.add_i64(-1);
            let (y1, y2) = pair_from_sym(&s, &q);
            Ok(vec![CanonicalParams::Case3 { p, y1, y2 }])
        }
        CaseId::Case4 => {
            let FamilyParams { a1, b0, b1, d1, d2, .. } = params;
            nonzero(a1, "a1")?;
            nonzero(b1, "b1")?;
            let a1b1 = a1 * b1;
            let top = &(&(a1 * b0) + d1) + d2;
            let zden = BigComplex::cancelling_sum(&a1b1, d2);
            if zden.is_zero() {
                return Ok(vec![CanonicalParams::Case4Exp { rate: &top / &a1b1 }]);
            }
            let y = &top / &zden;
            let z = &zden / &a1b1;
            let _ = prec;
            Ok(vec![CanonicalParams::Case4 { y, z }])
        }
    }
}

/// Closed form of `f_0`, unit prefactor.
pub fn f0_series(canon: &CanonicalParams) -> HypSeries {
    match canon {
        CanonicalParams::Case1 { p, r, y1, y2 } => HypSeries::new(
            vec![y1.clone(), y2.clone(), canon.y3().unwrap()],
            vec![r.clone(), p.clone()],
            BigComplex::one(p.prec()),
        ),
        CanonicalParams::Case2 { r, y1, y2 } => {
            HypSeries::new(vec![y1.clone(), y2.clone()], vec![r.clone()], BigComplex::one(r.prec()))
        }
        CanonicalParams::Case3 { p, y1, y2 } => {
            HypSeries::new(vec![y1.clone(), y2.clone()], vec![p.clone()], BigComplex::one(p.prec()))
        }
        CanonicalParams::Case4 { y, z } => {
            let one = BigComplex::one(y.prec());
            HypSeries::new(vec![y.clone(), one.clone()], vec![one], z.clone())
        }
        CanonicalParams::Case4Exp { rate } => HypSeries::new(vec![], vec![], rate.clone()),
    }
}

fn sign_over_factorial(k: usize, prec: u32) -> BigComplex {
    let f = shifted_factorial(&BigComplex::one(prec), k).recip();
    if k % 2 == 1 {
        -f
    } else {
        f
    }
}

/// `f_k` as `(-1)^k [ratio] t^k/k! · D_t^k F`, the derivative taken exactly
/// on the series whose lower parameter is already shifted to `p + k`
/// (Cases 1 and 3). At a removable pole of the ratio the explicit form is
/// used instead.
pub fn fk_series(canon: &CanonicalParams, k: usize) -> Result<HypSeries> {
    let prec = f0_series(canon).prec();
    let mut factor = sign_over_factorial(k, prec);
    let base = match canon {
        CanonicalParams::Case1 { p, r, y1, y2 } => {
            let pole = p.add_i64(k as i64 - 1);
            if pole.is_zero() || pole.nonpositive_integer() == Some(0) {
                return fk_series_explicit(canon, k);
            }
            factor = &(&factor * &p.add_i64(2 * k as i64 - 1)) / &pole;
            HypSeries::new(
                vec![y1.clone(), y2.clone(), canon.y3().unwrap()],
                vec![r.clone(), p.add_i64(k as i64)],
                BigComplex::one(prec),
            )
        }
        CanonicalParams::Case3 { p, y1, y2 } => {
            let pole = p.add_i64(k as i64 - 1);
            if pole.is_zero() || pole.nonpositive_integer() == Some(0) {
                return fk_series_explicit(canon, k);
            }
            factor = &(&factor * &p.add_i64(2 * k as i64 - 1)) / &pole;
            HypSeries::new(
                vec![y1.clone(), y2.clone()],
                vec![p.add_i64(k as i64)],
                BigComplex::one(prec),
            )
        }
        _ => f0_series(canon),
    };
    let d = base.derivative_series(k)?;
    let pref = &d.prefactor * &factor;
    Ok(d.with_prefactor(pref, k))
}

/// `f_k` with the derivative written out: shifted parameters and an
/// explicit Pochhammer prefactor.
pub fn fk_series_explicit(canon: &CanonicalParams, k: usize) -> Result<HypSeries> {
    let prec = f0_series(canon).prec();
    let ki = k as i64;
    let sf = |a: &BigComplex| shifted_factorial(a, k);
    let sign = sign_over_factorial(k, prec);
    let (upper, lower, scale, num, den) = match canon {
        CanonicalParams::Case1 { p, r, y1, y2 } => {
            let y3 = canon.y3().unwrap();
            (
                vec![y1.add_i64(ki), y2.add_i64(ki), y3.add_i64(ki)],
                vec![r.add_i64(ki), p.add_i64(2 * ki)],
                BigComplex::one(prec),
                &(&sf(y1) * &sf(y2)) * &sf(&y3),
                &sf(r) * &sf(&p.add_i64(ki - 1)),
            )
        }
        CanonicalParams::Case2 { r, y1, y2 } => (
            vec![y1.add_i64(ki), y2.add_i64(ki)],
            vec![r.add_i64(ki)],
            BigComplex::one(prec),
            &sf(y1) * &sf(y2),
            sf(r),
        ),
        CanonicalParams::Case3 { p, y1, y2 } => (
            vec![y1.add_i64(ki), y2.add_i64(ki)],
            vec![p.add_i64(2 * ki)],
            BigComplex::one(prec),
            &sf(y1) * &sf(y2),
            sf(&p.add_i64(ki - 1)),
        ),
        CanonicalParams::Case4 { y, z } => {
            let one = BigComplex::one(prec);
            (
                vec![y.add_i64(ki), one.add_i64(ki)],
                vec![one.add_i64(ki)],
                z.clone(),
                &sf(y) * &z.powi(ki),
                one,
            )
        }
        CanonicalParams::Case4Exp { rate } => (vec![], vec![], rate.clone(), rate.powi(ki), BigComplex::one(prec)),
    };
    if den.is_zero() {
        return Err(Error::PrefactorPole {
            k,
            detail: "explicit prefactor has a vanishing denominator (node collision)".into(),
        });
    }
    let series = HypSeries::new(upper, lower, scale).with_prefactor(&(&sign * &num) / &den, k);
    series.check_defined()?;
    Ok(series)
}

/// Text of the convergence condition for a case, for diagnostics.
fn condition_text(case: CaseId) -> &'static str {
    match case {
        CaseId::Case1 => "parametric excess 1 (always convergent)",
        CaseId::Case2 => "Re(r - y1 - y2 - k) > 0, i.e. Re(-(a2 b0 + d2)/(a2 b1)) > k",
        CaseId::Case3 => "Re(1 - d2/(a1 b2)) > 0",
        CaseId::Case4 => "|z| < 1 or a terminating series",
    }
}

/// Rejects `f_k(1)` before any summation when its series cannot converge.
pub fn check_convergence(canon: &CanonicalParams, series: &HypSeries, k: usize) -> Result<()> {
    if series.prefactor.is_zero() {
        return Ok(());
    }
    let one = BigComplex::one(series.prec());
    let case = canon.case_id();
    let fail = |detail: String| Error::ConvergenceCondition {
        case: case.to_string(),
        condition: format!("{} fails for k = {k}: {detail}", condition_text(case)),
    };
    match series.regime_at(&one) {
        Regime::Terminating { .. } | Regime::Entire | Regime::Geometric { .. } => Ok(()),
        Regime::UnitArgument { excess } => {
            if excess.re().is_sign_positive() && !excess.re().is_zero() {
                Ok(())
            } else {
                Err(fail(format!("parametric excess {excess}")))
            }
        }
        Regime::Divergent { reason } => Err(fail(reason)),
    }
}

/// A family together with its (lazily certified) canonical parameters.
#[derive(Debug)]
pub struct WeightContext {
    pub family: Family,
    canon: OnceLock<Result<CanonicalParams>>,
}

impl WeightContext {
    pub fn new(params: FamilyParams) -> Self {
        Self {
            family: Family::new(params),
            canon: OnceLock::new(),
        }
    }

    pub fn params(&self) -> &FamilyParams {
        self.family.params()
    }

    pub fn canonical(&self) -> Result<&CanonicalParams> {
        self.canon
            .get_or_init(|| canonicalize(self.family.params()))
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// Size of a finite family: the smallest `n >= 1` with `g_n = 0`.
    pub fn finite_size(&self) -> Option<usize> {
        termination_index(self.family.params())
    }
}

/// Smallest positive integer `n` with `g_n = 0`, found from the integer
/// roots of `g_n / n = x_{n-1}(a1 + a2 n) + d1 + d2 n`.
pub fn termination_index(params: &FamilyParams) -> Option<usize> {
    let x_prev = Poly::quadratic_shifted(&params.b0, &params.b1, &params.b2, -1);
    let h_over_n = Poly::new(vec![params.a1.clone(), params.a2.clone()]);
    let e_over_n = Poly::new(vec![params.d1.clone(), params.d2.clone()]);
    let g_over_n = x_prev.mul(&h_over_n).add(&e_over_n);
    if g_over_n.is_zero() {
        return Some(1);
    }
    let roots = g_over_n.roots()?;
    roots
        .iter()
        .filter_map(|r| {
            let re = r.re().to_f64();
            let n = re.round();
            if (1.0..1e12).contains(&n) && (r - &BigComplex::from_f64(n, r.prec())).abs_f64() < 1e-3 {
                Some(n as usize)
            } else {
                None
            }
        })
        .filter(|&n| params.g(n as u64).is_zero())
        .min()
}

/// `r_k = f_k(1)` through the closed form.
pub fn weight(ctx: &WeightContext, k: usize, opts: &SummationOptions) -> Result<SeriesValue> {
    let canon = ctx.canonical()?;
    let series = fk_series(canon, k)?;
    check_convergence(canon, &series, k)?;
    series.eval_at(&BigComplex::one(series.prec()), opts)
}

/// Series `f_k(1) = Σ_{j≥k} m_j / v'_{j+1}(x_k)` as a term source.
struct DirectSeries<'a> {
    family: &'a Family,
    k: usize,
    finite: Option<usize>,
}

impl DirectSeries<'_> {
    fn first_term(family: &Family, k: usize) -> Result<BigComplex> {
        let m = family.moment(k)?;
        if m.is_zero() {
            return Ok(m);
        }
        Ok(&m / &family.v_prime_at_node(k, k)?)
    }

    /// Numerator and denominator of the term ratio as polynomials in
    /// `J = j + 1`, with the common factor `J` removed.
    fn ratio_polys(&self) -> (Poly, Poly) {
        let p = self.family.params();
        let x_prev = Poly::quadratic_shifted(&p.b0, &p.b1, &p.b2, -1);
        let h_over = Poly::new(vec![p.a1.clone(), p.a2.clone()]);
        let e_over = Poly::new(vec![p.d1.clone(), p.d2.clone()]);
        let num = x_prev.mul(&h_over).add(&e_over);
        let xk = self.family.x(self.k);
        let x_minus = Poly::new(vec![&p.b0 - &xk, p.b1.clone(), p.b2.clone()]);
        let den = h_over.mul(&x_minus);
        (num, den)
    }
}

impl TermSource for DirectSeries<'_> {
    fn precision(&self) -> u32 {
        self.family.prec()
    }

    fn regime(&self) -> Regime {
        if let Some(n) = self.finite {
            return Regime::Terminating {
                last: (n - 1).saturating_sub(self.k),
            };
        }
        let (num, den) = self.ratio_polys();
        let (dn, dd) = (num.degree(), den.degree());
        if num.is_zero() || dn < dd {
            return Regime::Entire;
        }
        if dn > dd {
            return Regime::Divergent {
                reason: "term ratio grows without bound".into(),
            };
        }
        let ((p0, p1), (q0, q1)) = (num.leading_pair(), den.leading_pair());
        let z = &p0 / &q0;
        let one = BigComplex::one(z.prec());
        if BigComplex::from_real(z.abs()).approx_eq(&one) {
            // ratio ~ z (1 - (1 + excess)/J)
            let excess = (&(&q1 / &q0) - &(&p1 / &p0)).add_i64(-1);
            if excess.re().is_sign_negative() || excess.re().is_zero() {
                return Regime::Divergent {
                    reason: format!("unit ratio with excess {excess}"),
                };
            }
            Regime::UnitArgument { excess }
        } else if z.abs_f64() < 1.0 {
            Regime::Geometric { z_abs: z.abs_f64() }
        } else {
            Regime::Divergent {
                reason: format!("|ratio limit| = {}", z.abs_f64()),
            }
        }
    }

    fn prefactor(&self, prec: u32) -> BigComplex {
        if prec == self.family.prec() {
            return Self::first_term(self.family, self.k).unwrap_or_else(|_| BigComplex::nan(prec));
        }
        let f = self.family.with_prec(prec);
        Self::first_term(&f, self.k).unwrap_or_else(|_| BigComplex::nan(prec))
    }

    fn terms(&self, prec: u32) -> Terms<'_> {
        let params = self.family.params().with_prec(prec);
        let xk = params.x(self.k as u64);
        let k = self.k;
        Terms {
            first: BigComplex::one(prec),
            ratio: Box::new(move |i| {
                // term index j = k + i; ratio g_{j+1} / ((h_0 - h_{j+1})(x_k - x_{j+1}))
                let jp = (k + i + 1) as u64;
                let g = params.g(jp);
                if g.is_zero() {
                    return g;
                }
                let den = &(-params.h(jp)) * &(&xk - &params.x(jp));
                &g / &den
            }),
        }
    }
}

/// `r_k` by summing the defining series directly, never touching the case
/// transforms.
pub fn direct_series_weight(family: &Family, k: usize, opts: &SummationOptions) -> Result<SeriesValue> {
    let first = DirectSeries::first_term(family, k)?;
    if first.is_zero() {
        return Ok(SeriesValue::exact(first, 0));
    }
    let finite = termination_index(family.params());
    let src = DirectSeries { family, k, finite };
    if let Regime::Divergent { reason } = src.regime() {
        return Err(Error::ConvergenceCondition {
            case: family.params().case_id().to_string(),
            condition: format!("defining series of r_{k} diverges: {reason}"),
        });
    }
    Ok(sum_series(&src, opts))
}

/// Solves `Σ_{j=k}^{J} v_k(x_j) r_j = m_k` for `k = J, …, 0`.
pub fn weights_oracle(family: &Family, j_max: usize) -> Result<Vec<BigComplex>> {
    let prec = family.prec();
    let nodes: Vec<BigComplex> = (0..=j_max).map(|j| family.x(j)).collect();
    let mut r = vec![BigComplex::zero(prec); j_max + 1];
    for k in (0..=j_max).rev() {
        let mut acc = CompensatedSum::new(prec);
        acc.add(&family.moment(k)?);
        for j in k + 1..=j_max {
            acc.add(&-(&family.v_eval(k, &nodes[j]) * &r[j]));
        }
        let diag = family.v_eval(k, &nodes[k]);
        if diag.is_zero() {
            let i = (0..k).find(|&i| (&nodes[k] - &nodes[i]).is_zero()).unwrap_or(0);
            return Err(Error::NodeCollision { i, j: k });
        }
        r[k] = &acc.value() / &diag;
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightEntry {
    pub k: usize,
    pub node: BigComplex,
    pub result: std::result::Result<SeriesValue, Error>,
}

impl WeightEntry {
    pub fn value(&self) -> Option<&BigComplex> {
        self.result.as_ref().ok().filter(|v| v.status.is_ok()).map(|v| &v.value)
    }

    pub fn is_ok(&self) -> bool {
        self.value().is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    pub entries: Vec<WeightEntry>,
    pub count: usize,
    /// Number of nodes of a finite family.
    pub finite_family: Option<usize>,
    /// `Σ r_k` over the successful entries.
    pub sum_check: BigComplex,
    /// `1 - Σ r_k`: mass left outside the table.
    pub missing_mass: BigComplex,
}

impl WeightTable {
    pub fn all_ok(&self) -> bool {
        self.entries.iter().all(|e| e.is_ok())
    }

    pub fn values(&self) -> Vec<Option<BigComplex>> {
        self.entries.iter().map(|e| e.value().cloned()).collect()
    }
}

/// Default table length for infinite families.
pub const DEFAULT_COUNT: usize = 10;

/// Number of rows a table will hold.
pub fn table_len(finite: Option<usize>, count: Option<usize>) -> usize {
    match (finite, count) {
        (Some(n), Some(c)) => n.min(c),
        (Some(n), None) => n,
        (None, Some(c)) => c,
        (None, None) => DEFAULT_COUNT,
    }
}

/// Weights `k = 0..count` (or the whole finite family), computed in
/// parallel with `per_entry`. Failures are recorded per entry.
pub fn weight_table_with<F>(ctx: &WeightContext, count: Option<usize>, per_entry: F) -> WeightTable
where
    F: Fn(usize) -> Result<SeriesValue> + Sync,
{
    let prec = ctx.family.prec();
    let finite = ctx.finite_size();
    let n = table_len(finite, count);
    let entries: Vec<WeightEntry> = (0..n)
        .into_par_iter()
        .map(|k| WeightEntry {
            k,
            node: ctx.family.x(k),
            result: per_entry(k),
        })
        .collect();
    let mut sum = CompensatedSum::new(prec);
    for e in &entries {
        if let Some(v) = e.value() {
            sum.add(v);
        }
    }
    let sum_check = sum.value();
    let missing_mass = &BigComplex::one(prec) - &sum_check;
    WeightTable {
        entries,
        count: n,
        finite_family: finite,
        sum_check,
        missing_mass,
    }
}

/// [`weight_table_with`] using the closed forms.
pub fn weight_table(ctx: &WeightContext, count: Option<usize>, opts: &SummationOptions) -> WeightTable {
    weight_table_with(ctx, count, |k| weight(ctx, k, opts))
}

/// Sum over `k <= n` of the `t^n` coefficient of `f_k`; zero identically.
pub fn coefficient_cancellation(canon: &CanonicalParams, n: usize) -> Result<BigComplex> {
    let prec = f0_series(canon).prec();
    let mut acc = CompensatedSum::new(prec);
    for k in 0..=n {
        let c = fk_series(canon, k)?.taylor_coeffs(n + 1);
        acc.add(&c[n]);
    }
    Ok(acc.value())
}

/// Whether every entry of `table` succeeded without acceleration failure.
pub fn statuses(table: &WeightTable) -> Vec<Option<SeriesStatus>> {
    table
        .entries
        .iter()
        .map(|e| e.result.as_ref().ok().map(|v| v.status))
        .collect()
}
