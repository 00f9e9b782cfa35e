//! Numerical checks of the discrete orthogonality.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::methods::{ClosedForm, WeightMethod};
use crate::num::{BigComplex, CompensatedSum};
use crate::summation::SummationOptions;
use crate::weights::{WeightContext, WeightTable};

/// Number of trailing terms used to extrapolate a truncated sum.
const TAIL_FIT_TERMS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct GramReport {
    pub nmax: usize,
    /// Number of nodes summed over.
    pub truncation: usize,
    /// `gram[n][m] = Σ_k u_n(x_k) u_m(x_k) r_k`.
    pub gram: Vec<Vec<BigComplex>>,
    pub offdiag_max: f64,
    /// `|S_nn / K_n - 1|`, or `|S_nn|` where `K_n = 0`.
    pub diag_rel_err: Vec<f64>,
    /// Largest estimated contribution of the omitted nodes, including the
    /// summation error of the weights themselves.
    pub tail_allowance: f64,
    /// `K_n = α_1 ⋯ α_n`.
    pub norms: Vec<BigComplex>,
}

impl GramReport {
    pub fn passed(&self, tol: f64) -> bool {
        let bound = tol + self.tail_allowance;
        self.offdiag_max <= bound && self.diag_rel_err.iter().all(|&e| e <= bound)
    }
}

/// Extrapolated tail of a sum whose last terms are `terms`, assumed to
/// decay like `C k^(-σ)`. Infinite when they do not decay fast enough.
pub fn polynomial_tail(terms: &[(usize, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = terms
        .iter()
        .filter(|(k, t)| *k > 0 && *t > 0.0 && t.is_finite())
        .map(|&(k, t)| ((k as f64).ln(), t.ln()))
        .collect();
    if pts.is_empty() {
        // every trailing term vanishes
        return if terms.iter().all(|(_, t)| *t == 0.0) {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let last_k = terms.last().map(|(k, _)| *k as f64 + 1.0).unwrap_or(1.0);
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return f64::INFINITY;
    }
    let sigma = -sxy / sxx;
    if sigma <= 1.0 {
        return f64::INFINITY;
    }
    let ln_c = my + sigma * mx;
    (ln_c + (1.0 - sigma) * last_k.ln()).exp() / (sigma - 1.0)
}

fn first_failure(table: &WeightTable) -> Option<Error> {
    table.entries.iter().find_map(|e| match &e.result {
        Err(err) => Some(err.clone()),
        Ok(v) if !v.status.is_ok() => Some(Error::NotConverged(format!(
            "weight r_{} ended with status {}",
            e.k, v.status
        ))),
        Ok(_) => None,
    })
}

/// Number of nodes that actually enter a sum truncated at `k`.
fn effective_truncation(ctx: &WeightContext, k: usize) -> usize {
    ctx.finite_size().map_or(k, |n| n.min(k))
}

/// Gram matrix from a precomputed weight table.
pub fn gram_from_table(ctx: &WeightContext, table: &WeightTable, nmax: usize) -> Result<GramReport> {
    if let Some(e) = first_failure(table) {
        return Err(e);
    }
    let family = &ctx.family;
    let prec = family.prec();
    let kk = table.count;
    let u: Vec<Vec<BigComplex>> = table
        .entries
        .par_iter()
        .map(|e| family.u_values(nmax, &e.node))
        .collect::<Result<_>>()?;
    let r: Vec<&BigComplex> = table.entries.iter().map(|e| e.value().unwrap()).collect();
    let weight_err: Vec<f64> = table
        .entries
        .iter()
        .map(|e| e.result.as_ref().map(|v| v.tail_estimate).unwrap_or(f64::INFINITY))
        .collect();
    let finite = table.finite_family.is_some_and(|n| n <= kk);

    let pairs: Vec<(usize, usize)> = (0..=nmax).flat_map(|n| (n..=nmax).map(move |m| (n, m))).collect();
    let entries: Vec<(usize, usize, BigComplex, f64)> = pairs
        .par_iter()
        .map(|&(n, m)| {
            let mut acc = CompensatedSum::new(prec);
            let mut tail_terms = Vec::with_capacity(TAIL_FIT_TERMS);
            let mut err = 0.0;
            for k in 0..kk {
                let um = &u[k][n] * &u[k][m];
                let t = &um * r[k];
                err += um.abs_f64() * weight_err[k];
                if k + TAIL_FIT_TERMS >= kk {
                    tail_terms.push((k, t.abs_f64()));
                }
                acc.add(&t);
            }
            let tail = if finite { 0.0 } else { polynomial_tail(&tail_terms) };
            (n, m, acc.value(), tail + err)
        })
        .collect();

    let mut gram = vec![vec![BigComplex::zero(prec); nmax + 1]; nmax + 1];
    let mut tail_allowance: f64 = 0.0;
    for (n, m, v, tail) in entries {
        tail_allowance = tail_allowance.max(tail);
        gram[m][n] = v.clone();
        gram[n][m] = v;
    }
    let norms: Vec<BigComplex> = (0..=nmax).map(|n| family.norm_k(n)).collect::<Result<_>>()?;
    let offdiag_max = (0..=nmax)
        .flat_map(|n| (0..n).map(move |m| (n, m)))
        .map(|(n, m)| gram[n][m].abs_f64())
        .fold(0.0, f64::max);
    let diag_rel_err = (0..=nmax)
        .map(|n| {
            if norms[n].is_zero() {
                gram[n][n].abs_f64()
            } else {
                (&(&gram[n][n] / &norms[n]) - &BigComplex::one(prec)).abs_f64()
            }
        })
        .collect();
    Ok(GramReport {
        nmax,
        truncation: kk,
        gram,
        offdiag_max,
        diag_rel_err,
        tail_allowance,
        norms,
    })
}

/// `S_nm = Σ_{k<K} u_n(x_k) u_m(x_k) r_k` for `n, m <= nmax`, with the
/// weights from their closed forms.
pub fn gram_matrix(ctx: &WeightContext, nmax: usize, k: usize, opts: &SummationOptions) -> Result<GramReport> {
    gram_matrix_with(ctx, &ClosedForm, nmax, k, opts)
}

pub fn gram_matrix_with(
    ctx: &WeightContext,
    method: &dyn WeightMethod,
    nmax: usize,
    k: usize,
    opts: &SummationOptions,
) -> Result<GramReport> {
    if k == 0 {
        return Err(Error::InvalidParams("truncation K must be at least 1".into()));
    }
    ctx.canonical()?;
    let table = method.table(ctx, Some(effective_truncation(ctx, k)), opts);
    gram_from_table(ctx, &table, nmax)
}

/// `|Σ_{j=k}^{K-1} v_k(x_j) r_j - m_k|` for `k <= kmax`.
pub fn moment_recovery(ctx: &WeightContext, kmax: usize, k: usize, opts: &SummationOptions) -> Result<Vec<f64>> {
    ctx.canonical()?;
    let table = ClosedForm.table(ctx, Some(effective_truncation(ctx, k)), opts);
    moment_recovery_from_table(ctx, &table, kmax)
}

pub fn moment_recovery_from_table(ctx: &WeightContext, table: &WeightTable, kmax: usize) -> Result<Vec<f64>> {
    if let Some(e) = first_failure(table) {
        return Err(e);
    }
    let family = &ctx.family;
    (0..=kmax)
        .into_par_iter()
        .map(|k| {
            let mut acc = CompensatedSum::new(family.prec());
            for e in table.entries.iter().skip(k) {
                acc.add(&(&family.v_eval(k, &e.node) * e.value().unwrap()));
            }
            Ok((&acc.value() - &family.moment(k)?).abs_f64())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilyName};

    const P: u32 = 256;

    fn ctx(name: FamilyName, args: &[(&str, &str)]) -> WeightContext {
        WeightContext::new(make_family(name, args, P).unwrap().params)
    }

    #[test]
    fn polynomial_tail_of_power_law() {
        let terms: Vec<(usize, f64)> = (90..100).map(|k| (k, (k as f64).powi(-3))).collect();
        // Σ_{k≥100} k^-3 ≈ 100^-2 / 2
        let t = polynomial_tail(&terms);
        assert!((t / 5.0e-5 - 1.0).abs() < 0.02, "{t}");
        let slow: Vec<(usize, f64)> = (90..100).map(|k| (k, 1.0 / k as f64)).collect();
        assert!(polynomial_tail(&slow).is_infinite());
        assert_eq!(polynomial_tail(&[(3, 0.0), (4, 0.0)]), 0.0);
    }

    #[test]
    fn hahn_gram_is_exact() {
        let h = ctx(FamilyName::Hahn, &[("alpha", "0"), ("beta", "0"), ("N", "2")]);
        let rep = gram_matrix(&h, 2, 3, &SummationOptions::default()).unwrap();
        assert!(rep.offdiag_max < 1e-70);
        assert!(rep.gram[0][0].approx_eq(&BigComplex::one(P)));
        assert_eq!(rep.tail_allowance, 0.0);
        assert!(rep.passed(1e-30));
    }

    #[test]
    fn charlier_gram() {
        let ch = ctx(FamilyName::Charlier, &[("a", "1")]);
        let rep = gram_matrix(&ch, 4, 60, &SummationOptions::default()).unwrap();
        for e in &rep.diag_rel_err {
            assert!(*e < 1e-20);
        }
        assert!(rep.passed(1e-20));
    }

    #[test]
    fn gram_zero_is_sum_check() {
        let ch = ctx(FamilyName::Meixner, &[("c", "1/3"), ("beta", "2")]);
        let opts = SummationOptions::default();
        let rep = gram_matrix(&ch, 0, 15, &opts).unwrap();
        let table = crate::weights::weight_table(&ch, Some(15), &opts);
        assert!(rep.gram[0][0].approx_eq(&table.sum_check));
    }

    #[test]
    fn moment_recovery_examples() {
        let opts = SummationOptions::default();
        let h = ctx(FamilyName::Hahn, &[("alpha", "0"), ("beta", "0"), ("N", "2")]);
        for r in moment_recovery(&h, 2, 3, &opts).unwrap() {
            assert!(r < 1e-70);
        }
        let ch = ctx(FamilyName::Charlier, &[("a", "1")]);
        let res = moment_recovery(&ch, 3, 60, &opts).unwrap();
        assert!(res[3] < 1e-20);
        let table = crate::weights::weight_table(&ch, Some(60), &opts);
        let dev = (&table.sum_check - &BigComplex::one(P)).abs_f64();
        assert!((res[0] - dev).abs() <= 1e-70);
    }

    #[test]
    fn divergent_family_is_rejected() {
        let m = ctx(FamilyName::Meixner, &[("c", "2"), ("beta", "1")]);
        let e = gram_matrix(&m, 2, 10, &SummationOptions::default()).unwrap_err();
        assert_eq!(e.kind(), "convergence_condition");
    }
}
