//! Summation of series given by a first term and an exact term ratio.
//!
//! The caller classifies the series ([`Regime`]); the engine sums terms,
//! bounds the tail once the ratio has settled, switches to the Levin
//! u-transform for slowly convergent unit-argument series, and doubles the
//! working precision when cancellation eats the requested accuracy.

use std::fmt;

use crate::num::{BigComplex, CompensatedSum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesStatus {
    Terminated,
    ConvergedByTail,
    AcceleratedConverged,
    FailedToConverge,
}

impl SeriesStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesStatus::Terminated => "terminated",
            SeriesStatus::ConvergedByTail => "converged_by_tail",
            SeriesStatus::AcceleratedConverged => "accelerated_converged",
            SeriesStatus::FailedToConverge => "failed_to_converge",
        }
    }

    pub fn is_ok(self) -> bool {
        self != SeriesStatus::FailedToConverge
    }
}

impl fmt::Display for SeriesStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: BigComplex,
    pub terms_used: usize,
    /// Bound on the truncation error of `value` (0 when terminated).
    pub tail_estimate: f64,
    pub status: SeriesStatus,
    pub precision_used: u32,
}

impl SeriesValue {
    pub fn exact(value: BigComplex, terms_used: usize) -> Self {
        let prec = value.prec();
        Self {
            value,
            terms_used,
            tail_estimate: 0.0,
            status: SeriesStatus::Terminated,
            precision_used: prec,
        }
    }

    fn failed(prec: u32, terms_used: usize) -> Self {
        Self {
            value: BigComplex::nan(prec),
            terms_used,
            tail_estimate: f64::INFINITY,
            status: SeriesStatus::FailedToConverge,
            precision_used: prec,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummationOptions {
    /// Target error `tolerance · min(1, |value|)`: absolute for values of
    /// modulus above one, relative below.
    pub tolerance: f64,
    pub max_terms: usize,
    pub max_precision: u32,
    pub levin_max_order: usize,
}

impl Default for SummationOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-30,
            max_terms: 200_000,
            max_precision: 2048,
            levin_max_order: 120,
        }
    }
}

/// Asymptotic class of the term ratio `t_{j+1}/t_j`.
#[derive(Clone, Debug, PartialEq)]
pub enum Regime {
    /// Terms with index above `last` vanish.
    Terminating {
        last: usize,
    },
    /// Ratio tends to zero.
    Entire,
    /// Ratio tends to `z` with `|z| < 1`.
    Geometric {
        z_abs: f64,
    },
    /// Ratio tends to a unimodular `z`; terms decay like `j^(-1-excess)`.
    UnitArgument {
        excess: BigComplex,
    },
    Divergent {
        reason: String,
    },
}

/// Term generator at a fixed precision.
pub struct Terms<'a> {
    pub first: BigComplex,
    pub ratio: Box<dyn FnMut(usize) -> BigComplex + 'a>,
}

/// A series that can be regenerated at any precision.
pub trait TermSource {
    fn precision(&self) -> u32;
    fn regime(&self) -> Regime;
    /// Multiplier applied to the raw sum.
    fn prefactor(&self, prec: u32) -> BigComplex;
    fn terms(&self, prec: u32) -> Terms<'_>;
}

enum Attempt {
    Done(SeriesValue),
    Retry(SeriesValue),
}

/// Sums `src` under `opts`, escalating precision up to `opts.max_precision`.
pub fn sum_series(src: &dyn TermSource, opts: &SummationOptions) -> SeriesValue {
    let base = src.precision();
    let regime = src.regime();
    let mut prec = base;
    loop {
        match attempt(src, &regime, prec, opts) {
            Attempt::Done(mut v) => {
                v.value = v.value.with_prec(base);
                return v;
            }
            Attempt::Retry(partial) => {
                if prec >= opts.max_precision {
                    let mut v = partial;
                    v.status = SeriesStatus::FailedToConverge;
                    v.value = v.value.with_prec(base);
                    return v;
                }
                prec = (prec * 2).min(opts.max_precision.max(base));
            }
        }
    }
}

fn log2_of(v: &BigComplex) -> f64 {
    if v.is_zero() {
        f64::NEG_INFINITY
    } else {
        v.log2_abs()
    }
}

/// `log2` of the tolerance on the raw sum, given `|prefactor|` and the
/// current estimate of the raw sum.
fn log2_tol(opts: &SummationOptions, log2_pref: f64, log2_sum: f64) -> f64 {
    if log2_sum == f64::NEG_INFINITY {
        return opts.tolerance.log2() - log2_pref;
    }
    opts.tolerance.log2() + (-log2_pref).min(log2_sum)
}

/// Bits of cancellation between the largest partial quantity and the
/// result, and the precision that leaves enough bits for the tolerance.
fn precision_is_enough(prec: u32, log2_largest: f64, log2_result: f64, log2_tolerance: f64) -> bool {
    let lost = (log2_largest - log2_result.max(log2_tolerance)).max(0.0);
    let needed = (log2_result.max(log2_tolerance) - log2_tolerance).max(0.0);
    (prec as f64) - lost >= needed + 12.0
}

fn attempt(src: &dyn TermSource, regime: &Regime, prec: u32, opts: &SummationOptions) -> Attempt {
    let pref = src.prefactor(prec);
    if pref.is_zero() {
        return Attempt::Done(SeriesValue::exact(BigComplex::zero(prec), 0));
    }
    if let Regime::Divergent { .. } = regime {
        return Attempt::Done(SeriesValue::failed(prec, 0));
    }
    let log2_pref = log2_of(&pref);
    let Terms { first, mut ratio } = src.terms(prec);
    let finish = |raw: BigComplex, terms: usize, tail: f64, status: SeriesStatus| {
        let value = &raw * &pref;
        let tail_estimate = if tail == 0.0 {
            0.0
        } else {
            (tail.log2() + log2_pref).exp2()
        };
        SeriesValue {
            value,
            terms_used: terms,
            tail_estimate,
            status,
            precision_used: prec,
        }
    };
    if first.is_zero() {
        return Attempt::Done(finish(first, 0, 0.0, SeriesStatus::Terminated));
    }

    let mut sum = CompensatedSum::new(prec);
    let mut term = first;
    let mut log2_largest = f64::NEG_INFINITY;

    if let Regime::Terminating { last } = *regime {
        let mut used = 0;
        for j in 0..=last {
            log2_largest = log2_largest.max(log2_of(&term));
            sum.add(&term);
            used = j + 1;
            if j == last {
                break;
            }
            term = &term * &ratio(j);
            if term.is_zero() {
                break;
            }
        }
        let s = sum.value();
        let tol = log2_tol(opts, log2_pref, log2_of(&s));
        let out = finish(s.clone(), used, 0.0, SeriesStatus::Terminated);
        return if precision_is_enough(prec, log2_largest, log2_of(&s), tol) {
            Attempt::Done(out)
        } else {
            Attempt::Retry(out)
        };
    }

    let (z_abs, excess) = match regime {
        Regime::Entire => (0.0, None),
        Regime::Geometric { z_abs } => (*z_abs, None),
        Regime::UnitArgument { excess } => {
            if excess.re().to_f64() <= 0.0 {
                return Attempt::Done(SeriesValue::failed(prec, 0));
            }
            (1.0, Some(excess.re().to_f64()))
        }
        _ => unreachable!(),
    };

    let mut settled = 0usize;
    let mut n0: Option<usize> = None;
    // Terms and partial sums from n0 on, for the Levin transform.
    let mut tail_terms: Vec<BigComplex> = Vec::new();
    let mut tail_sums: Vec<BigComplex> = Vec::new();
    let mut use_levin = matches!(excess, Some(e) if e <= 2.0);

    let mut j = 0usize;
    loop {
        log2_largest = log2_largest.max(log2_of(&term));
        sum.add(&term);
        if n0.is_some() && use_levin {
            tail_terms.push(term.clone());
            tail_sums.push(sum.value());
            if tail_terms.len() > opts.levin_max_order + 1 {
                break;
            }
        }
        if j >= opts.max_terms {
            let s = sum.value();
            return Attempt::Done(finish(s, j + 1, f64::INFINITY, SeriesStatus::FailedToConverge));
        }
        let r = ratio(j);
        let next = &term * &r;
        if next.is_zero() {
            return Attempt::Done(finish(sum.value(), j + 1, 0.0, SeriesStatus::Terminated));
        }
        let r_abs = r.abs_f64();
        if n0.is_none() {
            settled = if r_abs < 1.0 { settled + 1 } else { 0 };
            if settled >= 3 {
                n0 = Some(j + 1);
                if let Some(e) = excess {
                    if !use_levin
                        && predicted_terms(&next, j + 1, e, opts, log2_pref, &sum.value()) > opts.max_terms as f64
                    {
                        use_levin = true;
                    }
                }
            }
        }
        if n0.is_some() && !use_levin {
            let s = sum.value();
            let log2_s = log2_of(&s);
            let tol = log2_tol(opts, log2_pref, log2_s);
            let log2_tail = match excess {
                None => {
                    let rho = r_abs.max(z_abs);
                    if rho < 1.0 {
                        log2_of(&next) - (1.0 - rho).log2()
                    } else {
                        f64::INFINITY
                    }
                }
                Some(e) => log2_of(&next) + ((j + 1) as f64).log2() - e.log2(),
            };
            if log2_tail <= tol {
                let mut s = sum.value();
                s += &next;
                let out = finish(s, j + 2, log2_tail.exp2(), SeriesStatus::ConvergedByTail);
                return if precision_is_enough(prec, log2_largest, log2_s, tol) {
                    Attempt::Done(out)
                } else {
                    Attempt::Retry(out)
                };
            }
        }
        term = next;
        j += 1;
    }

    let n0 = n0.expect("levin tail collected after settling");
    match levin(&tail_terms, &tail_sums, n0, prec, opts, log2_pref, log2_largest) {
        LevinOutcome::Accepted { value, diff, order } => {
            Attempt::Done(finish(value, n0 + order + 1, diff, SeriesStatus::AcceleratedConverged))
        }
        LevinOutcome::Rejected { best, diff } => Attempt::Retry(finish(
            best,
            n0 + tail_terms.len(),
            diff,
            SeriesStatus::FailedToConverge,
        )),
    }
}

/// Number of terms direct summation would need under `|t_j| ~ C j^(-1-e)`.
fn predicted_terms(
    term: &BigComplex,
    j: usize,
    e: f64,
    opts: &SummationOptions,
    log2_pref: f64,
    partial: &BigComplex,
) -> f64 {
    let log2_c = log2_of(term) + (1.0 + e) * (j.max(1) as f64).log2();
    let tol = log2_tol(opts, log2_pref, log2_of(partial));
    // C K^(-e) / e <= tol
    let log2_k = (log2_c - e.log2() - tol) / e;
    log2_k.exp2()
}

enum LevinOutcome {
    Accepted { value: BigComplex, diff: f64, order: usize },
    Rejected { best: BigComplex, diff: f64 },
}

/// Levin u-transform with `β = 1` on the partial sums `s_{n0}, s_{n0+1}, …`.
fn levin(
    terms: &[BigComplex],
    sums: &[BigComplex],
    n0: usize,
    prec: u32,
    opts: &SummationOptions,
    log2_pref: f64,
    log2_largest_term: f64,
) -> LevinOutcome {
    let beta = 1i64;
    let n = terms.len();
    // 1/ω_n = 1/((β+n) a_n)
    let inv_omega: Vec<BigComplex> = terms
        .iter()
        .enumerate()
        .map(|(i, a)| a.mul_i64(beta + (n0 + i) as i64).recip())
        .collect();
    let log2_largest_sum = sums.iter().map(log2_of).fold(f64::NEG_INFINITY, f64::max);
    let mut prev: Option<BigComplex> = None;
    let mut prev_agreed = false;
    let mut best: Option<(BigComplex, f64)> = None;
    for k in 1..n {
        let mut num = BigComplex::zero(prec);
        let mut den = BigComplex::zero(prec);
        let mut num_abs = f64::NEG_INFINITY;
        let mut den_abs = f64::NEG_INFINITY;
        let last = (beta + (n0 + k) as i64) as f64;
        let mut binom = rug::Float::with_val(prec, 1);
        for j in 0..=k {
            if j > 0 {
                binom *= (k - j + 1) as f64;
                binom /= j as f64;
            }
            let base = rug::Float::with_val(prec, beta + (n0 + j) as i64) / last;
            let w = rug::Float::with_val(prec, rug::ops::Pow::pow(base, (k - 1) as i32)) * &binom;
            let mut c = BigComplex::from_real(w);
            if j % 2 == 1 {
                c = -c;
            }
            let d = &c * &inv_omega[j];
            let nterm = &d * &sums[j];
            num_abs = log_add(num_abs, log2_of(&nterm));
            den_abs = log_add(den_abs, log2_of(&d));
            num += nterm;
            den += d;
        }
        if den.is_zero() {
            continue;
        }
        let value = &num / &den;
        let log2_v = log2_of(&value);
        let lost = (num_abs - log2_of(&num)).max(0.0)
            + (den_abs - log2_of(&den)).max(0.0)
            + (log2_largest_sum.max(log2_largest_term) - log2_v).max(0.0);
        if let Some(p) = &prev {
            let diff = log2_of(&(&value - p));
            let tol = log2_tol(opts, log2_pref, log2_v);
            let usable = (prec as f64) - lost;
            let needed = (log2_v - tol).max(0.0) + 8.0;
            if usable >= needed {
                // isolated coincidences between two orders do occur
                if diff <= tol && prev_agreed {
                    return LevinOutcome::Accepted {
                        value,
                        diff: diff.exp2(),
                        order: k,
                    };
                }
                prev_agreed = diff <= tol;
                if best.as_ref().is_none_or(|(_, d)| diff < *d) {
                    best = Some((value.clone(), diff));
                }
            } else {
                // further orders only lose more bits
                break;
            }
        }
        prev = Some(value);
    }
    match best {
        Some((v, d)) => LevinOutcome::Rejected {
            best: v,
            diff: d.exp2(),
        },
        None => LevinOutcome::Rejected {
            best: sums.last().cloned().unwrap_or_else(|| BigComplex::nan(prec)),
            diff: f64::INFINITY,
        },
    }
}

/// `log2(2^a + 2^b)`.
fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Σ_{j≥0} z^j / (j+1)^s with ratio z (j+1)^s/(j+2)^s.
    struct Zeta {
        s: i64,
        z: i64,
        prec: u32,
        regime: Regime,
    }

    impl TermSource for Zeta {
        fn precision(&self) -> u32 {
            self.prec
        }
        fn regime(&self) -> Regime {
            self.regime.clone()
        }
        fn prefactor(&self, prec: u32) -> BigComplex {
            BigComplex::one(prec)
        }
        fn terms(&self, prec: u32) -> Terms<'_> {
            let (s, z) = (self.s, self.z);
            Terms {
                first: BigComplex::one(prec),
                ratio: Box::new(move |j| {
                    let a = BigComplex::from_i64(j as i64 + 1, prec).powi(s);
                    let b = BigComplex::from_i64(j as i64 + 2, prec).powi(s);
                    (&a / &b).mul_i64(z)
                }),
            }
        }
    }

    fn pi2_over_6(prec: u32) -> BigComplex {
        BigComplex::pi(prec).square().div_i64(6)
    }

    #[test]
    fn levin_sums_basel_series() {
        let src = Zeta {
            s: 2,
            z: 1,
            prec: 256,
            regime: Regime::UnitArgument {
                excess: BigComplex::one(256),
            },
        };
        let v = sum_series(&src, &SummationOptions::default());
        assert_eq!(v.status, SeriesStatus::AcceleratedConverged);
        let err = (&v.value - &pi2_over_6(256)).abs_f64();
        assert!(err < 1e-30, "err = {err:e}");
    }

    #[test]
    fn direct_sum_with_tail_bound() {
        // Σ 1/(j+1)^12, excess 11
        let src = Zeta {
            s: 12,
            z: 1,
            prec: 256,
            regime: Regime::UnitArgument {
                excess: BigComplex::from_i64(11, 256),
            },
        };
        let opts = SummationOptions::default();
        let v = sum_series(&src, &opts);
        assert_eq!(v.status, SeriesStatus::ConvergedByTail);
        // zeta(12) = 691 π^12 / 638512875
        let expect = BigComplex::pi(256).powi(12).mul_i64(691).div_i64(638512875);
        assert!((&v.value - &expect).abs_f64() < 1e-30);
        assert!(v.tail_estimate < 1e-30);
    }

    #[test]
    fn alternating_unit_argument() {
        // Σ (-1)^j/(j+1) = ln 2
        let src = Zeta {
            s: 1,
            z: -1,
            prec: 256,
            regime: Regime::UnitArgument {
                excess: BigComplex::from_ratio(1, 1000, 256),
            },
        };
        let v = sum_series(&src, &SummationOptions::default());
        let ln2 = {
            let f = rug::Float::with_val(256, 2).ln();
            BigComplex::from_real(f)
        };
        assert!((&v.value - &ln2).abs_f64() < 1e-30, "{:?}", v.status);
    }

    #[test]
    fn geometric_series() {
        // Σ (1/2)^j/(j+1)^0 = 2
        struct Half;
        impl TermSource for Half {
            fn precision(&self) -> u32 {
                128
            }
            fn regime(&self) -> Regime {
                Regime::Geometric { z_abs: 0.5 }
            }
            fn prefactor(&self, prec: u32) -> BigComplex {
                BigComplex::from_i64(3, prec)
            }
            fn terms(&self, prec: u32) -> Terms<'_> {
                Terms {
                    first: BigComplex::one(prec),
                    ratio: Box::new(move |_| BigComplex::from_ratio(1, 2, prec)),
                }
            }
        }
        let v = sum_series(&Half, &SummationOptions::default());
        assert_eq!(v.status, SeriesStatus::ConvergedByTail);
        assert!((&v.value - &BigComplex::from_i64(6, 128)).abs_f64() < 1e-29);
    }

    #[test]
    fn divergent_regime_fails() {
        let src = Zeta {
            s: 0,
            z: 2,
            prec: 128,
            regime: Regime::Divergent { reason: "test".into() },
        };
        let v = sum_series(&src, &SummationOptions::default());
        assert_eq!(v.status, SeriesStatus::FailedToConverge);
    }

    #[test]
    fn max_terms_is_enforced() {
        let src = Zeta {
            s: 12,
            z: 1,
            prec: 128,
            regime: Regime::UnitArgument {
                excess: BigComplex::from_i64(11, 128),
            },
        };
        let opts = SummationOptions {
            max_terms: 5,
            ..Default::default()
        };
        let v = sum_series(&src, &opts);
        assert_eq!(v.status, SeriesStatus::FailedToConverge);
    }
}
