//! Quadratic lattice sequences and the seven-parameter family description.
//!
//! A family is fixed by three quadratic sequences in the index `k`:
//! nodes `x_k = b0 + b1 k + b2 k²`, eigenvalues `h_k = a1 k + a2 k²` and
//! `e_k = d1 k + d2 k²`. The constant terms of `h` and `e` are pinned to
//! zero; only differences `h_k - h_j` ever enter, and `e_0 = 0` is forced by
//! `g_0 = 0`.

use std::fmt;

use crate::connection::Family;
use crate::error::{Error, Result};
use crate::num::BigComplex;

/// `c0 + c1 k + c2 k²` evaluated at nonnegative integers.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticSeq {
    pub c0: BigComplex,
    pub c1: BigComplex,
    pub c2: BigComplex,
}

impl QuadraticSeq {
    pub fn new(c0: BigComplex, c1: BigComplex, c2: BigComplex) -> Self {
        Self { c0, c1, c2 }
    }

    pub fn eval(&self, k: u64) -> BigComplex {
        let k = k as i64;
        &(&self.c0 + &self.c1.mul_i64(k)) + &self.c2.mul_i64(k).mul_i64(k)
    }
}

/// Which of `a2`, `b2` vanish; selects the hypergeometric form of the weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseId {
    /// `a2 ≠ 0`, `b2 ≠ 0`: `3F2` weights.
    Case1,
    /// `a2 ≠ 0`, `b2 = 0`.
    Case2,
    /// `a2 = 0`, `b2 ≠ 0`.
    Case3,
    /// `a2 = 0`, `b2 = 0`.
    Case4,
}

impl CaseId {
    pub fn classify(a2_zero: bool, b2_zero: bool) -> Self {
        match (a2_zero, b2_zero) {
            (false, false) => CaseId::Case1,
            (false, true) => CaseId::Case2,
            (true, false) => CaseId::Case3,
            (true, true) => CaseId::Case4,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            CaseId::Case1 => 1,
            CaseId::Case2 => 2,
            CaseId::Case3 => 3,
            CaseId::Case4 => 4,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {}", self.number())
    }
}

/// The seven lattice parameters `(a1, a2, b0, b1, b2, d1, d2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyParams {
    pub a1: BigComplex,
    pub a2: BigComplex,
    pub b0: BigComplex,
    pub b1: BigComplex,
    pub b2: BigComplex,
    pub d1: BigComplex,
    pub d2: BigComplex,
}

pub const PARAM_NAMES: [&str; 7] = ["a1", "a2", "b0", "b1", "b2", "d1", "d2"];

impl FamilyParams {
    /// Builds a parameter set, rejecting `(a1, a2) = 0` and `(b1, b2) = 0`.
    /// All seven values are brought to the largest precision among them.
    pub fn new(
        a1: BigComplex,
        a2: BigComplex,
        b0: BigComplex,
        b1: BigComplex,
        b2: BigComplex,
        d1: BigComplex,
        d2: BigComplex,
    ) -> Result<Self> {
        if a1.is_zero() && a2.is_zero() {
            return Err(Error::InvalidParams(
                "a1 and a2 are both zero: the eigenvalues h_k are constant".into(),
            ));
        }
        if b1.is_zero() && b2.is_zero() {
            return Err(Error::InvalidParams(
                "b1 and b2 are both zero: the nodes x_k are constant".into(),
            ));
        }
        let prec = [&a1, &a2, &b0, &b1, &b2, &d1, &d2]
            .iter()
            .map(|v| v.prec())
            .max()
            .unwrap_or(crate::num::DEFAULT_PRECISION);
        Ok(Self {
            a1: a1.with_prec(prec),
            a2: a2.with_prec(prec),
            b0: b0.with_prec(prec),
            b1: b1.with_prec(prec),
            b2: b2.with_prec(prec),
            d1: d1.with_prec(prec),
            d2: d2.with_prec(prec),
        })
    }

    /// Parses `name=value` pairs for all seven parameters.
    pub fn from_pairs<'a, I>(pairs: I, prec: u32) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut vals: [Option<BigComplex>; 7] = Default::default();
        for (name, value) in pairs {
            let idx = PARAM_NAMES
                .iter()
                .position(|n| *n == name)
                .ok_or_else(|| Error::InvalidArgument {
                    family: "raw".into(),
                    arg: name.into(),
                    reason: "expected one of a1, a2, b0, b1, b2, d1, d2".into(),
                })?;
            vals[idx] = Some(BigComplex::parse(value, prec)?);
        }
        let mut it = vals.into_iter().enumerate().map(|(i, v)| {
            v.ok_or_else(|| Error::MissingArgument {
                family: "raw".into(),
                arg: PARAM_NAMES[i].into(),
            })
        });
        let mut next = || it.next().unwrap();
        Self::new(next()?, next()?, next()?, next()?, next()?, next()?, next()?)
    }

    pub fn values(&self) -> [&BigComplex; 7] {
        [&self.a1, &self.a2, &self.b0, &self.b1, &self.b2, &self.d1, &self.d2]
    }

    pub fn prec(&self) -> u32 {
        self.a1.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self {
            a1: self.a1.with_prec(prec),
            a2: self.a2.with_prec(prec),
            b0: self.b0.with_prec(prec),
            b1: self.b1.with_prec(prec),
            b2: self.b2.with_prec(prec),
            d1: self.d1.with_prec(prec),
            d2: self.d2.with_prec(prec),
        }
    }

    /// Node sequence `x_k`.
    pub fn nodes(&self) -> QuadraticSeq {
        QuadraticSeq::new(self.b0.clone(), self.b1.clone(), self.b2.clone())
    }

    /// Eigenvalue sequence `h_k` (with `h_0 = 0`).
    pub fn eigenvalues(&self) -> QuadraticSeq {
        let z = BigComplex::zero(self.prec());
        QuadraticSeq::new(z, self.a1.clone(), self.a2.clone())
    }

    /// The sequence `e_k` (with `e_0 = 0`).
    pub fn e_seq(&self) -> QuadraticSeq {
        let z = BigComplex::zero(self.prec());
        QuadraticSeq::new(z, self.d1.clone(), self.d2.clone())
    }

    pub fn x(&self, k: u64) -> BigComplex {
        self.nodes().eval(k)
    }

    pub fn h(&self, k: u64) -> BigComplex {
        let k = k as i64;
        &self.a1.mul_i64(k) + &self.a2.mul_i64(k).mul_i64(k)
    }

    pub fn e(&self, k: u64) -> BigComplex {
        let k = k as i64;
        &self.d1.mul_i64(k) + &self.d2.mul_i64(k).mul_i64(k)
    }

    /// `g_k = x_{k-1} (h_k - h_0) + e_k`, with `g_0 = 0`. A value that
    /// cancels to within the equality tolerance is returned as exact zero,
    /// which is how terminating families are detected.
    pub fn g(&self, k: u64) -> BigComplex {
        if k == 0 {
            return BigComplex::zero(self.prec());
        }
        let xh = &self.x(k - 1) * &self.h(k);
        BigComplex::cancelling_sum(&xh, &self.e(k))
    }

    pub fn case_id(&self) -> CaseId {
        CaseId::classify(self.a2.is_zero(), self.b2.is_zero())
    }

    /// Scales `(a1, a2, d1, d2)` by `lambda`. Every observable quantity is
    /// invariant under this map.
    pub fn scale_eigen_gauge(&self, lambda: &BigComplex) -> Self {
        Self {
            a1: &self.a1 * lambda,
            a2: &self.a2 * lambda,
            b0: self.b0.clone(),
            b1: self.b1.clone(),
            b2: self.b2.clone(),
            d1: &self.d1 * lambda,
            d2: &self.d2 * lambda,
        }
    }
}

/// Outcome of [`validate`]. Never an error: failures are listed.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub case_id: CaseId,
    pub horizon: usize,
    /// `h_0, …, h_horizon` pairwise distinct.
    pub h_distinct_ok: bool,
    /// `x_0, …, x_horizon` pairwise distinct.
    pub x_distinct_ok: bool,
    /// Largest `k <= horizon` with `g_1, …, g_k` all nonzero.
    pub g_nonzero_up_to: usize,
    /// Smallest `k >= 1` with `g_k = 0`; the family then has exactly `k`
    /// weights.
    pub terminating_at: Option<usize>,
    /// Largest `n <= horizon` with `α_1, …, α_n` all nonzero.
    pub alpha_nonzero_up_to: usize,
    pub messages: Vec<String>,
}

impl ValidationReport {
    /// Number of nodes of a finite family.
    pub fn family_size(&self) -> Option<usize> {
        self.terminating_at
    }

    pub fn is_ok(&self) -> bool {
        self.h_distinct_ok
            && self.x_distinct_ok
            && match self.terminating_at {
                Some(n) => self.alpha_nonzero_up_to + 1 >= n,
                None => self.alpha_nonzero_up_to == self.horizon,
            }
    }
}

/// Index sum `m = k + j` (with `0 <= j < k`) at which `lin + quad·m`
/// vanishes, if `-lin/quad` is a positive integer.
fn collision_sum(lin: &BigComplex, quad: &BigComplex) -> Option<i64> {
    if quad.is_zero() {
        return None;
    }
    let ratio = -(lin / quad);
    ratio.nearest_integer().filter(|m| *m >= 1)
}

fn collision_pair(m: i64) -> (usize, usize) {
    let j = (m - 1) / 2;
    ((m - j) as usize, j as usize)
}

/// Checks the family hypotheses over indices `0..=horizon`.
pub fn validate(params: &FamilyParams, horizon: usize) -> ValidationReport {
    let horizon = horizon.max(1);
    let mut messages = Vec::new();
    let case_id = params.case_id();

    // h_k - h_j = (k - j)(a1 + a2 (k + j)), and likewise for x with b1, b2.
    let mut h_distinct_ok = true;
    if let Some(m) = collision_sum(&params.a1, &params.a2) {
        let (k, j) = collision_pair(m);
        if k <= horizon {
            h_distinct_ok = false;
            messages.push(format!("eigenvalue collision h_{j} = h_{k}"));
        } else {
            messages.push(format!(
                "eigenvalues collide beyond the horizon: h_{j} = h_{k} (-a1/a2 = {m})"
            ));
        }
    }
    let mut x_distinct_ok = true;
    if let Some(m) = collision_sum(&params.b1, &params.b2) {
        let (k, j) = collision_pair(m);
        if k <= horizon {
            x_distinct_ok = false;
            messages.push(format!("node collision x_{j} = x_{k}"));
        } else {
            messages.push(format!(
                "nodes collide beyond the horizon: x_{j} = x_{k} (-b1/b2 = {m})"
            ));
        }
    }

    let mut g_nonzero_up_to = horizon;
    let mut terminating_at = None;
    for k in 1..=horizon {
        if params.g(k as u64).is_zero() {
            g_nonzero_up_to = k - 1;
            terminating_at = Some(k);
            messages.push(format!("g_{k} = 0: finite family with {k} nodes"));
            break;
        }
    }

    let family = Family::new(params.clone());
    let mut alpha_nonzero_up_to = 0;
    for n in 1..=horizon {
        match family.alpha(n) {
            Ok(a) if !a.is_zero() => alpha_nonzero_up_to = n,
            Ok(_) => {
                if terminating_at != Some(n) {
                    messages.push(format!("alpha_{n} = 0: functional is not quasi-definite"));
                }
                break;
            }
            Err(e) => {
                messages.push(format!("alpha_{n}: {e}"));
                break;
            }
        }
    }

    ValidationReport {
        case_id,
        horizon,
        h_distinct_ok,
        x_distinct_ok,
        g_nonzero_up_to,
        terminating_at,
        alpha_nonzero_up_to,
        messages,
    }
}
