//! Newton-basis machinery over the family's own nodes.
//!
//! [`Family`] wraps a [`FamilyParams`] together with append-only caches of
//! `g_k`, the generalized moments `m_k` and rows of node derivatives
//! `v'_{j+1}(x_k)`. Caches only ever grow; a reader either sees a fully
//! initialized prefix or extends it under the write lock.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::lattice::FamilyParams;
use crate::num::BigComplex;

#[derive(Debug, Default)]
struct AppendCache {
    values: RwLock<Vec<BigComplex>>,
}

impl AppendCache {
    fn get_or_extend<F>(&self, k: usize, mut next: F) -> Result<BigComplex>
    where
        F: FnMut(usize, &[BigComplex]) -> Result<BigComplex>,
    {
        {
            let values = self.values.read().expect("cache lock poisoned");
            if let Some(v) = values.get(k) {
                return Ok(v.clone());
            }
        }
        let mut values = self.values.write().expect("cache lock poisoned");
        while values.len() <= k {
            let idx = values.len();
            let v = next(idx, &values)?;
            values.push(v);
        }
        Ok(values[k].clone())
    }
}

/// A family of class ℬ with memoized per-index sequences.
#[derive(Debug)]
pub struct Family {
    params: FamilyParams,
    g: AppendCache,
    m: AppendCache,
    vprime_rows: RwLock<HashMap<usize, Vec<BigComplex>>>,
}

impl Clone for Family {
    fn clone(&self) -> Self {
        Family::new(self.params.clone())
    }
}

impl Family {
    pub fn new(params: FamilyParams) -> Self {
        Self {
            params,
            g: AppendCache::default(),
            m: AppendCache::default(),
            vprime_rows: RwLock::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    pub fn prec(&self) -> u32 {
        self.params.prec()
    }

    /// Same family at a different working precision (fresh caches).
    pub fn with_prec(&self, prec: u32) -> Family {
        Family::new(self.params.with_prec(prec))
    }

    pub fn x(&self, k: usize) -> BigComplex {
        self.params.x(k as u64)
    }

    pub fn h(&self, k: usize) -> BigComplex {
        self.params.h(k as u64)
    }

    pub fn g(&self, k: usize) -> BigComplex {
        self.g
            .get_or_extend(k, |i, _| Ok(self.params.g(i as u64)))
            .expect("g never fails")
    }

    /// `h_i - h_j`, failing when the two eigenvalues coincide.
    pub fn h_diff(&self, i: usize, j: usize) -> Result<BigComplex> {
        let (hi, hj) = (self.h(i), self.h(j));
        let d = &hi - &hj;
        let scale = hi.abs().max(&hj.abs()).clone();
        if d.is_zero() || (!scale.is_zero() && d.negligible_against(&scale)) {
            return Err(Error::EigenvalueCollision { i, j });
        }
        Ok(d)
    }

    /// `x_i - x_j`, failing when the two nodes coincide.
    pub fn x_diff(&self, i: usize, j: usize) -> Result<BigComplex> {
        let (xi, xj) = (self.x(i), self.x(j));
        let d = &xi - &xj;
        let scale = xi.abs().max(&xj.abs()).clone();
        if d.is_zero() || (!scale.is_zero() && d.negligible_against(&scale)) {
            return Err(Error::NodeCollision { i, j });
        }
        Ok(d)
    }

    /// Smallest `k` in `1..=horizon` with `g_k = 0`: the size of a finite
    /// family.
    pub fn terminating_at(&self, horizon: usize) -> Option<usize> {
        (1..=horizon).find(|&k| self.g(k).is_zero())
    }

    /// Newton basis `v_k(t) = (t - x_0)…(t - x_{k-1})`.
    pub fn v_eval(&self, k: usize, t: &BigComplex) -> BigComplex {
        let mut acc = BigComplex::one(self.prec().max(t.prec()));
        for i in 0..k {
            acc *= t - &self.x(i);
        }
        acc
    }

    /// `v'_{j+1}(x_k) = ∏_{i=0, i≠k}^{j} (x_k - x_i)` for `k <= j`.
    pub fn v_prime_at_node(&self, j: usize, k: usize) -> Result<BigComplex> {
        if k > j {
            return Err(Error::InvalidParams(format!(
                "v'_{{j+1}}(x_k) needs k <= j (got j = {j}, k = {k})"
            )));
        }
        {
            let rows = self.vprime_rows.read().expect("cache lock poisoned");
            if let Some(v) = rows.get(&k).and_then(|row| row.get(j - k)) {
                return Ok(v.clone());
            }
        }
        let mut rows = self.vprime_rows.write().expect("cache lock poisoned");
        let row = rows.entry(k).or_default();
        if row.is_empty() {
            let mut first = BigComplex::one(self.prec());
            for i in 0..k {
                first *= self.x_diff(k, i)?;
            }
            row.push(first);
        }
        while row.len() <= j - k {
            let i = k + row.len();
            let next = row.last().unwrap() * &self.x_diff(k, i)?;
            row.push(next);
        }
        Ok(row[j - k].clone())
    }

    /// Connection coefficient `c_{n,k} = ∏_{j=k}^{n-1} g_{j+1} / (h_n - h_j)`.
    pub fn connection_coeff(&self, n: usize, k: usize) -> Result<BigComplex> {
        check_triangle(n, k)?;
        let mut acc = BigComplex::one(self.prec());
        for j in k..n {
            acc *= &self.g(j + 1) / &self.h_diff(n, j)?;
        }
        Ok(acc)
    }

    /// Row `(c_{n,0}, …, c_{n,n})`, built downward from `c_{n,n} = 1` with one
    /// ratio per entry.
    pub fn connection_row(&self, n: usize) -> Result<Vec<BigComplex>> {
        let mut row = vec![BigComplex::one(self.prec()); n + 1];
        for k in (0..n).rev() {
            let ratio = &self.g(k + 1) / &self.h_diff(n, k)?;
            row[k] = &row[k + 1] * &ratio;
        }
        Ok(row)
    }

    /// Entry of the inverse connection matrix,
    /// `ĉ_{n,k} = ∏_{j=k+1}^{n} g_j / (h_k - h_j)`.
    pub fn inverse_coeff(&self, n: usize, k: usize) -> Result<BigComplex> {
        check_triangle(n, k)?;
        let mut acc = BigComplex::one(self.prec());
        for j in k + 1..=n {
            acc *= &self.g(j) / &self.h_diff(k, j)?;
        }
        Ok(acc)
    }

    /// Generalized moment `m_k = ĉ_{k,0}`, via `m_k = m_{k-1} g_k / (h_0 - h_k)`.
    /// Once some `g_k` vanishes every later moment is exactly zero.
    pub fn moment(&self, k: usize) -> Result<BigComplex> {
        self.m.get_or_extend(k, |i, prev| {
            if i == 0 {
                return Ok(BigComplex::one(self.prec()));
            }
            let last = &prev[i - 1];
            let g = self.g(i);
            if last.is_zero() || g.is_zero() {
                return Ok(BigComplex::zero(self.prec()));
            }
            Ok(&(last * &g) / &self.h_diff(0, i)?)
        })
    }
}

fn check_triangle(n: usize, k: usize) -> Result<()> {
    if k > n {
        return Err(Error::InvalidParams(format!(
            "coefficient index needs k <= n (got n = {n}, k = {k})"
        )));
    }
    Ok(())
}

/// Polynomial stored by its coefficients in the family's Newton basis.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonPoly {
    pub coeffs: Vec<BigComplex>,
}

impl NewtonPoly {
    pub fn new(coeffs: Vec<BigComplex>) -> Self {
        Self { coeffs }
    }

    /// Index of the last nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Nested evaluation `c_0 + (t-x_0)(c_1 + (t-x_1)(c_2 + …))`.
    pub fn eval(&self, family: &Family, t: &BigComplex) -> BigComplex {
        let prec = family.prec().max(t.prec());
        let mut acc = BigComplex::zero(prec);
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            acc = &(&acc * &(t - &family.x(i))) + c;
        }
        acc
    }
}
