//! Interchangeable ways of computing a weight table.

use crate::error::{Error, Result};
use crate::summation::{SeriesValue, SummationOptions};
use crate::weights::{
    direct_series_weight, table_len, weight, weight_table_with, weights_oracle, WeightContext, WeightTable,
};

pub trait WeightMethod: Sync {
    /// Stable identifier used on the command line.
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn table(&self, ctx: &WeightContext, count: Option<usize>, opts: &SummationOptions) -> WeightTable;
}

/// `r_k = f_k(1)` from the hypergeometric closed form of `f_k`.
pub struct ClosedForm;

impl WeightMethod for ClosedForm {
    fn name(&self) -> &'static str {
        "closed-form"
    }

    fn summary(&self) -> &'static str {
        "evaluate the hypergeometric closed form of f_k at t = 1"
    }

    fn table(&self, ctx: &WeightContext, count: Option<usize>, opts: &SummationOptions) -> WeightTable {
        weight_table_with(ctx, count, |k| weight(ctx, k, opts))
    }
}

/// Sums `Σ_{j≥k} m_j / v'_{j+1}(x_k)` term by term.
pub struct DirectSeries;

impl WeightMethod for DirectSeries {
    fn name(&self) -> &'static str {
        "direct-series"
    }

    fn summary(&self) -> &'static str {
        "sum the moment series of r_k directly"
    }

    fn table(&self, ctx: &WeightContext, count: Option<usize>, opts: &SummationOptions) -> WeightTable {
        weight_table_with(ctx, count, |k| direct_series_weight(&ctx.family, k, opts))
    }
}

/// Back substitution in the truncated moment system.
pub struct Triangular {
    /// Truncation index; defaults to `max(60, 4·count)` for infinite
    /// families and the last node of a finite one.
    pub truncation: Option<usize>,
}

impl Triangular {
    fn truncation_for(&self, ctx: &WeightContext, count: Option<usize>) -> usize {
        if let Some(j) = self.truncation {
            return j;
        }
        match ctx.finite_size() {
            Some(n) => n - 1,
            None => (4 * table_len(None, count)).max(60),
        }
    }
}

impl WeightMethod for Triangular {
    fn name(&self) -> &'static str {
        "triangular"
    }

    fn summary(&self) -> &'static str {
        "solve the truncated triangular moment system by back substitution"
    }

    fn table(&self, ctx: &WeightContext, count: Option<usize>, _opts: &SummationOptions) -> WeightTable {
        let j = self.truncation_for(ctx, count);
        let solved = weights_oracle(&ctx.family, j);
        weight_table_with(ctx, count, |k| match &solved {
            Ok(r) => Ok(r
                .get(k)
                .map(|v| SeriesValue::exact(v.clone(), j + 1 - k))
                .unwrap_or_else(|| SeriesValue::exact(crate::num::BigComplex::zero(ctx.family.prec()), 0))),
            Err(e) => Err(e.clone()),
        })
    }
}

static CLOSED_FORM: ClosedForm = ClosedForm;
static DIRECT_SERIES: DirectSeries = DirectSeries;
static TRIANGULAR: Triangular = Triangular { truncation: None };
static REGISTRY: [&dyn WeightMethod; 3] = [&CLOSED_FORM, &DIRECT_SERIES, &TRIANGULAR];

pub fn methods() -> &'static [&'static dyn WeightMethod] {
    &REGISTRY
}

pub fn method(name: &str) -> Result<&'static dyn WeightMethod> {
    REGISTRY
        .iter()
        .copied()
        .find(|m| m.name() == name)
        .ok_or_else(|| Error::UnknownMethod(name.to_string()))
}
