//! Named presets: classical parameters mapped onto the seven lattice
//! parameters, with the published weight and `α_n` formulas where known.
//!
//! Each preset is a [`FamilyPreset`] registered under its CLI name. Free
//! gauge parameters (`a2` or `a1`, and `b0` where it is free) may be given
//! as optional arguments and default to 1 and 0.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::hypergeom::shifted_factorial;
use crate::lattice::FamilyParams;
use crate::num::BigComplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyName {
    Wilson,
    ContinuousHahn,
    Hahn,
    ContinuousDualHahn,
    Krawtchouk,
    Meixner,
    Charlier,
}

impl FamilyName {
    pub const ALL: [FamilyName; 7] = [
        FamilyName::Wilson,
        FamilyName::ContinuousHahn,
        FamilyName::Hahn,
        FamilyName::ContinuousDualHahn,
        FamilyName::Krawtchouk,
        FamilyName::Meixner,
        FamilyName::Charlier,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            FamilyName::Wilson => "wilson",
            FamilyName::ContinuousHahn => "continuous-hahn",
            FamilyName::Hahn => "hahn",
            FamilyName::ContinuousDualHahn => "continuous-dual-hahn",
            FamilyName::Krawtchouk => "krawtchouk",
            FamilyName::Meixner => "meixner",
            FamilyName::Charlier => "charlier",
        }
    }

    pub fn from_cli(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.cli_name() == name)
            .ok_or_else(|| Error::UnknownFamily(name.to_string()))
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

/// Known closed form of the weights, used as an independent check.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassicalWeight {
    /// `C(N,k) p^k (1-p)^(N-k)`.
    Binomial { n: u64, p: BigComplex },
    /// `a^k e^(-a) / k!`.
    Poisson { a: BigComplex },
    /// `(1-c)^β (β)_k c^k / k!`.
    NegativeBinomial { c: BigComplex, beta: BigComplex },
    /// `(α+1)_k (β+1)_{N-k} N! / (k! (N-k)! (α+β+2)_N)`.
    Hahn {
        alpha: BigComplex,
        beta: BigComplex,
        n: u64,
    },
}

impl ClassicalWeight {
    pub fn describe(&self) -> &'static str {
        match self {
            ClassicalWeight::Binomial { .. } => "C(N,k) p^k (1-p)^(N-k)",
            ClassicalWeight::Poisson { .. } => "a^k e^(-a) / k!",
            ClassicalWeight::NegativeBinomial { .. } => "(1-c)^beta (beta)_k c^k / k!",
            ClassicalWeight::Hahn { .. } => "(alpha+1)_k (beta+1)_(N-k) N! / (k! (N-k)! (alpha+beta+2)_N)",
        }
    }

    pub fn weight(&self, k: usize, prec: u32) -> BigComplex {
        let one = BigComplex::one(prec);
        let fact = |m: usize| shifted_factorial(&one, m);
        match self {
            ClassicalWeight::Binomial { n, p } => {
                let n = *n as usize;
                if k > n {
                    return BigComplex::zero(prec);
                }
                let binom = &fact(n) / &(&fact(k) * &fact(n - k));
                let q = &one - p;
                &(&binom * &p.powi(k as i64)) * &q.powi((n - k) as i64)
            }
            ClassicalWeight::Poisson { a } => &(&a.powi(k as i64) * &(-a).exp()) / &fact(k),
            ClassicalWeight::NegativeBinomial { c, beta } => {
                let lead = (&one - c).pow(beta);
                &(&(&lead * &shifted_factorial(beta, k)) * &c.powi(k as i64)) / &fact(k)
            }
            ClassicalWeight::Hahn { alpha, beta, n } => {
                let n = *n as usize;
                if k > n {
                    return BigComplex::zero(prec);
                }
                let num = &(&shifted_factorial(&alpha.add_i64(1), k) * &shifted_factorial(&beta.add_i64(1), n - k))
                    * &fact(n);
                let den = &(&fact(k) * &fact(n - k)) * &shifted_factorial(&(alpha + beta).add_i64(2), n);
                &num / &den
            }
        }
    }
}

/// A named family with its classical arguments and derived lattice
/// parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub name: FamilyName,
    pub named_args: BTreeMap<String, BigComplex>,
    pub params: FamilyParams,
    pub classical_weight: Option<ClassicalWeight>,
}

impl FamilySpec {
    /// Published `α_n`, for families that have one.
    pub fn alpha_closed_form(&self, n: usize) -> Result<BigComplex> {
        preset(self.name).alpha_closed_form(&self.args_view(), n)
    }

    fn args_view(&self) -> Args<'_> {
        Args {
            family: self.name.cli_name(),
            values: &self.named_args,
            prec: self.params.prec(),
        }
    }
}

/// Parsed argument map handed to a preset.
pub struct Args<'a> {
    family: &'static str,
    values: &'a BTreeMap<String, BigComplex>,
    prec: u32,
}

impl Args<'_> {
    pub fn get(&self, name: &str) -> Result<BigComplex> {
        self.values.get(name).cloned().ok_or_else(|| Error::MissingArgument {
            family: self.family.into(),
            arg: name.into(),
        })
    }

    pub fn get_or(&self, name: &str, default: i64) -> BigComplex {
        self.values
            .get(name)
            .cloned()
            .unwrap_or_else(|| BigComplex::from_i64(default, self.prec))
    }

    fn invalid(&self, arg: &str, reason: impl Into<String>) -> Error {
        Error::InvalidArgument {
            family: self.family.into(),
            arg: arg.into(),
            reason: reason.into(),
        }
    }

    /// A gauge parameter that must stay nonzero.
    fn gauge(&self, name: &str) -> Result<BigComplex> {
        let v = self.get_or(name, 1);
        if v.is_zero() {
            return Err(self.invalid(name, "gauge-inconsistent: must be nonzero"));
        }
        Ok(v)
    }

    fn positive_integer(&self, name: &str) -> Result<u64> {
        let v = self.get(name)?;
        match v.nearest_integer() {
            Some(n) if n >= 1 && v.im().is_zero() => Ok(n as u64),
            _ => Err(self.invalid(name, "must be a positive integer")),
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }
}

/// Strategy interface: one implementation per named family.
pub trait FamilyPreset: Sync {
    fn name(&self) -> FamilyName;
    /// Required classical arguments.
    fn required_args(&self) -> &'static [&'static str];
    /// Optional gauge arguments.
    fn optional_args(&self) -> &'static [&'static str];
    fn summary(&self) -> &'static str;
    fn build(&self, args: &Args<'_>) -> Result<FamilyParams>;
    fn classical_weight(&self, _args: &Args<'_>) -> Result<Option<ClassicalWeight>> {
        Ok(None)
    }
    fn alpha_closed_form(&self, _args: &Args<'_>, _n: usize) -> Result<BigComplex> {
        Err(Error::Unsupported(format!(
            "{} has no published closed form for alpha_n",
            self.name()
        )))
    }
}

fn one(prec: u32) -> BigComplex {
    BigComplex::one(prec)
}

struct Wilson;
struct ContinuousHahn;
struct Hahn;
struct ContinuousDualHahn;
struct Krawtchouk;
struct Meixner;
struct Charlier;

/// Case-1 canonical parameters of Wilson(a, b, c, d).
fn wilson_canonical(args: &Args<'_>) -> Result<[BigComplex; 4]> {
    let (a, b, c, d) = (args.get("a")?, args.get("b")?, args.get("c")?, args.get("d")?);
    let p = c.mul_i64(2).add_i64(1);
    let r = &(&(&a + &b) + &c) + &d;
    Ok([p, r, &c + &d, &b + &c])
}

impl FamilyPreset for Wilson {
    fn name(&self) -> FamilyName {
        FamilyName::Wilson
    }
    fn required_args(&self) -> &'static [&'static str] {
        &["a", "b", "c", "d"]
    }
    fn optional_args(&self) -> &'static [&'static str] {
        &["a2", "b0"]
    }
    fn summary(&self) -> &'static str {
        "quadratic lattice x_k = (k+c)^2 - c^2 + b0, 3F2 weights"
    }
    fn build(&self, args: &Args<'_>) -> Result<FamilyParams> {
        let [p, r, y1, y2] = wilson_canonical(args)?;
        let (a2, b0) = (args.gauge("a2")?, args.get_or("b0", 0));
        let b2 = one(args.prec);
        let b1 = &(&p - &one(args.prec)) * &b2;
        let a1 = &(&r - &one(args.prec)) * &a2;
        let sigma = &p + &r;
        let s = &y1 + &y2;
        let q = &y1 * &y2;
        let rm1 = r.add_i64(-1);
        // d1 = a2 (b2 ((y1-1)(y2-1)(p+r-y1-y2-2) + (r-1)(p-2)) - (r-1) b0)
        let inner1 = &(&(&y1.add_i64(-1) * &y2.add_i64(-1)) * &(&sigma - &s).add_i64(-2)) + &(&rm1 * &p.add_i64(-2));
        let d1 = &a2 * &(&(&b2 * &inner1) - &(&rm1 * &b0));
        // d2 = a2 (b2 ((y1+y2)(p+r-y1-y2-1) + y1 y2 - r(p-1)) - b0)
        let inner2 = &(&(&s * &(&sigma - &s).add_i64(-1)) + &q) - &(&r * &p.add_i64(-1));
        let d2 = &a2 * &(&(&b2 * &inner2) - &b0);
        FamilyParams::new(a1, a2, b0, b1, b2, d1, d2)
    }
    fn alpha_closed_form(&self, args: &Args<'_>, n: usize) -> Result<BigComplex> {
        let [p, r, y1, y2] = wilson_canonical(args)?;
        let b2 = one(args.prec);
        let n = n as i64;
        let nn = BigComplex::from_i64(n, args.prec);
        let two_n_r = r.add_i64(2 * n);
        let num1 = &(&(&nn * &y1.add_i64(n - 1)) * &y2.add_i64(n - 1)) * &(&(&y1 + &y2) - &p).add_i64(n);
        let den = &(&(&two_n_r.add_i64(-3) * &two_n_r.add_i64(-2).square()) * &two_n_r.add_i64(-1)) * &one(args.prec);
        let num2 = &(&(&r.add_i64(n - 2) * &(&r - &y1).add_i64(n - 1)) * &(&r - &y2).add_i64(n - 1))
            * &(&(&p + &r) - &(&y1 + &y2)).add_i64(n - 2);
        Ok(&(&(&b2.square() * &num1) / &den) * &num2)
    }
}

impl FamilyPreset for ContinuousHahn {
    fn name(&self) -> FamilyName {
        FamilyName::ContinuousHahn
    }
    fn required_args(&self) -> &'static [&'static str] {
        &["a", "b", "c", "d"]
    }
    fn optional_args(&self) -> &'static [&'static str] {
        &["a2", "b0"]
    }
    fn summary(&self) -> &'static str {
        "linear lattice x_k = b0 + i k, 2F1 weights"
    }
    fn build(&self, args: &Args<'_>) -> Result<FamilyParams> {
        let (a, b, c, d) = (args.get("a")?, args.get("b")?, args.get("c")?, args.get("d")?);
        let prec = args.prec;
        let (a2, b0) = (args.gauge("a2")?, args.get_or("b0", 0));
        let b1 = BigComplex::i(prec);
        let r = &(&(&a + &b) + &c) + &d;
        let (y1, y2) = (&a + &c, &a + &d);
        let rm1 = r.add_i64(-1);
        let a1 = &rm1 * &a2;
        // d1 = a2 (b1 (r-1 + (y1-1)(y2-1)) - b0 (r-1))
        let d1 = &a2 * &(&(&b1 * &(&rm1 + &(&y1.add_i64(-1) * &y2.add_i64(-1)))) - &(&b0 * &rm1));
        // d2 = a2 (b1 (y1+y2-r) - b0)
        let d2 = &a2 * &(&(&b1 * &(&(&y1 + &y2) - &r)) - &b0);
        FamilyParams::new(a1, a2, b0, b1, BigComplex::zero(prec), d1, d2)
    }
    fn alpha_closed_form(&self, args: &Args<'_>, n: usize) -> Result<BigComplex> {
        let (a, b, c, d) = (args.get("a")?, args.get("b")?, args.get("c")?, args.get("d")?);
        let n = n as i64;
        let s = &(&(&a + &b) + &c) + &d;
        let nn = BigComplex::from_i64(n, args.prec);
        let num = &(&(&(&(&nn * &s.add_i64(n - 2)) * &(&a + &c).add_i64(n - 1)) * &(&a + &d).add_i64(n - 1))
            * &(&b + &c).add_i64(n - 1))
            * &(&b + &d).add_i64(n - 1);
        let two = s.add_i64(2 * n);
        let den = &(&two.add_i64(-2).square() * &two.add_i64(-1)) * &two.add_i64(-3);
        Ok(&num / &den)
    }
}

impl FamilyPreset for Hahn {
    fn name(&self) -> FamilyName {
        FamilyName::Hahn
    }
    fn required_args(&self) -> &'static [&'static str] {
        &["alpha", "beta", "N"]
    }
    fn optional_args(&self) -> &'static [&'static str] {
        &["a2"]
    }
    fn summary(&self) -> &'static str {
        "finite family on x_k = k, k = 0..N"
    }
    fn build(&self, args: &Args<'_>) -> Result<FamilyParams> {
        let (al, be) = (args.get("alpha")?, args.get("beta")?);
        let n = args.positive_integer("N")? as i64;
        let prec = args.prec;
        let a2 = args.gauge("a2")?;
        let a1 = &(&al + &be).add_i64(1) * &a2;
        // d1 = -a2 (N alpha - beta - 1), d2 = -a2 (N + beta + 1)
        let d1 = -(&a2 * &(&al.mul_i64(n) - &be).add_i64(-1));
        let d2 = -(&a2 * &be.add_i64(n + 1));
        FamilyParams::new(
            a1,
            a2,
            BigComplex::zero(prec),
            one(prec),
            BigComplex::zero(prec),
            d1,
            d2,
        )
    }
    fn classical_weight(&self, args: &Args<'_>) -> Result<Option<ClassicalWeight>> {
        Ok(Some(ClassicalWeight::Hahn {
            alpha: args.get("alpha")?,
            beta: args.get("beta")?,
            n: args.positive_integer("N")?,
        }))
    }
}

impl FamilyPreset for ContinuousDualHahn {
    fn name(&self) -> FamilyName {
        FamilyName::ContinuousDualHahn
    }
    fn required_args(&self) -> &'static [&'static str] {
        &["a", "b", "c"]
    }
    fn optional_args(&self) -> &'static [&'static str] {
        &["a1", "b0"]
    }
    fn summary(&self) -> &'static str {
        "quadratic lattice x_k = (k+c)^2, 2F1 weights"
    }
    fn build(&self, args: &Args<'_>) -> Result<FamilyParams> {
        let (a, b, c) = (args.get("a")?, args.get("b")?, args.get("c")?);
        let prec = args.prec;
        let a1 = args.gauge("a1")?;
        let b0 = c.square();
        if let Some(given) = args.values.get("b0") {
            if !given.approx_eq(&b0) {
                return Err(args.invalid("b0", "gauge-inconsistent: this family fixes b0 = c^2"));
            }
        }
        let d2 = &a1 * &(&a + &b);
        let d1 = &a1 * &(&(&(&(&a * &b) + &(&a * &c)) + &(&b * &c)) - &(&a + &b));
        FamilyParams::new(a1, BigComplex::zero(prec), b0, c.mul_i64(2), one(prec), d1, d2)
    }
}

/// Shared shape of the three Case-4 presets: `a2 = b2 = 0`, `b1 = 1`.
fn case4(args: &Args<'_>, d1_over_a1: BigComplex, d2_over_a1: BigComplex) -> Result<FamilyParams> {
    let prec = args.prec;
    let a1 = args.gauge("a1")?;
    let b0 = args.get_or("b0", 0);
    FamilyParams::new(
        a1.clone(),
        BigComplex::zero(prec),
        b0,
        one(prec),
        BigComplex::zero(prec),
        &a1 * &d1_over_a1,
        &a1 * &d2_over_a1,
    )
}

impl FamilyPreset for Krawtchouk {
    fn name(&self) -> FamilyName {
        FamilyName::Krawtchouk
    }
    fn required_args(&self) -> &'static [&'static str] {
        &["p", "N"]
    }
    fn optional_args(&self) -> &'static [&'static str] {
        &["a1", "b0"]
    }
    fn summary(&self) -> &'static str {
        "finite family on x_k = b0 + k, binomial weights"
    }
    fn build(&self, args: &Args<'_>) -> Result<FamilyParams> {
        let p = args.get("p")?;
        let n = args.positive_integer("N")? as i64;
        let b0 = args.get_or("b0", 0);
        // d1 = -a1 (N p + p + b0 - 1), d2 = (p - 1) a1
        let d1 = -(&(&p.mul_i64(n + 1) + &b0).add_i64(-1));
        case4(args, d1, p.add_i64(-1))
    }
    fn classical_weight(&self, args: &Args<'_>) -> Result<Option<ClassicalWeight>> {
        Ok(Some(ClassicalWeight::Binomial {
            n: args.positive_integer("N")?,
            p: args.get("p")?,
        }))
    }
}

impl FamilyPreset for Meixner {
    fn name(&self) -> FamilyName {
        FamilyName::Meixner
    }
    fn required_args(&self) -> &'static [&'static str] {
        &["c", "beta"]
    }
    fn optional_args(&self) -> &'static [&'static str] {
        &["a1", "b0"]
    }
    fn summary(&self) -> &'static str {
        "infinite family on x_k = b0 + k, negative binomial weights"
    }
    fn build(&self, args: &Args<'_>) -> Result<FamilyParams> {
        let (c, beta) = (args.get("c")?, args.get("beta")?);
        let b0 = args.get_or("b0", 0);
        let cm1 = c.add_i64(-1);
        if cm1.is_zero() {
            return Err(args.invalid("c", "must differ from 1"));
        }
        // d1 = a1 ((beta - b0) c + b0 - 1) / (c - 1), d2 = a1 / (c - 1)
        let d1 = &(&(&(&beta - &b0) * &c) + &b0).add_i64(-1) / &cm1;
        case4(args, d1, cm1.recip())
    }
    fn classical_weight(&self, args: &Args<'_>) -> Result<Option<ClassicalWeight>> {
        Ok(Some(ClassicalWeight::NegativeBinomial {
            c: args.get("c")?,
            beta: args.get("beta")?,
        }))
    }
}

impl FamilyPreset for Charlier {
    fn name(&self) -> FamilyName {
        FamilyName::Charlier
    }
    fn required_args(&self) -> &'static [&'static str] {
        &["a"]
    }
    fn optional_args(&self) -> &'static [&'static str] {
        &["a1", "b0"]
    }
    fn summary(&self) -> &'static str {
        "infinite family on x_k = b0 + k, Poisson weights"
    }
    fn build(&self, args: &Args<'_>) -> Result<FamilyParams> {
        let a = args.get("a")?;
        let b0 = args.get_or("b0", 0);
        // d1 = (1 - a - b0) a1, d2 = -a1
        let d1 = -(&(&a + &b0).add_i64(-1));
        case4(args, d1, -one(args.prec))
    }
    fn classical_weight(&self, args: &Args<'_>) -> Result<Option<ClassicalWeight>> {
        Ok(Some(ClassicalWeight::Poisson { a: args.get("a")? }))
    }
}

static REGISTRY: [&dyn FamilyPreset; 7] = [
    &Wilson,
    &ContinuousHahn,
    &Hahn,
    &ContinuousDualHahn,
    &Krawtchouk,
    &Meixner,
    &Charlier,
];

/// All presets, in a stable order.
pub fn registry() -> &'static [&'static dyn FamilyPreset] {
    &REGISTRY
}

pub fn preset(name: FamilyName) -> &'static dyn FamilyPreset {
    *REGISTRY
        .iter()
        .find(|p| p.name() == name)
        .expect("every name is registered")
}

/// Builds a named family from `name=value` strings.
pub fn make_family(name: FamilyName, args: &[(&str, &str)], prec: u32) -> Result<FamilySpec> {
    let preset = preset(name);
    let family = name.cli_name();
    let mut values = BTreeMap::new();
    for (k, v) in args {
        let known = preset.required_args().contains(k) || preset.optional_args().contains(k);
        if !known {
            let mut expected: Vec<&str> = preset.required_args().to_vec();
            expected.extend(preset.optional_args());
            return Err(Error::InvalidArgument {
                family: family.into(),
                arg: (*k).into(),
                reason: format!("unknown argument; expected one of {}", expected.join(", ")),
            });
        }
        let parsed = BigComplex::parse(v, prec).map_err(|_| Error::InvalidArgument {
            family: family.into(),
            arg: (*k).into(),
            reason: format!("cannot parse {v:?} as a number"),
        })?;
        values.insert((*k).to_string(), parsed);
    }
    let view = Args {
        family,
        values: &values,
        prec,
    };
    let params = preset.build(&view)?;
    let classical_weight = preset.classical_weight(&view)?;
    Ok(FamilySpec {
        name,
        named_args: values,
        params,
        classical_weight,
    })
}

/// [`make_family`] keyed by the CLI name.
pub fn make_family_by_name(name: &str, args: &[(&str, &str)], prec: u32) -> Result<FamilySpec> {
    make_family(FamilyName::from_cli(name)?, args, prec)
}
