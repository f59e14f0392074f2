//! Bounded symbols `f : C^n -> C`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cplx::{self, C64};
use crate::error::{FockError, Result};

pub type Evaluator = Arc<dyn Fn(&[C64]) -> C64 + Send + Sync>;

/// Declared structure of a symbol. Only informational except for
/// [`SymbolTag::Radial`], which enables the exact finite-section path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolTag {
    Radial,
    Angular,
    CompactSupport,
    ConstantPlusC0,
    Generic,
}

#[derive(Clone)]
pub struct SymbolFunction {
    eval: Evaluator,
    sup_bound: f64,
    tag: SymbolTag,
    radial_breaks: Vec<f64>,
    limit: Option<C64>,
    label: String,
}

impl fmt::Debug for SymbolFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolFunction")
            .field("label", &self.label)
            .field("sup_bound", &self.sup_bound)
            .field("tag", &self.tag)
            .field("radial_breaks", &self.radial_breaks)
            .field("limit", &self.limit)
            .finish()
    }
}

/// Serializable summary of a symbol (the evaluator itself is not data).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolInfo {
    pub label: String,
    pub sup_bound: f64,
    pub tag: SymbolTag,
    pub radial_breaks: Vec<f64>,
    #[serde(with = "cplx::opt")]
    pub limit: Option<C64>,
}

fn norm(z: &[C64]) -> f64 {
    cplx::norm_sqr(z).sqrt()
}

impl SymbolFunction {
    pub fn new(
        label: impl Into<String>,
        sup_bound: f64,
        tag: SymbolTag,
        eval: impl Fn(&[C64]) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            sup_bound,
            tag,
            radial_breaks: Vec::new(),
            limit: None,
            label: label.into(),
        }
    }

    pub fn constant(c: C64) -> Self {
        let mut s = Self::new(format!("const({})", fmt_c(c)), c.norm(), SymbolTag::Radial, move |_| c);
        s.limit = Some(c);
        s
    }

    /// Smooth bump `height * exp(1 - 1/(1 - rho^2))`, `rho = |z - center| / radius < 1`.
    pub fn bump(center: Vec<C64>, radius: f64, height: C64) -> Self {
        let label = format!(
            "bump([{}],{radius},{})",
            center.iter().map(|c| fmt_c(*c)).collect::<Vec<_>>().join(","),
            fmt_c(height)
        );
        let tag = if center.iter().all(|c| *c == C64::new(0.0, 0.0)) {
            SymbolTag::Radial
        } else {
            SymbolTag::CompactSupport
        };
        let mut s = Self::new(label, height.norm(), tag, move |z| {
            let rho2 = z
                .iter()
                .enumerate()
                .map(|(i, zi)| (zi - center.get(i).copied().unwrap_or_default()).norm_sqr())
                .sum::<f64>()
                / (radius * radius);
            if rho2 < 1.0 {
                height * (1.0 - 1.0 / (1.0 - rho2)).exp()
            } else {
                C64::new(0.0, 0.0)
            }
        });
        s.limit = Some(C64::new(0.0, 0.0));
        s
    }

    /// Indicator of the closed ball `|z| <= radius`.
    pub fn indicator_ball(radius: f64) -> Self {
        let mut s = Self::new(format!("indicator(R={radius})"), 1.0, SymbolTag::Radial, move |z| {
            if norm(z) <= radius {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        s.radial_breaks = vec![radius];
        s.limit = Some(C64::new(0.0, 0.0));
        s
    }

    /// `f(z) = g(|z|^2)`.
    pub fn radial(
        label: impl Into<String>,
        sup_bound: f64,
        g: impl Fn(f64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(label, sup_bound, SymbolTag::Radial, move |z| g(cplx::norm_sqr(z)))
    }

    /// `f(z) = (z_1/|z_1|)^winding * envelope(|z|^2)`, zero at `z_1 = 0` when `winding != 0`.
    pub fn angular(
        label: impl Into<String>,
        winding: i32,
        sup_bound: f64,
        envelope: impl Fn(f64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(label, sup_bound, SymbolTag::Angular, move |z| {
            let s = cplx::norm_sqr(z);
            let r1 = z[0].norm();
            if winding == 0 {
                envelope(s)
            } else if r1 == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                (z[0] / r1).powi(winding) * envelope(s)
            }
        })
    }

    /// `z_1 / sqrt(1 + |z|^2)`, the standard vanishing-oscillation symbol
    /// whose boundary values fill the unit circle.
    pub fn angular_unit() -> Self {
        Self::angular("angular(1,sqrt(s/(1+s)))", 1, 1.0, |s| C64::new((s / (1.0 + s)).sqrt(), 0.0))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn tag(&self) -> SymbolTag {
        self.tag
    }

    pub fn radial_breaks(&self) -> &[f64] {
        &self.radial_breaks
    }

    /// Declared limit at infinity, when the symbol is known to have one.
    pub fn declared_limit(&self) -> Option<C64> {
        self.limit
    }

    pub fn info(&self) -> SymbolInfo {
        SymbolInfo {
            label: self.label.clone(),
            sup_bound: self.sup_bound,
            tag: self.tag,
            radial_breaks: self.radial_breaks.clone(),
            limit: self.limit,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_tag(mut self, tag: SymbolTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.radial_breaks = breaks;
        self
    }

    pub fn with_limit(mut self, limit: Option<C64>) -> Self {
        self.limit = limit;
        self
    }

    #[inline]
    pub fn eval(&self, z: &[C64]) -> C64 {
        (self.eval)(z)
    }

    pub fn evaluator(&self) -> Evaluator {
        self.eval.clone()
    }

    /// Samples at `nodes`, failing if `|f| > sup_bound` anywhere.
    pub fn sample_checked(&self, nodes: &[Vec<C64>]) -> Result<Vec<C64>> {
        let slack = 1e-12 * self.sup_bound.max(1.0);
        nodes
            .iter()
            .enumerate()
            .map(|(node, z)| {
                let v = self.eval(z);
                if !(v.norm() <= self.sup_bound + slack) {
                    Err(FockError::SymbolBoundViolated { node, value: v.norm(), bound: self.sup_bound })
                } else {
                    Ok(v)
                }
            })
            .collect()
    }

    pub fn is_real_on(&self, values: &[C64]) -> bool {
        values.iter().all(|v| v.im == 0.0)
    }

    /// `f o tau_shift`, i.e. `w -> f(w - shift)`.
    pub fn translated(&self, shift: &[C64]) -> Self {
        let f = self.eval.clone();
        let shift = shift.to_vec();
        let label = format!(
            "{}∘τ[{}]",
            self.label,
            shift.iter().map(|c| fmt_c(*c)).collect::<Vec<_>>().join(",")
        );
        let tag = match self.tag {
            SymbolTag::Radial | SymbolTag::Angular => SymbolTag::Generic,
            t => t,
        };
        let mut out = Self::new(label, self.sup_bound, tag, move |z| {
            let w: Vec<C64> = z.iter().zip(shift.iter().chain(std::iter::repeat(&C64::new(0.0, 0.0)))).map(|(a, b)| a - b).collect();
            f(&w)
        });
        out.limit = self.limit;
        out
    }

    pub fn scaled(&self, c: C64) -> Self {
        let f = self.eval.clone();
        let mut out = Self::new(format!("{}*{}", fmt_c(c), self.label), self.sup_bound * c.norm(), self.tag, move |z| {
            c * f(z)
        });
        out.radial_breaks = self.radial_breaks.clone();
        out.limit = self.limit.map(|l| l * c);
        out
    }

    pub fn sum(&self, other: &SymbolFunction) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let mut out = Self::new(
            format!("{}+{}", self.label, other.label),
            self.sup_bound + other.sup_bound,
            combine_tags(self.tag, other.tag, true),
            move |z| f(z) + g(z),
        );
        out.radial_breaks = merge_breaks(&self.radial_breaks, &other.radial_breaks);
        out.limit = match (self.limit, other.limit) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        out
    }

    pub fn product(&self, other: &SymbolFunction) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let mut out = Self::new(
            format!("({})*({})", self.label, other.label),
            self.sup_bound * other.sup_bound,
            combine_tags(self.tag, other.tag, false),
            move |z| f(z) * g(z),
        );
        out.radial_breaks = merge_breaks(&self.radial_breaks, &other.radial_breaks);
        out.limit = match (self.limit, other.limit) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        out
    }

    /// `|f - g|^2` as a symbol.
    pub fn abs_diff_sq(&self, other: &SymbolFunction) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let bound = (self.sup_bound + other.sup_bound).powi(2);
        Self::new(format!("|{}-{}|^2", self.label, other.label), bound, SymbolTag::Generic, move |z| {
            C64::new((f(z) - g(z)).norm_sqr(), 0.0)
        })
    }
}

fn combine_tags(a: SymbolTag, b: SymbolTag, additive: bool) -> SymbolTag {
    use SymbolTag::*;
    match (a, b) {
        (Radial, Radial) => Radial,
        (CompactSupport, CompactSupport) => CompactSupport,
        (Radial, CompactSupport) | (CompactSupport, Radial) if additive => ConstantPlusC0,
        (ConstantPlusC0, CompactSupport) | (CompactSupport, ConstantPlusC0) if additive => ConstantPlusC0,
        (CompactSupport, _) | (_, CompactSupport) if !additive => CompactSupport,
        _ => Generic,
    }
}

fn merge_breaks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().chain(b).copied().collect();
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.dedup();
    out
}

pub(crate) fn fmt_c(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}
