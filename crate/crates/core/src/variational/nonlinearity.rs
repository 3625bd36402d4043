use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// A user-supplied `f(x, t)` with an optional closed-form primitive.
#[derive(Clone)]
pub struct CustomNonlinearity {
    pub name: String,
    pub f: VertexFn,
    pub primitive: Option<VertexFn>,
}

impl fmt::Debug for CustomNonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomNonlinearity")
            .field("name", &self.name)
            .field("closed_form_primitive", &self.primitive.is_some())
            .finish()
    }
}

fn one() -> f64 {
    1.0
}

/// The right-hand side `f(x, t)` of the semilinear equations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `a |t|^{q−2} t`, primitive `a |s|^q / q`.
    Power {
        q: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `a t e^{t²}`, primitive `a (e^{s²} − 1) / 2`.
    ExpGrowth {
        #[serde(default = "one")]
        scale: f64,
    },
    /// Piecewise-linear interpolation of samples on `t ≥ 0` (starting at 0),
    /// extended oddly to `t < 0` and linearly past the last sample.
    Tabulated { t: Vec<f64>, f: Vec<f64> },
    #[serde(skip)]
    Custom(CustomNonlinearity),
}

impl Nonlinearity {
    /// Parses `power{q}`, `power{q,a}`, `exp_growth`, `exp_growth{a}`, or a JSON object.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            let nl: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
            nl.validate()?;
            return Ok(nl);
        }
        let (name, args) = match text.find('{') {
            Some(i) if text.ends_with('}') => (&text[..i], &text[i + 1..text.len() - 1]),
            Some(_) => return Err(Error::Parse(format!("unbalanced braces in `{text}`"))),
            None => (text, ""),
        };
        let nums = args
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number `{s}` in `{text}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let nl = match (name, nums.as_slice()) {
            ("power", [q]) => Self::Power { q: *q, scale: 1.0 },
            ("power", [q, a]) => Self::Power { q: *q, scale: *a },
            ("exp_growth", []) => Self::ExpGrowth { scale: 1.0 },
            ("exp_growth", [a]) => Self::ExpGrowth { scale: *a },
            _ => return Err(Error::Parse(format!("unknown nonlinearity `{text}`"))),
        };
        nl.validate()?;
        Ok(nl)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Power { q, scale } if !(*q > 1.0) || !scale.is_finite() => {
                Err(Error::Parse(format!("power needs q > 1, got {q}")))
            }
            Self::Tabulated { t, f } => {
                let ok = t.len() >= 2
                    && t.len() == f.len()
                    && t[0] == 0.0
                    && f[0] == 0.0
                    && t.windows(2).all(|w| w[1] > w[0]);
                if ok {
                    Ok(())
                } else {
                    Err(Error::Parse(
                        "tabulated nonlinearity needs increasing t starting at (0, 0)".into(),
                    ))
                }
            }
            _ => Ok(()),
        }
    }

    /// `f(x, t)`.
    pub fn value(&self, x: usize, t: f64) -> f64 {
        match self {
            Self::Power { q, scale } => {
                if t == 0.0 {
                    0.0
                } else {
                    scale * t.abs().powf(q - 2.0) * t
                }
            }
            Self::ExpGrowth { scale } => scale * t * (t * t).exp(),
            Self::Tabulated { t: ts, f } => t.signum() * interpolate(ts, f, t.abs()),
            Self::Custom(c) => (c.f)(x, t),
        }
    }

    /// `F(x, s) = ∫₀ˢ f(x, t) dt`; closed form where available, adaptive Simpson otherwise.
    pub fn primitive(&self, x: usize, s: f64) -> f64 {
        match self {
            Self::Power { q, scale } => scale * s.abs().powf(*q) / q,
            Self::ExpGrowth { scale } => 0.5 * scale * (s * s).exp_m1(),
            Self::Tabulated { t, f } => tabulated_primitive(t, f, s.abs()),
            Self::Custom(c) => match &c.primitive {
                Some(p) => p(x, s),
                None => adaptive_simpson(&|t| (c.f)(x, t), 0.0, s, 1e-10),
            },
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Power { q, scale } => format!("power{{{q},{scale}}}"),
            Self::ExpGrowth { scale } => format!("exp_growth{{{scale}}}"),
            Self::Tabulated { t, .. } => format!("tabulated[{}]", t.len()),
            Self::Custom(c) => format!("custom:{}", c.name),
        }
    }
}

fn interpolate(ts: &[f64], fs: &[f64], t: f64) -> f64 {
    let n = ts.len();
    let i = match ts.iter().position(|&v| v > t) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => n - 2,
    };
    let slope = (fs[i + 1] - fs[i]) / (ts[i + 1] - ts[i]);
    fs[i] + slope * (t - ts[i])
}

// exact integral of the piecewise-linear interpolant over [0, s], s ≥ 0
fn tabulated_primitive(ts: &[f64], fs: &[f64], s: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..ts.len() - 1 {
        let (a, b) = (ts[i], ts[i + 1]);
        let last = i == ts.len() - 2;
        if s <= a {
            break;
        }
        let hi = if last { s } else { s.min(b) };
        acc += 0.5 * (hi - a) * (fs[i] + interpolate(ts, fs, hi));
        if s <= b {
            break;
        }
    }
    acc
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Whether the hypotheses concern `t ≥ 0` only (the truncated variants) or both signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

/// A nonlinearity together with the exponents its hypotheses refer to.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub nonlinearity: Nonlinearity,
    /// Operator exponent `p > 1`.
    pub p: f64,
    /// Ambrosetti–Rabinowitz exponent `q > p`.
    pub q: f64,
    /// `s₀` (one-sided) or `M` (two-sided); searched on the sampling grid when absent.
    pub threshold: Option<f64>,
    pub mode: Sidedness,
}

impl NonlinearitySpec {
    pub fn new(nonlinearity: Nonlinearity, p: f64, q: f64, mode: Sidedness) -> Result<Self> {
        crate::calculus::check_exponent(p)?;
        if !(q > p) {
            return Err(Error::BadExponent {
                constraint: "q > p",
                value: q,
            });
        }
        Ok(Self {
            nonlinearity,
            p,
            q,
            threshold: None,
            mode,
        })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = Some(threshold);
        self
    }

    pub fn f(&self, x: usize, t: f64) -> f64 {
        self.nonlinearity.value(x, t)
    }

    pub fn primitive(&self, x: usize, s: f64) -> f64 {
        self.nonlinearity.primitive(x, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn primitive_matches_quadrature(nl: &Nonlinearity, s: f64) {
        let quad = adaptive_simpson(&|t| nl.value(0, t), 0.0, s, 1e-12);
        let closed = nl.primitive(0, s);
        assert!(
            (quad - closed).abs() <= 1e-8 * (1.0 + closed.abs()),
            "{} at {s}: {quad} vs {closed}",
            nl.describe()
        );
    }

    proptest! {
        #[test]
        fn builtin_primitives_match_quadrature(s in -2.5f64..2.5, q in 1.5f64..6.0) {
            primitive_matches_quadrature(&Nonlinearity::Power { q, scale: 0.7 }, s);
            primitive_matches_quadrature(&Nonlinearity::ExpGrowth { scale: 1.0 }, s);
            primitive_matches_quadrature(
                &Nonlinearity::Tabulated { t: vec![0.0, 0.5, 1.0, 2.0], f: vec![0.0, 0.1, 0.9, 4.0] },
                s,
            );
        }
    }

    #[test]
    fn vanishes_at_zero() {
        for nl in [
            Nonlinearity::Power { q: 3.0, scale: 1.0 },
            Nonlinearity::ExpGrowth { scale: 2.0 },
            Nonlinearity::Tabulated {
                t: vec![0.0, 1.0],
                f: vec![0.0, 1.0],
            },
        ] {
            assert_eq!(nl.value(0, 0.0), 0.0);
            assert_eq!(nl.primitive(0, 0.0), 0.0);
        }
    }

    #[test]
    fn parsing() {
        assert!(matches!(
            Nonlinearity::parse("power{4}").unwrap(),
            Nonlinearity::Power { q, scale } if q == 4.0 && scale == 1.0
        ));
        assert!(matches!(
            Nonlinearity::parse("power{3, 0.5}").unwrap(),
            Nonlinearity::Power { q, scale } if q == 3.0 && scale == 0.5
        ));
        assert!(matches!(
            Nonlinearity::parse("exp_growth").unwrap(),
            Nonlinearity::ExpGrowth { scale } if scale == 1.0
        ));
        assert!(matches!(
            Nonlinearity::parse(r#"{"kind":"tabulated","t":[0,1,2],"f":[0,1,8]}"#).unwrap(),
            Nonlinearity::Tabulated { .. }
        ));
        assert!(Nonlinearity::parse("cubic").is_err());
        assert!(Nonlinearity::parse(r#"{"kind":"tabulated","t":[1,2],"f":[0,1]}"#).is_err());
    }

    #[test]
    fn custom_primitive_by_quadrature() {
        let nl = Nonlinearity::Custom(CustomNonlinearity {
            name: "sinh".into(),
            f: Arc::new(|_, t: f64| t.sinh()),
            primitive: None,
        });
        assert!((nl.primitive(0, 1.3) - (1.3f64.cosh() - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn spec_requires_q_above_p() {
        let nl = Nonlinearity::Power { q: 3.0, scale: 1.0 };
        assert!(NonlinearitySpec::new(nl.clone(), 3.0, 3.0, Sidedness::OneSided).is_err());
        assert!(NonlinearitySpec::new(nl, 2.0, 3.0, Sidedness::OneSided).is_ok());
    }
}
