//! Sampled checks of the growth hypotheses on a nonlinearity.
//!
//! A finite sample cannot establish a `limsup` or a statement about all large
//! `s`; every check here is labelled as sampled evidence.

use serde::{Deserialize, Serialize};

use super::nonlinearity::{NonlinearitySpec, Sidedness};

/// Logarithmic sampling grid for `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    /// Number of smallest grid points used for the small-`t` limit checks.
    pub tail: usize,
}

impl Default for SamplingGrid {
    fn default() -> Self {
        Self {
            t_min: 1e-8,
            t_max: 1e3,
            points: 200,
            tail: 20,
        }
    }
}

impl SamplingGrid {
    pub fn samples(&self) -> Vec<f64> {
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        let n = self.points.max(2);
        (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    /// A pointwise property checked at every sample.
    Sampled,
    /// A limit property estimated from the small-`t` tail.
    SampledLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub vertex: usize,
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub evidence: Evidence,
    pub detail: String,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub threshold_eig: f64,
    pub checks: Vec<HypothesisCheck>,
    /// Samples skipped because `f` or `F` overflowed.
    pub overflowed_samples: usize,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&HypothesisCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

// strict inequalities must clear the threshold by a relative margin
const STRICT_MARGIN: f64 = 1e-12;

/// Checks (H₁)–(H₄) for one-sided specs and (A₁)–(A₃) for two-sided specs
/// on every vertex `0..vertices`, against the eigenvalue threshold `threshold_eig`.
pub fn check_hypotheses(
    nl: &NonlinearitySpec,
    threshold_eig: f64,
    vertices: usize,
) -> HypothesisReport {
    check_hypotheses_on(nl, threshold_eig, vertices, &SamplingGrid::default())
}

pub fn check_hypotheses_on(
    nl: &NonlinearitySpec,
    threshold_eig: f64,
    vertices: usize,
    grid: &SamplingGrid,
) -> HypothesisReport {
    let ts = grid.samples();
    let signs: &[f64] = match nl.mode {
        Sidedness::OneSided => &[1.0],
        Sidedness::TwoSided => &[1.0, -1.0],
    };
    let names = match nl.mode {
        Sidedness::OneSided => ["H1", "H2", "H3", "H4"],
        Sidedness::TwoSided => ["A1", "", "A3", "A2"],
    };
    let mut overflowed = 0;

    // continuity proxy and f(x,0) = 0
    let mut regular: Option<Witness> = None;
    let mut zero: Option<Witness> = None;
    let mut sign: Option<Witness> = None;
    for x in 0..vertices {
        let f0 = nl.f(x, 0.0);
        if f0 != 0.0 && zero.is_none() {
            zero = Some(Witness {
                vertex: x,
                t: 0.0,
                value: f0,
            });
        }
        for &s in signs {
            for &t in &ts {
                let v = nl.f(x, s * t);
                if v.is_nan() && regular.is_none() {
                    regular = Some(Witness {
                        vertex: x,
                        t: s * t,
                        value: v,
                    });
                }
                if v.is_infinite() {
                    overflowed += 1;
                }
                if nl.mode == Sidedness::OneSided && v < 0.0 && sign.is_none() {
                    sign = Some(Witness {
                        vertex: x,
                        t,
                        value: v,
                    });
                }
            }
        }
    }

    let mut checks = Vec::new();
    match nl.mode {
        Sidedness::OneSided => {
            checks.push(HypothesisCheck {
                name: names[0].into(),
                passed: regular.is_none(),
                evidence: Evidence::Sampled,
                detail: "f(x,t) evaluates to a number at every sample".into(),
                witness: regular,
            });
            let w = zero.or(sign);
            checks.push(HypothesisCheck {
                name: names[1].into(),
                passed: w.is_none(),
                evidence: Evidence::Sampled,
                detail: "f(x,0) = 0 and f(x,t) >= 0 for t >= 0".into(),
                witness: w,
            });
        }
        Sidedness::TwoSided => {
            let w = zero.or(regular);
            checks.push(HypothesisCheck {
                name: names[0].into(),
                passed: w.is_none(),
                evidence: Evidence::Sampled,
                detail: "f(x,0) = 0 and f(x,t) evaluates to a number at every sample".into(),
                witness: w,
            });
        }
    }

    // superlinearity: qF(x,s) <= s f(x,s) (and F > 0 two-sided) from some s0 on
    let q = nl.q;
    let ar_holds = |x: usize, s: f64| -> Option<bool> {
        let big_f = nl.primitive(x, s);
        let sf = s * nl.f(x, s);
        if !big_f.is_finite() || !sf.is_finite() {
            return None;
        }
        let ineq = q * big_f <= sf + STRICT_MARGIN * sf.abs();
        Some(match nl.mode {
            Sidedness::OneSided => ineq,
            Sidedness::TwoSided => big_f > 0.0 && ineq,
        })
    };
    let mut s0_needed = 0.0f64;
    let mut ar_witness = None;
    let mut evaluable = 0usize;
    for x in 0..vertices {
        for &sg in signs {
            let mut last_fail: Option<usize> = None;
            for (i, &t) in ts.iter().enumerate() {
                match ar_holds(x, sg * t) {
                    None => overflowed += 1,
                    Some(true) => evaluable += 1,
                    Some(false) => {
                        evaluable += 1;
                        let counts = nl.threshold.is_none_or(|th| t >= th);
                        if counts {
                            last_fail = Some(i);
                        }
                    }
                }
            }
            if let Some(i) = last_fail {
                if nl.threshold.is_some() || i + 1 >= ts.len() {
                    ar_witness.get_or_insert(Witness {
                        vertex: x,
                        t: sg * ts[i],
                        value: q * nl.primitive(x, sg * ts[i]) - sg * ts[i] * nl.f(x, sg * ts[i]),
                    });
                } else {
                    s0_needed = s0_needed.max(ts[i + 1]);
                }
            }
        }
    }
    let s0 = nl.threshold.unwrap_or(s0_needed);
    let ar_passed = ar_witness.is_none() && evaluable > 0;
    checks.push(HypothesisCheck {
        name: names[2].into(),
        passed: ar_passed,
        evidence: Evidence::Sampled,
        detail: format!(
            "q F(x,s) <= s f(x,s) for |s| >= {s0:.6e} (q = {q}){}",
            if nl.mode == Sidedness::TwoSided {
                ", with F > 0"
            } else {
                ""
            }
        ),
        witness: ar_witness,
    });

    // small-t limit: limsup f / t^{p-1} < threshold
    let tail = &ts[..grid.tail.min(ts.len())];
    let mut sup = f64::NEG_INFINITY;
    let mut sup_at = None;
    for x in 0..vertices {
        for &sg in signs {
            for &t in tail {
                let v = nl.f(x, sg * t);
                let ratio = match nl.mode {
                    Sidedness::OneSided => v / t.powf(nl.p - 1.0),
                    Sidedness::TwoSided => v.abs() / t.powf(nl.p - 1.0),
                };
                if ratio > sup || ratio.is_nan() {
                    sup = ratio;
                    sup_at = Some(Witness {
                        vertex: x,
                        t: sg * t,
                        value: ratio,
                    });
                }
            }
        }
    }
    let limit_passed = sup < threshold_eig - STRICT_MARGIN * threshold_eig.abs();
    checks.push(HypothesisCheck {
        name: names[3].into(),
        passed: limit_passed,
        evidence: Evidence::SampledLimit,
        detail: format!(
            "max of f/t^(p-1) over t <= {:.1e} is {sup:.12e}; threshold {threshold_eig:.12e}",
            tail.last().copied().unwrap_or(0.0)
        ),
        witness: if limit_passed { None } else { sup_at },
    });

    HypothesisReport {
        threshold_eig,
        checks,
        overflowed_samples: overflowed,
    }
}
