//! The nine scalars of the Hénon-Lane-Emden system
//! `(-Δ)^{k+α/2} u = |x|^a v^p`, `(-Δ)^{l+β/2} v = |x|^b u^q` in dimension `n`.

use serde::{Deserialize, Serialize};
use std::ops::Deref;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n: u32,
    pub k: u32,
    pub l: u32,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub q: f64,
}

impl Default for ProblemParams {
    fn default() -> Self {
        Self {
            n: 3,
            k: 0,
            l: 0,
            alpha: 1.0,
            beta: 1.0,
            a: 0.0,
            b: 0.0,
            p: 1.0,
            q: 1.0,
        }
    }
}

impl ProblemParams {
    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    /// Total order `2k + α` of the operator acting on `u`.
    pub fn order_u(&self) -> f64 {
        2.0 * self.k as f64 + self.alpha
    }

    /// Total order `2l + β` of the operator acting on `v`.
    pub fn order_v(&self) -> f64 {
        2.0 * self.l as f64 + self.beta
    }

    pub fn pq(&self) -> f64 {
        self.p * self.q
    }

    /// Critical exponent pair `((n+2k+α+2a)/(n-2l-β), (n+2l+β+2b)/(n-2k-α))`.
    pub fn critical_pair(&self) -> (f64, f64) {
        let n = self.dim();
        (
            (n + self.order_u() + 2.0 * self.a) / (n - self.order_v()),
            (n + self.order_v() + 2.0 * self.b) / (n - self.order_u()),
        )
    }

    /// The same system with the roles of `u` and `v` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            n: self.n,
            k: self.l,
            l: self.k,
            alpha: self.beta,
            beta: self.alpha,
            a: self.b,
            b: self.a,
            p: self.q,
            q: self.p,
        }
    }

    pub fn validate(self) -> Result<ValidatedParams> {
        validate(self)
    }
}

/// Parameters that passed [`validate`], with the derived order flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidatedParams {
    #[serde(flatten)]
    params: ProblemParams,
    pub subcritical_order: bool,
    pub high_order: bool,
}

impl ValidatedParams {
    pub fn params(&self) -> &ProblemParams {
        &self.params
    }
}

impl Deref for ValidatedParams {
    type Target = ProblemParams;

    fn deref(&self) -> &ProblemParams {
        &self.params
    }
}

pub fn validate(params: ProblemParams) -> Result<ValidatedParams> {
    if params.n == 0 {
        return Err(Error::out_of_range("n", 0.0, "dimension must be at least 1"));
    }
    let cap = params.dim().min(2.0);
    for (field, value) in [("alpha", params.alpha), ("beta", params.beta)] {
        if !value.is_finite() || value <= 0.0 || value >= cap {
            return Err(Error::out_of_range(
                field,
                value,
                format!("must satisfy 0 < {field} < min(2, n) = {cap}"),
            ));
        }
    }
    for (field, value) in [("a", params.a), ("b", params.b), ("p", params.p), ("q", params.q)] {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::out_of_range(field, value, "must be finite and >= 0"));
        }
    }
    let n = params.dim();
    let subcritical_order = params.order_u() < n && params.order_v() < n;
    Ok(ValidatedParams {
        params,
        subcritical_order,
        high_order: !subcritical_order,
    })
}
