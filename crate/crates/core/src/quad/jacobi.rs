//! Gauss-Jacobi rules on [-1, 1] for the weight (1-x)^a (1+x)^b,
//! computed by the Golub-Welsch eigenvalue method.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Sum of `w_i g(x_i)`; approximates ∫ (1-x)^a (1+x)^b g(x) dx.
    pub fn apply(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }
}

/// Zeroth moment ∫_{-1}^{1} (1-x)^a (1+x)^b dx.
pub fn moment0(a: f64, b: f64) -> f64 {
    ((a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0))
    .exp()
}

/// `n`-point rule for exponents `a, b > -1`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Rule {
    assert!(n >= 1, "rule needs at least one node");
    assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    let s = a + b;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        jac[(k, k)] = if k == 0 {
            (b - a) / (s + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + s) * (2.0 * kf + s + 2.0))
        };
        if k + 1 < n {
            let m = kf + 1.0;
            let off2 = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + s).powi(2) * (3.0 + s))
            } else {
                4.0 * m * (m + a) * (m + b) * (m + s)
                    / ((2.0 * m + s).powi(2) * (2.0 * m + s + 1.0) * (2.0 * m + s - 1.0))
            };
            let off = off2.sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mu0 = moment0(a, b);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Rule { nodes, weights }
}

type Key = (usize, u64, u64);

thread_local! {
    static CACHE: RefCell<HashMap<Key, Rc<Rule>>> = RefCell::new(HashMap::new());
}

/// Memoised [`gauss_jacobi`], one cache per thread.
pub fn cached(n: usize, a: f64, b: f64) -> Rc<Rule> {
    let key = (n, a.to_bits(), b.to_bits());
    CACHE.with(|c| {
        if let Some(rule) = c.borrow().get(&key) {
            return Rc::clone(rule);
        }
        let rule = Rc::new(gauss_jacobi(n, a, b));
        c.borrow_mut().insert(key, Rc::clone(&rule));
        rule
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_nodes_and_weights() {
        let r = gauss_jacobi(3, 0.0, 0.0);
        let x = (0.6f64).sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-15);
        assert!(r.nodes[1].abs() < 1e-15);
        assert!((r.weights[0] - 5.0 / 9.0).abs() < 1e-14);
        assert!((r.weights[1] - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_weights_are_equal() {
        let r = gauss_jacobi(6, -0.5, -0.5);
        for w in &r.weights {
            assert!((w - std::f64::consts::PI / 6.0).abs() < 1e-13);
        }
    }

    #[test]
    fn polynomial_exactness() {
        // ∫ (1-x)^a (1+x)^b x^k for small k via direct Beta moments
        let (a, b) = (-0.3, 0.7);
        let r = gauss_jacobi(8, a, b);
        // substitute x = 2y - 1: ∫ = 2^{a+b+1} ∫_0^1 (1-y)^a y^b (2y-1)^k dy
        let beta = |p: f64, q: f64| (ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)).exp();
        let scale = 2f64.powf(a + b + 1.0);
        let exact_x2 = scale
            * (4.0 * beta(b + 3.0, a + 1.0) - 4.0 * beta(b + 2.0, a + 1.0) + beta(b + 1.0, a + 1.0));
        let q = r.apply(|x| x * x);
        assert!((q - exact_x2).abs() < 1e-13 * exact_x2.abs());
        let q7 = r.apply(|x| x.powi(7));
        let exact7: f64 = (0..=7)
            .map(|j| {
                let c = binom(7, j) * 2f64.powi(j as i32) * if (7 - j) % 2 == 0 { 1.0 } else { -1.0 };
                // B(b+1+j, a+1) by the recurrence, avoiding separate log-gamma rounding
                let ratio: f64 = (0..j).map(|i| (b + 1.0 + i as f64) / (a + b + 2.0 + i as f64)).product();
                c * beta(b + 1.0, a + 1.0) * ratio
            })
            .sum::<f64>()
            * scale;
        assert!((q7 - exact7).abs() < 1e-11 * exact7.abs(), "{q7} vs {exact7}");
    }

    fn binom(n: u32, k: u32) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn cache_returns_identical_rule() {
        let a = cached(10, 0.25, -0.5);
        let b = cached(10, 0.25, -0.5);
        assert!(Rc::ptr_eq(&a, &b));
        assert_eq!(*a, gauss_jacobi(10, 0.25, -0.5));
    }
}
