//! Dense univariate polynomials with real coefficients.
//!
//! Every built-in flux is polynomial, so exact derivatives, antiderivatives,
//! extrema and sign changes on an interval are available without sampling.

use serde::{Deserialize, Serialize};

/// Coefficients in ascending order: `coeffs[k]` multiplies `v^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    /// `scale * v^power`
    pub fn monomial(power: usize, scale: f64) -> Self {
        let mut coeffs = vec![0.0; power + 1];
        coeffs[power] = scale;
        Polynomial::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    #[inline]
    pub fn eval(&self, v: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * v + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Polynomial {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(self.coeffs.iter().enumerate().map(|(k, &c)| c / (k as f64 + 1.0)));
        Polynomial::new(coeffs)
    }

    /// Points of `[lo, hi]` where the polynomial changes sign or vanishes with
    /// a sign change of its neighbours, in increasing order. Interior only.
    pub fn sign_changes(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.is_zero() || self.degree() == 0 || !(lo < hi) {
            return Vec::new();
        }
        // Monotone pieces are delimited by the critical points.
        let mut knots = vec![lo];
        knots.extend(self.derivative().sign_changes(lo, hi));
        knots.push(hi);
        let mut roots = Vec::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
                continue;
            }
            roots.push(self.bisect(a, b, fa));
        }
        // A zero exactly on a knot with a sign change across it.
        for &k in &knots[1..knots.len() - 1] {
            if self.eval(k) == 0.0 {
                let eps = 1e-9 * (hi - lo);
                let l = self.eval((k - eps).max(lo));
                let r = self.eval((k + eps).min(hi));
                if l.signum() != r.signum() && l != 0.0 && r != 0.0 {
                    roots.push(k);
                }
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        roots.retain(|&r| r > lo && r < hi);
        roots
    }

    fn bisect(&self, mut a: f64, mut b: f64, fa: f64) -> f64 {
        let sa = fa.signum();
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = self.eval(m);
            if fm == 0.0 {
                return m;
            }
            if fm.signum() == sa {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// Candidate extremum locations on `[lo, hi]`: endpoints and critical points.
    fn extremum_candidates(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = vec![lo, hi];
        pts.extend(self.derivative().sign_changes(lo, hi));
        pts
    }

    pub fn max_abs_on(&self, lo: f64, hi: f64) -> f64 {
        self.extremum_candidates(lo, hi)
            .into_iter()
            .map(|v| self.eval(v).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_on(&self, lo: f64, hi: f64) -> f64 {
        self.extremum_candidates(lo, hi)
            .into_iter()
            .map(|v| self.eval(v))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_on(&self, lo: f64, hi: f64) -> f64 {
        self.extremum_candidates(lo, hi)
            .into_iter()
            .map(|v| self.eval(v))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
