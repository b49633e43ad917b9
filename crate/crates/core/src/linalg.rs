//! Small dense complex systems: LU with partial pivoting and the exact
//! 1-norm condition number.

use num_complex::Complex64;

use crate::error::{MazerError, Result};

/// Condition numbers above this are reported as errors.
pub const COND_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct Matrix {
    pub n: usize,
    pub a: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.a[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.a[r * self.n + c] = v;
    }

    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|c| (0..self.n).map(|r| self.get(r, c).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n).map(|r| (0..self.n).map(|c| self.get(r, c) * x[c]).sum()).collect()
    }
}

pub struct Lu {
    lu: Matrix,
    piv: Vec<usize>,
}

impl Lu {
    pub fn new(m: &Matrix) -> Result<Self> {
        let n = m.n;
        let mut lu = m.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu.get(i, k).norm().total_cmp(&lu.get(j, k).norm()))
                .unwrap();
            let pivot = lu.get(p, k);
            if pivot.norm() == 0.0 || !pivot.is_finite() {
                return Err(MazerError::Conditioning { estimate: f64::INFINITY, threshold: COND_THRESHOLD });
            }
            if p != k {
                for c in 0..n {
                    lu.a.swap(k * n + c, p * n + c);
                }
                piv.swap(k, p);
            }
            for r in k + 1..n {
                let f = lu.get(r, k) / pivot;
                lu.set(r, k, f);
                for c in k + 1..n {
                    let v = lu.get(r, c) - f * lu.get(k, c);
                    lu.set(r, c, v);
                }
            }
        }
        Ok(Self { lu, piv })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.n;
        let mut x: Vec<Complex64> = self.piv.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                let v = x[r] - self.lu.get(r, c) * x[c];
                x[r] = v;
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                let v = x[r] - self.lu.get(r, c) * x[c];
                x[r] = v;
            }
            x[r] /= self.lu.get(r, r);
        }
        x
    }

    pub fn inverse_norm1(&self) -> f64 {
        let n = self.lu.n;
        (0..n)
            .map(|c| {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[c] = Complex64::new(1.0, 0.0);
                self.solve(&e).iter().map(|v| v.norm()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Solves `m x = b`, failing when the 1-norm condition number exceeds
/// `threshold`. Returns the solution and the condition number.
pub fn solve_checked(m: &Matrix, b: &[Complex64], threshold: f64) -> Result<(Vec<Complex64>, f64)> {
    let lu = Lu::new(m)?;
    let cond = m.norm1() * lu.inverse_norm1();
    if !cond.is_finite() || cond > threshold {
        return Err(MazerError::Conditioning { estimate: cond, threshold });
    }
    Ok((lu.solve(b), cond))
}

/// Complex number stored as mantissa * e^{log_scale}; lets amplitudes whose
/// magnitude exceeds the f64 range be carried through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn new(v: Complex64) -> Self {
        Self { mantissa: v, log_scale: 0.0 }
    }

    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    /// Value multiplied by e^{-shift}; finite even when `value` is not.
    pub fn value_shifted(&self, shift: f64) -> Complex64 {
        self.mantissa * (self.log_scale - shift).exp()
    }

    pub fn ln_norm(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }
}
