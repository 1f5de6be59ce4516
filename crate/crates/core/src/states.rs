//! Single-mode reference states as dense matrices on a truncated Fock space.

use faer::Mat;
use num_complex::Complex64 as C64;

/// `|k⟩⟨k|`.
pub fn fock(n: usize, k: usize) -> Mat<C64> {
    assert!(k < n, "level {k} outside cutoff {n}");
    let mut m = Mat::<C64>::zeros(n, n);
    m[(k, k)] = C64::new(1.0, 0.0);
    m
}

/// Coherent state `|α⟩⟨α|`, renormalised on the truncated space.
pub fn coherent(n: usize, alpha: C64) -> Mat<C64> {
    let mut amp = Vec::with_capacity(n);
    let mut c = C64::new(1.0, 0.0);
    for k in 0..n {
        if k > 0 {
            c *= alpha / (k as f64).sqrt();
        }
        amp.push(c);
    }
    let norm: f64 = amp.iter().map(|a| a.norm_sqr()).sum();
    Mat::from_fn(n, n, |i, j| amp[i] * amp[j].conj() / norm)
}

/// Thermal state with mean occupation `nbar` before truncation, renormalised
/// on the truncated space.
pub fn thermal(n: usize, nbar: f64) -> Mat<C64> {
    let r = nbar / (1.0 + nbar);
    let p: Vec<f64> = (0..n).map(|k| r.powi(k as i32)).collect();
    let z: f64 = p.iter().sum();
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(p[i] / z, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}
