//! Small complex dense-matrix helpers on top of `nalgebra`.

use nalgebra::{Complex, DMatrix};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Replaces `m` by `(m + mᴴ)/2`.
pub fn hermitize(m: &mut CMat) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = c64(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖a − b‖_F`.
pub fn frobenius_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `Re tr(aᴴ b)`, i.e. the real Frobenius inner product.
pub fn real_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Largest singular value of `m`, by power iteration on `mᴴm`.
///
/// Stops once the relative change of the estimate drops below `rel_tol` or
/// after `max_iter` iterations.
pub fn spectral_norm(m: &CMat, rel_tol: f64, max_iter: usize) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    // Fixed, non-symmetric start so no singular vector is systematically missed.
    let mut v = nalgebra::DVector::<C64>::from_fn(n, |i, _| {
        let t = (i as f64 + 1.0) * 0.754_877_666_246_692_7;
        c64(1.0 + t.fract(), 0.5 * (t * 1.618_033_988_749_895).fract())
    });
    let norm = v.norm();
    v /= c64(norm, 0.0);
    let mut estimate = 0.0_f64;
    for _ in 0..max_iter {
        let mv = m * &v;
        let w = m.ad_mul(&mv);
        let wn = w.norm();
        if wn == 0.0 {
            return 0.0;
        }
        let next = mv.norm();
        v = w / c64(wn, 0.0);
        if (next - estimate).abs() <= rel_tol * next {
            return next;
        }
        estimate = next;
    }
    estimate
}
