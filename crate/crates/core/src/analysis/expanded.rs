//! Second, independent transcription of the INS/ICNS coefficients.
//!
//! Each coefficient is written out as a polynomial in `x = K/(cM)`,
//! `y = 1/(cM)` and `u = 1/ω`. The grouped forms in the parent module must
//! agree with these to rounding error.

pub fn ins(m: f64, k: f64, c: f64, omega: f64) -> [f64; 3] {
    let (x, y, u) = vars(m, k, c, omega);
    let (u2, x2) = (u * u, x * x);
    let c2 = 4.0 - 4.0 * u + u2 - 4.0 * x * u + 3.0 * x * u2 + x2 * u2;
    let c3 = 4.0 * y - 8.0 * y * u + 4.0 * y * u2 - 4.0 * x * y * u + 5.0 * x * y * u2 + x2 * y * u2;
    let c1 = 4.0 - 4.0 * u + u2 + 4.0 * y - 8.0 * y * u + 4.0 * y * u2 - 4.0 * x * u + 2.0 * x * u2
        - 4.0 * x * y * u
        + 5.0 * x * y * u2
        + x2 * u2
        + x2 * y * u2;
    [c1, c2, c3]
}

pub fn icns(m: f64, k: f64, c: f64, omega: f64) -> [f64; 5] {
    let (x, y, u) = vars(m, k, c, omega);
    let p = |e: i32| u.powi(e);
    let (x2, x3, x4) = (x * x, x.powi(3), x.powi(4));

    let base = 2.0 - u - 3.0 * x * u + 3.0 * x * p(2) + x2 * p(2) - x2 * p(3);
    let c4 = base * base;

    let c5 = 4.0 - 4.0 * u + p(2) - 4.0 * x * u + 3.0 * x * p(2) + x2 * p(2)
        + y * (-8.0 * u + 28.0 * p(2) - 22.0 * p(3) + 4.0 * p(4))
        + x * y * (16.0 * p(2) - 44.0 * p(3) + 27.0 * p(4) - 4.0 * p(5))
        + x2 * y * (-4.0 * p(3) + 13.0 * p(4) - 8.0 * p(5) + p(6))
        + x3 * y * (p(4) - 2.0 * p(5) + p(6));

    let c6 = 4.0 * x - 8.0 * x * u + 4.0 * x * p(2) - 4.0 * x2 * u + 9.0 * x2 * p(2) - 4.0 * x2 * p(3)
        + x3 * p(2)
        - 2.0 * x3 * p(3)
        + x3 * p(4);

    let c7 = 4.0 - 4.0 * u + p(2) - 4.0 * x * u + 2.0 * x * p(2) + x2 * p(2)
        + y * (4.0 - 8.0 * u + 8.0 * p(2) - 2.0 * p(3))
        + x * y * (-4.0 * u + 9.0 * p(2) - 4.0 * p(3))
        + x2 * y * (p(2) - 2.0 * p(3));

    let c8 = 4.0 * x - 8.0 * x * u + 4.0 * x * p(2) - 4.0 * x2 * u + 5.0 * x2 * p(2) + x3 * p(2)
        + y * (-4.0 + 16.0 * p(2) - 16.0 * p(3) + 4.0 * p(4))
        + x * y * (-4.0 * u + 51.0 * p(2) - 84.0 * p(3) + 38.0 * p(4) - 4.0 * p(5))
        + x2 * y * (15.0 * p(2) - 66.0 * p(3) + 65.0 * p(4) - 20.0 * p(5) + p(6))
        + x3 * y * (-8.0 * p(3) + 21.0 * p(4) - 16.0 * p(5) + 3.0 * p(6))
        + x4 * y * (p(4) - 2.0 * p(5) + p(6));

    [c4, c5, c6, c7, c8]
}

fn vars(m: f64, k: f64, c: f64, omega: f64) -> (f64, f64, f64) {
    let n = c * m;
    (k / n, 1.0 / n, 1.0 / omega)
}
