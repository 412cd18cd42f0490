//! Test-only oracles, independent of the library's numerical paths.

#![allow(dead_code)]

pub mod mie_oracle {
    //! Mie coefficients and efficiencies evaluated directly from the
    //! Riccati-Bessel expressions
    //! `a_n = [m psi_n(mx) psi_n'(x) - psi_n(x) psi_n'(mx)] / [m psi_n(mx) xi_n'(x) - xi_n(x) psi_n'(mx)]`
    //! in MPFR arithmetic. Plain upward recurrence is unstable in f64 but
    //! harmless at this precision.

    use rug::Float;

    const PREC: u32 = 2048;

    fn f(v: f64) -> Float {
        Float::with_val(PREC, v)
    }

    /// `psi_n(z)`, `chi_n(z)` for `n = 0..=n_max` by upward recurrence.
    fn riccati(z: &Float, n_max: usize) -> (Vec<Float>, Vec<Float>) {
        let (s, c) = (z.clone().sin(), z.clone().cos());
        let mut psi = vec![s.clone()];
        let mut chi = vec![c.clone()];
        let (mut psi_prev, mut chi_prev) = (c, -s);
        for n in 1..=n_max {
            let k = Float::with_val(PREC, (2 * n - 1) as f64) / z;
            let p = Float::with_val(PREC, &k * &psi[n - 1]) - &psi_prev;
            let q = Float::with_val(PREC, &k * &chi[n - 1]) - &chi_prev;
            psi_prev = psi[n - 1].clone();
            chi_prev = chi[n - 1].clone();
            psi.push(p);
            chi.push(q);
        }
        (psi, chi)
    }

    fn derivative(v: &[Float], n: usize, z: &Float) -> Float {
        let nz = Float::with_val(PREC, n as f64) / z;
        Float::with_val(PREC, &v[n - 1] - Float::with_val(PREC, &nz * &v[n]))
    }

    /// `(Re c, Im c)` pairs in extended precision for `n = 1..=n_max`.
    pub struct OracleSeries {
        pub x: f64,
        pub a: Vec<(Float, Float)>,
        pub b: Vec<(Float, Float)>,
    }

    fn coefficient(num: Float, g: Float) -> (Float, Float) {
        let d = Float::with_val(PREC, &num * &num) + Float::with_val(PREC, &g * &g);
        let re = Float::with_val(PREC, &num * &num) / &d;
        let im = Float::with_val(PREC, &num * &g) / &d;
        (re, im)
    }

    pub fn series(x: f64, m: f64, n_max: usize) -> OracleSeries {
        let xf = f(x);
        let mf = f(m);
        let mx = Float::with_val(PREC, &mf * &xf);
        let (psi_x, chi_x) = riccati(&xf, n_max);
        let (psi_mx, _) = riccati(&mx, n_max);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for n in 1..=n_max {
            let dpsi_x = derivative(&psi_x, n, &xf);
            let dchi_x = derivative(&chi_x, n, &xf);
            let dpsi_mx = derivative(&psi_mx, n, &mx);
            let m_psi_mx = Float::with_val(PREC, &mf * &psi_mx[n]);
            let m_dpsi_mx = Float::with_val(PREC, &mf * &dpsi_mx);

            let na = Float::with_val(PREC, &m_psi_mx * &dpsi_x)
                - Float::with_val(PREC, &psi_x[n] * &dpsi_mx);
            let ga = Float::with_val(PREC, &m_psi_mx * &dchi_x)
                - Float::with_val(PREC, &chi_x[n] * &dpsi_mx);
            let nb = Float::with_val(PREC, &psi_mx[n] * &dpsi_x)
                - Float::with_val(PREC, &psi_x[n] * &m_dpsi_mx);
            let gb = Float::with_val(PREC, &psi_mx[n] * &dchi_x)
                - Float::with_val(PREC, &chi_x[n] * &m_dpsi_mx);
            a.push(coefficient(na, ga));
            b.push(coefficient(nb, gb));
        }
        OracleSeries { x, a, b }
    }

    /// `(Q_ext, Q_rad)` summed entirely in extended precision.
    pub fn efficiencies(x: f64, m: f64) -> (f64, f64) {
        let n_max = (x + 4.0 * x.cbrt() + 2.0).ceil() as usize + 30;
        let s = series(x, m, n_max);
        let mut ext = f(0.0);
        let mut asym = f(0.0);
        for i in 0..n_max {
            let n = (i + 1) as f64;
            let (ar, ai) = &s.a[i];
            let (br, bi) = &s.b[i];
            ext += Float::with_val(PREC, ar + br) * f(2.0 * n + 1.0);
            if i + 1 < n_max {
                let (ar1, ai1) = &s.a[i + 1];
                let (br1, bi1) = &s.b[i + 1];
                let cross = Float::with_val(PREC, ar * ar1)
                    + Float::with_val(PREC, ai * ai1)
                    + Float::with_val(PREC, br * br1)
                    + Float::with_val(PREC, bi * bi1);
                asym += cross * f(n * (n + 2.0) / (n + 1.0));
            }
            let ab = Float::with_val(PREC, ar * br) + Float::with_val(PREC, ai * bi);
            asym += ab * (f(2.0 * n + 1.0) / f(n * (n + 1.0)));
        }
        let x2 = f(x * x);
        let q_ext = Float::with_val(PREC, &ext * 2u32) / &x2;
        let q_rad = Float::with_val(PREC, &q_ext - Float::with_val(PREC, &asym * 4u32) / &x2);
        (q_ext.to_f64(), q_rad.to_f64())
    }

    pub fn coefficient_f64(c: &(Float, Float)) -> (f64, f64) {
        (c.0.to_f64(), c.1.to_f64())
    }
}

pub fn relative_error(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}
