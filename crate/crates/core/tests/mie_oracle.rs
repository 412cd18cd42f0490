mod common;

use common::{mie_oracle, relative_error};
use sphercool::mie::{self, RefractiveIndex, SizeParameter};

fn series(x: f64, m: f64, n_max: usize) -> mie::MieSeries {
    mie::mie_coefficients(SizeParameter::new(x).unwrap(), RefractiveIndex::new(m).unwrap(), n_max).unwrap()
}

#[test]
fn first_coefficients_match_extended_precision() {
    let s = series(1.0, 1.5, 10);
    let oracle = mie_oracle::series(1.0, 1.5, 10);
    for n in 1..=10 {
        let (ar, ai) = mie_oracle::coefficient_f64(&oracle.a[n - 1]);
        let (br, bi) = mie_oracle::coefficient_f64(&oracle.b[n - 1]);
        let a = s.a(n);
        let b = s.b(n);
        if n == 1 {
            assert!(relative_error(a.re, ar) < 1e-10, "a1.re {} vs {}", a.re, ar);
            assert!(relative_error(a.im, ai) < 1e-10, "a1.im {} vs {}", a.im, ai);
            assert!(relative_error(b.re, br) < 1e-10, "b1.re {} vs {}", b.re, br);
            assert!(relative_error(b.im, bi) < 1e-10, "b1.im {} vs {}", b.im, bi);
        }
        assert!((a.re - ar).hypot(a.im - ai) < 1e-15, "n={n} {a} vs {ar} {ai}");
    }
}

#[test]
fn efficiencies_match_extended_precision() {
    for &x in &[1.0, 10.0, 40.5] {
        for &m in &[1.45, 1.5] {
            let (ext_o, rad_o) = mie_oracle::efficiencies(x, m);
            let s = series(x, m, mie::default_n_max(x));
            let ext = mie::q_ext(&s).unwrap();
            let rad = mie::q_rad(&s).unwrap();
            println!("x={x} m={m} q_ext={ext:.15e} oracle={ext_o:.15e} q_rad={rad:.15e} oracle={rad_o:.15e}");
            assert!(relative_error(ext, ext_o) < 1e-10, "q_ext x={x} m={m}");
            assert!(relative_error(rad, rad_o) < 1e-10, "q_rad x={x} m={m}");
        }
    }
}

#[test]
fn coefficients_at_large_size_match_extended_precision() {
    let (x, m) = (40.5, 1.45);
    let n_max = mie::wiscombe_cutoff(x);
    let s = series(x, m, n_max);
    let oracle = mie_oracle::series(x, m, n_max);
    for n in 1..=n_max {
        let (ar, ai) = mie_oracle::coefficient_f64(&oracle.a[n - 1]);
        let (br, bi) = mie_oracle::coefficient_f64(&oracle.b[n - 1]);
        assert!((s.a(n).re - ar).abs() + (s.a(n).im - ai).abs() < 1e-12, "a_{n} {} vs {ar} {ai}", s.a(n));
        assert!((s.b(n).re - br).abs() + (s.b(n).im - bi).abs() < 1e-12, "b_{n}");
    }
}
