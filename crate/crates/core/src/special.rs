//! Small special-function kit: Lanczos gamma and Bessel J0/J1.
//!
//! J0/J1 use the power series below z = 12 and the Hankel asymptotic
//! expansion above, with coefficients generated recursively. Accuracy is
//! about 1e-12 absolute over the real line, which is well below the
//! quadrature tolerances used by the kernel module.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function (Lanczos approximation, ~15 significant digits).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS_COEF[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

fn bessel_series(nu: u32, z: f64) -> f64 {
    // J_nu(z) = sum_k (-1)^k (z/2)^{2k+nu} / (k! (k+nu)!)
    let half = z / 2.0;
    let q = half * half;
    let mut term = half.powi(nu as i32) / gamma(nu as f64 + 1.0);
    let mut sum = term;
    for k in 1..80 {
        term *= -q / (k as f64 * (k as f64 + nu as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-30) {
            break;
        }
    }
    sum
}

fn bessel_asymptotic(nu: u32, z: f64) -> f64 {
    // DLMF 10.17: J_nu(z) ~ sqrt(2/(pi z)) (P cos w - Q sin w),
    // w = z - nu pi/2 - pi/4, a_k = a_{k-1} (mu - (2k-1)^2)/(8k), mu = 4 nu^2.
    let mu = 4.0 * (nu as f64) * (nu as f64);
    let w = z - nu as f64 * PI / 2.0 - PI / 4.0;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k / z^k with sign folded in below
    let mut last = f64::INFINITY;
    for k in 0u32..24 {
        if k > 0 {
            let km = 2.0 * k as f64 - 1.0;
            a *= (mu - km * km) / (8.0 * k as f64 * z);
        }
        if a.abs() > last {
            break; // asymptotic series started diverging
        }
        last = a.abs();
        let signed = if (k / 2) % 2 == 0 { a } else { -a };
        if k % 2 == 0 {
            p += signed;
        } else {
            q += signed;
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * z)).sqrt() * (p * w.cos() - q * w.sin())
}

fn bessel_j(nu: u32, z: f64) -> f64 {
    let az = z.abs();
    let v = if az <= 12.0 {
        bessel_series(nu, az)
    } else {
        bessel_asymptotic(nu, az)
    };
    if z < 0.0 && nu % 2 == 1 {
        -v
    } else {
        v
    }
}

pub fn bessel_j0(z: f64) -> f64 {
    bessel_j(0, z)
}

pub fn bessel_j1(z: f64) -> f64 {
    bessel_j(1, z)
}

/// Regularized lower incomplete gamma P(a, x), series / continued fraction split.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let ln_ga = gamma(a).ln();
    if x < a + 1.0 {
        // series representation
        let mut ap = a;
        let mut sum = 1.0 / a;
        let mut del = sum;
        for _ in 0..500 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        sum * (-x + a * x.ln() - ln_ga).exp()
    } else {
        // Lentz continued fraction for Q(a, x)
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        let q = (-x + a * x.ln() - ln_ga).exp() * h;
        1.0 - q
    }
}

/// Error function via the incomplete gamma function, ~1e-14 accuracy.
pub fn erf(x: f64) -> f64 {
    let v = gamma_p(0.5, x * x);
    if x < 0.0 {
        -v
    } else {
        v
    }
}
