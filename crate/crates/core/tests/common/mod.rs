//! Independent numerical oracles shared by the integration tests. Nothing
//! here calls into the library's own quadrature or root finders.
#![allow(dead_code)]

/// 10-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_X: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

fn gl10(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for k in 0..5 {
        s += GL_W[k] * (f(m - h * GL_X[k]) + f(m + h * GL_X[k]));
    }
    s * h
}

fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (gl10(f, a, m), gl10(f, m, b));
    if depth == 0 || (l + r - whole).abs() <= tol.max(1e-13 * (l + r).abs()) {
        return l + r;
    }
    let half = (0.5 * tol).max(1e-16);
    adapt(f, a, m, l, half, depth - 1) + adapt(f, m, b, r, half, depth - 1)
}

/// Adaptive Gauss-Legendre quadrature; never evaluates `f` at `a` or `b`.
pub fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let whole = gl10(&f, a, b);
    adapt(&f, a, b, whole, tol, 30)
}

/// Iterated 2D quadrature over a rectangle.
pub fn quad2(f: impl Fn(f64, f64) -> f64, (a, b): (f64, f64), (c, d): (f64, f64), tol: f64) -> f64 {
    quad(|x| quad(|y| f(x, y), c, d, tol), a, b, tol)
}

/// Plain bisection for an increasing function.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if f(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Standard normal CDF by quadrature of the density from zero.
pub fn normal_cdf(x: f64) -> f64 {
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if x.abs() < 8.0 {
        0.5 + x.signum() * quad(phi, 0.0, x.abs(), 1e-16)
    } else if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Standard normal quantile by bisection on [`normal_cdf`].
pub fn normal_quantile(p: f64) -> f64 {
    bisect(|x| normal_cdf(x) - p, -9.0, 9.0)
}

/// Bivariate standard normal log-density with correlation `rho`.
pub fn bvn_log_pdf(x: f64, y: f64, rho: f64) -> f64 {
    let r2 = 1.0 - rho * rho;
    -(2.0 * std::f64::consts::PI).ln() - 0.5 * r2.ln() - (x * x - 2.0 * rho * x * y + y * y) / (2.0 * r2)
}

/// Deterministic column-major matrix of uniforms from a simple LCG, for
/// probe points that must not depend on the library's RNG plumbing.
pub fn lcg_points(seed: u64, n: usize, d: usize) -> Vec<Vec<f64>> {
    let mut s = seed.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
    let mut cols = vec![Vec::with_capacity(n); d];
    for _ in 0..n {
        for col in cols.iter_mut() {
            s = s.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
            let u = ((s >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
            col.push(0.02 + 0.96 * u);
        }
    }
    cols
}

/// Every (family, rotation, parameter) probe used by the copula oracles.
pub fn copula_probes() -> Vec<vinecop::bicop::PairCopulaSpec> {
    use vinecop::bicop::{Family, PairCopulaSpec, Rotation};
    let mut out = vec![PairCopulaSpec::independence()];
    let params: [(Family, [f64; 3]); 5] = [
        (Family::Gaussian, [-0.7, 0.3, 0.85]),
        (Family::Clayton, [0.5, 2.0, 5.0]),
        (Family::Gumbel, [1.2, 2.0, 4.0]),
        (Family::Frank, [-6.0, 1.5, 8.0]),
        (Family::Joe, [1.3, 2.0, 4.0]),
    ];
    for (family, thetas) in params {
        let rotations: &[Rotation] =
            if family.is_tail_asymmetric() { &Rotation::ALL } else { &[Rotation::R0] };
        for &r in rotations {
            for &t in &thetas {
                out.push(PairCopulaSpec::new(family, r, vec![t]).unwrap());
            }
        }
    }
    out
}
