#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rhszego_core::hyperelliptic::{HyperellipticCurve, Lift, Tracer};
use rhszego_core::kernels::{KPoint, KernelContext};
use rhszego_core::quadrature::gauss_legendre;
use rhszego_core::{Tolerances, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Branch points with real parts at least 0.35 apart and |Im| ≤ 0.7, plus a
/// basepoint well above them.
pub fn random_branch_points(r: &mut ChaCha8Rng, g: usize) -> (Vec<C64>, C64) {
    let n = 2 * g + 2;
    let mut x = -0.6 * n as f64;
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        x += 0.35 + 0.9 * r.gen::<f64>();
        pts.push(c(x, r.gen_range(-0.7..0.7)));
    }
    let mid = 0.5 * (pts[0].re + pts[n - 1].re);
    (pts, c(mid + r.gen_range(-0.3..0.3), 2.4))
}

pub fn random_curve(seed: u64, g: usize) -> HyperellipticCurve {
    let (pts, base) = random_branch_points(&mut rng(seed), g);
    HyperellipticCurve::new(&pts, base, 1, Tolerances::default()).unwrap()
}

pub fn genus_one() -> KernelContext {
    let cu = HyperellipticCurve::new(
        &[c(-1.0, 0.2), c(-0.1, -0.5), c(0.6, 0.4), c(1.4, -0.3)],
        c(0.2, 2.1),
        1,
        Tolerances::default(),
    )
    .unwrap();
    KernelContext::new(cu).unwrap()
}

pub fn genus_two() -> KernelContext {
    let cu = HyperellipticCurve::new(
        &[c(-1.2, 0.3), c(-0.4, -0.6), c(0.1, 0.5), c(0.8, -0.2), c(1.3, 0.7), c(2.0, -0.4)],
        c(0.37, 2.9),
        1,
        Tolerances::default(),
    )
    .unwrap();
    KernelContext::new(cu).unwrap()
}

/// A random point at distance ≥ `min_dist` from every branch point inside
/// the box around the curve.
pub fn random_lambda(r: &mut ChaCha8Rng, ctx: &KernelContext, min_dist: f64) -> C64 {
    let e = ctx.curve().branch_points();
    let (lo, hi) = (e[0].re - 0.8, e[e.len() - 1].re + 0.8);
    loop {
        let z = c(r.gen_range(lo..hi), r.gen_range(-1.5..1.5));
        if ctx.curve().nearest_branch_point(z).1 > min_dist {
            return z;
        }
    }
}

/// `n` random kernel points on random sheets, pairwise separated by 0.15.
pub fn random_points(r: &mut ChaCha8Rng, ctx: &KernelContext, n: usize) -> Vec<KPoint> {
    let mut out: Vec<KPoint> = Vec::new();
    while out.len() < n {
        let z = random_lambda(r, ctx, 0.15);
        if out.iter().any(|p| (p.lambda - z).norm() < 0.15) {
            continue;
        }
        let sheet = if r.gen::<bool>() { 1 } else { 2 };
        out.push(ctx.point(&ctx.lift(z, sheet).unwrap()).unwrap());
    }
    out
}

/// Lift continued from the basepoint to `target` that lies on sheet 1.
pub fn sheet_one_lift(ctx: &KernelContext, target: C64) -> Lift {
    let l = ctx.lift(target, 1).unwrap();
    assert_eq!(ctx.curve().sheet_of(l.lambda, l.w), 1);
    l
}

/// `∮ f(P) dλ_P` along a closed polyline starting at `start`, with 16-node
/// Gauss–Legendre panels of length ≤ 0.2. Returns the integral and the lift
/// at the end of the loop.
pub fn loop_integral(
    ctx: &KernelContext,
    start: &Lift,
    vertices: &[C64],
    mut f: impl FnMut(&KPoint) -> C64,
) -> (C64, Lift) {
    let tr: Tracer = ctx.tracer();
    let (x, w) = gauss_legendre(16);
    let mut acc = c(0.0, 0.0);
    let mut cur = start.clone();
    for &v in vertices {
        let a = cur.lambda;
        let panels = ((v - a).norm() / 0.2).ceil().max(1.0) as usize;
        for k in 0..panels {
            let pa = a + (v - a) * (k as f64 / panels as f64);
            let pb = a + (v - a) * ((k + 1) as f64 / panels as f64);
            let half = (pb - pa) * 0.5;
            let mid = (pa + pb) * 0.5;
            let mut node = cur.clone();
            for (xi, wi) in x.iter().zip(&w) {
                tr.segment(&mut node, mid + half * *xi).unwrap();
                acc += f(&ctx.point(&node).unwrap()) * half * *wi;
            }
            tr.segment(&mut cur, pb).unwrap();
        }
    }
    (acc, cur)
}
