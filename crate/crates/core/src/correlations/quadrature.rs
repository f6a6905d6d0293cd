//! Deterministic adaptive Gauss-Kronrod quadrature in one and three
//! dimensions.
//!
//! The three-dimensional driver works in rounds: every pending box is
//! evaluated (in parallel), the estimates are summed in a fixed order, and the
//! boxes carrying most of the error are bisected. Results do not depend on the
//! number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const NODES: usize = 15;

/// Nodes and weights of the 15-point Kronrod rule and its embedded 7-point
/// Gauss rule on `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct Rule {
    pub x: [f64; NODES],
    pub wk: [f64; NODES],
    pub wg: [f64; NODES],
}

impl Rule {
    pub fn new(lo: f64, hi: f64) -> Self {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let mut x = [0.0; NODES];
        let mut wk = [0.0; NODES];
        let mut wg = [0.0; NODES];
        for i in 0..7 {
            let g = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
            x[i] = c - h * XGK[i];
            x[NODES - 1 - i] = c + h * XGK[i];
            wk[i] = h * WGK[i];
            wk[NODES - 1 - i] = h * WGK[i];
            wg[i] = h * g;
            wg[NODES - 1 - i] = h * g;
        }
        x[7] = c;
        wk[7] = h * WGK[7];
        wg[7] = h * WG[3];
        Self { x, wk, wg }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

/// Adaptive 1D integration of `f` over `[a, b]`, starting from `panels`
/// equal panels. Returns the estimate over `[a, b]` and over `[a, split]`
/// (`split` should be a panel boundary).
pub fn integrate_1d<F>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    split: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> (Estimate, Complex64, bool)
where
    F: Fn(f64) -> Complex64,
{
    let eval = |lo: f64, hi: f64| {
        let r = Rule::new(lo, hi);
        let mut k = Complex64::new(0.0, 0.0);
        let mut g = Complex64::new(0.0, 0.0);
        let v: [Complex64; NODES] = std::array::from_fn(|i| f(r.x[i]));
        for i in 0..NODES {
            k += r.wk[i] * v[i];
            g += r.wg[i] * v[i];
        }
        let mean = k / (hi - lo);
        let resasc: f64 = (0..NODES).map(|i| r.wk[i] * (v[i] - mean).norm()).sum();
        (lo, hi, k, scaled_error((k - g).norm(), resasc))
    };
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    let mut cells: Vec<(f64, f64, Complex64, f64)> =
        (0..n).map(|i| eval(a + h * i as f64, if i + 1 == n { b } else { a + h * (i + 1) as f64 })).collect();
    let converged = loop {
        let total: Complex64 = cells.iter().map(|c| c.2).sum();
        let err: f64 = cells.iter().map(|c| c.3).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            break true;
        }
        if cells.len() >= max_panels {
            break false;
        }
        let worst = cells
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3).then(y.0.cmp(&x.0)))
            .map(|(i, _)| i)
            .expect("non-empty");
        let (lo, hi, _, _) = cells[worst];
        let mid = 0.5 * (lo + hi);
        cells[worst] = eval(lo, mid);
        cells.insert(worst + 1, eval(mid, hi));
    };
    let value: Complex64 = cells.iter().map(|c| c.2).sum();
    let error: f64 = cells.iter().map(|c| c.3).sum();
    let half: Complex64 = cells.iter().filter(|c| c.1 <= split * (1.0 + 1e-12)).map(|c| c.2).sum();
    (Estimate { value, error }, half, converged)
}

/// Integrand supplying values on a tensor grid of nodes.
pub trait TensorIntegrand: Sync {
    /// Writes `f(x[i], y[j], z[k])` to `out[(i * 15 + j) * 15 + k]`.
    fn fill(&self, x: &[f64; NODES], y: &[f64; NODES], z: &[f64; NODES], out: &mut [Complex64]);
}

impl<F> TensorIntegrand for F
where
    F: Fn(f64, f64, f64) -> Complex64 + Sync,
{
    fn fill(&self, x: &[f64; NODES], y: &[f64; NODES], z: &[f64; NODES], out: &mut [Complex64]) {
        for i in 0..NODES {
            for j in 0..NODES {
                for k in 0..NODES {
                    out[(i * NODES + j) * NODES + k] = self(x[i], y[j], z[k]);
                }
            }
        }
    }
}

/// QUADPACK error heuristic: the Kronrod-Gauss difference rescaled by the
/// variation of the integrand over the panel.
fn scaled_error(diff: f64, resasc: f64) -> f64 {
    if resasc > 0.0 && diff > 0.0 {
        resasc * (200.0 * diff / resasc).powf(1.5).min(1.0)
    } else {
        diff
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    lo: [f64; 3],
    hi: [f64; 3],
    value: Complex64,
    error: f64,
    axis: usize,
}

fn evaluate_cell<I: TensorIntegrand>(f: &I, lo: [f64; 3], hi: [f64; 3], buf: &mut [Complex64]) -> Cell {
    let r = [Rule::new(lo[0], hi[0]), Rule::new(lo[1], hi[1]), Rule::new(lo[2], hi[2])];
    f.fill(&r[0].x, &r[1].x, &r[2].x, buf);
    let mut kkk = Complex64::new(0.0, 0.0);
    // One axis with the Gauss rule, the others Kronrod.
    let mut partial = [Complex64::new(0.0, 0.0); 3];
    for i in 0..NODES {
        for j in 0..NODES {
            let mut sk = Complex64::new(0.0, 0.0);
            let mut sg = Complex64::new(0.0, 0.0);
            let row = &buf[(i * NODES + j) * NODES..(i * NODES + j + 1) * NODES];
            for k in 0..NODES {
                sk += r[2].wk[k] * row[k];
                sg += r[2].wg[k] * row[k];
            }
            let wij = r[0].wk[i] * r[1].wk[j];
            kkk += wij * sk;
            partial[2] += wij * sg;
            partial[0] += r[0].wg[i] * r[1].wk[j] * sk;
            partial[1] += r[0].wk[i] * r[1].wg[j] * sk;
        }
    }
    let volume = (0..3).map(|a| hi[a] - lo[a]).product::<f64>();
    let mean = kkk / volume;
    let mut resasc = 0.0;
    for i in 0..NODES {
        for j in 0..NODES {
            let wij = r[0].wk[i] * r[1].wk[j];
            let row = &buf[(i * NODES + j) * NODES..(i * NODES + j + 1) * NODES];
            for k in 0..NODES {
                resasc += wij * r[2].wk[k] * (row[k] - mean).norm();
            }
        }
    }
    let errs = [
        scaled_error((kkk - partial[0]).norm(), resasc),
        scaled_error((kkk - partial[1]).norm(), resasc),
        scaled_error((kkk - partial[2]).norm(), resasc),
    ];
    let mut axis = 0;
    for a in 1..3 {
        if errs[a] > errs[axis] {
            axis = a;
        }
    }
    Cell { lo, hi, value: kkk, error: errs.iter().sum(), axis }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubatureResult {
    pub estimate: Estimate,
    /// Sum over boxes lying inside `[0, split]` on every axis.
    pub inner: Complex64,
    pub cells: usize,
    pub converged: bool,
}

/// Adaptive cubature over the box `[0, hi]` starting from a uniform grid of
/// `panels` boxes per axis.
pub fn integrate_3d<I: TensorIntegrand>(
    f: &I,
    hi: [f64; 3],
    panels: [usize; 3],
    split: [f64; 3],
    abs_tol: f64,
    rel_tol: f64,
    max_cells: usize,
) -> CubatureResult {
    let mut boxes: Vec<([f64; 3], [f64; 3])> = Vec::new();
    let h = [hi[0] / panels[0] as f64, hi[1] / panels[1] as f64, hi[2] / panels[2] as f64];
    let edge = |a: usize, i: usize| if i == panels[a] { hi[a] } else { h[a] * i as f64 };
    for i in 0..panels[0] {
        for j in 0..panels[1] {
            for k in 0..panels[2] {
                boxes.push(([edge(0, i), edge(1, j), edge(2, k)], [edge(0, i + 1), edge(1, j + 1), edge(2, k + 1)]));
            }
        }
    }
    let run = |boxes: &[([f64; 3], [f64; 3])]| -> Vec<Cell> {
        boxes
            .par_iter()
            .map_init(
                || vec![Complex64::new(0.0, 0.0); NODES * NODES * NODES],
                |buf, &(lo, hi)| evaluate_cell(f, lo, hi, buf),
            )
            .collect()
    };
    let mut cells = run(&boxes);
    let converged = loop {
        let total: Complex64 = cells.iter().map(|c| c.value).sum();
        let err: f64 = cells.iter().map(|c| c.error).sum();
        let tol = abs_tol.max(rel_tol * total.norm());
        if err <= tol {
            break true;
        }
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by(|&a, &b| cells[b].error.total_cmp(&cells[a].error).then(a.cmp(&b)));
        let mut remaining = err;
        let mut selected = vec![false; cells.len()];
        let mut count = 0;
        for &i in &order {
            if remaining <= 0.5 * tol {
                break;
            }
            selected[i] = true;
            remaining -= cells[i].error;
            count += 1;
        }
        if cells.len() + count > max_cells {
            break false;
        }
        let mut children = Vec::with_capacity(2 * count);
        for (i, c) in cells.iter().enumerate() {
            if selected[i] {
                let a = c.axis;
                let mid = 0.5 * (c.lo[a] + c.hi[a]);
                let mut hi_left = c.hi;
                hi_left[a] = mid;
                let mut lo_right = c.lo;
                lo_right[a] = mid;
                children.push((c.lo, hi_left));
                children.push((lo_right, c.hi));
            }
        }
        let evaluated = run(&children);
        let mut next = Vec::with_capacity(cells.len() + count);
        let mut it = evaluated.into_iter();
        for (i, c) in cells.iter().enumerate() {
            if selected[i] {
                next.push(it.next().expect("child"));
                next.push(it.next().expect("child"));
            } else {
                next.push(*c);
            }
        }
        cells = next;
    };
    let value: Complex64 = cells.iter().map(|c| c.value).sum();
    let error: f64 = cells.iter().map(|c| c.error).sum();
    let inner: Complex64 = cells
        .iter()
        .filter(|c| (0..3).all(|a| c.hi[a] <= split[a] * (1.0 + 1e-12)))
        .map(|c| c.value)
        .sum();
    CubatureResult { estimate: Estimate { value, error }, inner, cells: cells.len(), converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_integrates_polynomials() {
        let r = Rule::new(-1.0, 2.0);
        let k: f64 = (0..NODES).map(|i| r.wk[i] * r.x[i].powi(20)).sum();
        let exact = (2f64.powi(21) + 1.0) / 21.0;
        assert_relative_eq!(k, exact, max_relative = 1e-13);
        let g: f64 = (0..NODES).map(|i| r.wg[i] * r.x[i].powi(12)).sum();
        assert_relative_eq!(g, (2f64.powi(13) + 1.0) / 13.0, max_relative = 1e-13);
    }

    #[test]
    fn oscillatory_1d() {
        let f = |t: f64| Complex64::new(-0.3 * t, -2.0 * t).exp();
        let (est, _, ok) = integrate_1d(f, 0.0, 40.0, 2, 20.0, 1e-14, 1e-12, 10_000);
        assert!(ok);
        let exact = (Complex64::new(1.0, 0.0) - Complex64::new(-12.0, -80.0).exp()) / Complex64::new(0.3, 2.0);
        assert!((est.value - exact).norm() < 1e-11);
    }

    #[test]
    fn separable_3d() {
        let f = |x: f64, y: f64, z: f64| Complex64::new(-x - 0.5 * y - 0.25 * z, x - y + 0.5 * z).exp();
        let res = integrate_3d(&f, [8.0, 8.0, 8.0], [2, 2, 2], [4.0; 3], 1e-13, 1e-10, 100_000);
        assert!(res.converged);
        let one = |r: Complex64| (Complex64::new(1.0, 0.0) - (r * 8.0).exp()) / -r;
        let exact = one(Complex64::new(-1.0, 1.0)) * one(Complex64::new(-0.5, -1.0)) * one(Complex64::new(-0.25, 0.5));
        assert!((res.estimate.value - exact).norm() < 1e-9 * exact.norm());
    }
}
