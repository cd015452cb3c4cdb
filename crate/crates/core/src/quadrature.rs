//! Deterministic adaptive cubature on rectangles, the unit disk and the
//! exterior disk.
//!
//! The domain is cut by grid lines through every tagged singular point so
//! that each singular point is a corner of the cells around it. Cells with a
//! singular corner are split into triangles with apex at that corner and
//! parametrised as `p + s·(e(t) − p)` (a Duffy fan), which turns an
//! `|z−p|⁻¹` singularity into a bounded integrand. The disk `s < s_min`
//! around the apex is excluded and its mass estimated from the innermost ring.
//!
//! Refinement is global: each round refines the cells carrying the largest
//! error estimates until the total estimate meets the tolerance. Cells are
//! kept in a fixed order and summed sequentially, so results do not depend
//! on the number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss rule needs at least one node");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (w * half);
        }
        acc
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Closed axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }

    fn quarters(&self) -> [Rect; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        [
            Rect::new(self.x0, xm, self.y0, ym),
            Rect::new(xm, self.x1, self.y0, ym),
            Rect::new(self.x0, xm, ym, self.y1),
            Rect::new(xm, self.x1, ym, self.y1),
        ]
    }
}

/// A point where the integrand behaves like `|z − at|^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint {
    pub at: Complex64,
    pub exponent: f64,
}

impl SingularPoint {
    pub fn new(at: Complex64, exponent: f64) -> Self {
        Self { at, exponent }
    }

    pub fn inverse_distance(at: Complex64) -> Self {
        Self::new(at, -1.0)
    }
}

/// Tolerances and rule settings for the cubature routines.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: usize,
    pub singular_points: Vec<SingularPoint>,
    /// Order of the tensor Gauss–Legendre base rule.
    pub order: usize,
    /// Radius of the excluded disk at a singular apex, relative to the fan size.
    pub exclusion: f64,
    /// Hard cap on the number of refinement rounds.
    pub max_rounds: usize,
    /// Hard cap on the number of live cells.
    pub max_cells: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-12,
            max_depth: 14,
            singular_points: Vec::new(),
            order: 8,
            exclusion: 1e-10,
            max_rounds: 400,
            max_cells: 20_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    pub fn with_singular_points(mut self, points: Vec<SingularPoint>) -> Self {
        self.singular_points = points;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.order == 0 {
            return Err(Error::Domain("quadrature tolerances and order must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub cells: usize,
    pub evaluations: usize,
    pub warnings: Vec<String>,
}

/// How a parameter rectangle is mapped into the physical plane.
#[derive(Debug, Clone, Copy)]
enum Patch {
    Plain,
    /// Triangle with apex `apex` and far edge `a → b`, `(s, t) ∈ [s_min,1]×[0,1]`.
    Fan { apex: Complex64, a: Complex64, b: Complex64, jac: f64 },
}

impl Patch {
    #[inline]
    fn eval<F: Fn(f64, f64) -> f64>(&self, f: &F, s: f64, t: f64) -> f64 {
        match *self {
            Patch::Plain => f(s, t),
            Patch::Fan { apex, a, b, jac } => {
                let edge = a + (b - a) * t;
                let p = apex + (edge - apex) * s;
                let v = f(p.re, p.im);
                if v == 0.0 {
                    0.0
                } else {
                    v * s * jac
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    rect: Rect,
    patch: usize,
    coarse: f64,
    fine: f64,
    depth: usize,
    frozen: bool,
}

impl Cell {
    fn error(&self) -> f64 {
        (self.fine - self.coarse).abs()
    }
}

struct Engine<'a, F> {
    f: &'a F,
    rule: GaussRule,
    patches: Vec<Patch>,
}

impl<'a, F: Fn(f64, f64) -> f64 + Sync> Engine<'a, F> {
    fn tensor(&self, patch: usize, r: &Rect) -> f64 {
        let p = &self.patches[patch];
        let hx = 0.5 * (r.x1 - r.x0);
        let mx = 0.5 * (r.x1 + r.x0);
        let hy = 0.5 * (r.y1 - r.y0);
        let my = 0.5 * (r.y1 + r.y0);
        let mut acc = 0.0;
        for (xi, wi) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let x = mx + hx * xi;
            let mut row = 0.0;
            for (yj, wj) in self.rule.nodes.iter().zip(&self.rule.weights) {
                row += wj * p.eval(self.f, x, my + hy * yj);
            }
            acc += wi * row;
        }
        acc * hx * hy
    }

    /// Fills in `fine` (sum over the four quarters) for a cell whose `coarse` is known.
    fn finish(&self, mut cell: Cell) -> (Cell, [f64; 4]) {
        let q = cell.rect.quarters();
        let vals = [
            self.tensor(cell.patch, &q[0]),
            self.tensor(cell.patch, &q[1]),
            self.tensor(cell.patch, &q[2]),
            self.tensor(cell.patch, &q[3]),
        ];
        cell.fine = vals.iter().sum();
        (cell, vals)
    }

    fn evals_per_cell(&self) -> usize {
        4 * self.rule.nodes.len() * self.rule.nodes.len()
    }
}

/// Patches, seed cells tagged with their patch, and singular fans as (patch, exponent).
type PatchLayout = (Vec<Patch>, Vec<(Rect, usize)>, Vec<(usize, f64)>);

/// Splits `rect` along lines through the singular points and assigns patches.
fn build_patches(rect: &Rect, spec: &QuadratureSpec) -> PatchLayout {
    let inside: Vec<&SingularPoint> = spec
        .singular_points
        .iter()
        .filter(|p| rect.contains(p.at.re, p.at.im))
        .collect();

    let mut xs = vec![rect.x0, rect.x1];
    let mut ys = vec![rect.y0, rect.y1];
    for p in &inside {
        xs.push(p.at.re);
        ys.push(p.at.im);
    }
    let dedup = |v: &mut Vec<f64>, scale: f64| {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * scale);
    };
    let w = (rect.x1 - rect.x0).abs().max(1e-300);
    let h = (rect.y1 - rect.y0).abs().max(1e-300);
    dedup(&mut xs, w);
    dedup(&mut ys, h);

    let mut patches = vec![Patch::Plain];
    let mut seeds = Vec::new();
    // (patch index, exponent) for fans, used for the excluded-disk estimate
    let mut fans = Vec::new();

    let mut cells: Vec<Rect> = Vec::new();
    for j in 0..ys.len() - 1 {
        for i in 0..xs.len() - 1 {
            cells.push(Rect::new(xs[i], xs[i + 1], ys[j], ys[j + 1]));
        }
    }

    let tol_x = 1e-12 * w;
    let tol_y = 1e-12 * h;
    let corner_of = |r: &Rect, p: &SingularPoint| -> Option<usize> {
        let cs = [(r.x0, r.y0), (r.x1, r.y0), (r.x1, r.y1), (r.x0, r.y1)];
        cs.iter()
            .position(|&(cx, cy)| (cx - p.at.re).abs() <= tol_x && (cy - p.at.im).abs() <= tol_y)
    };

    let mut queue = cells;
    while let Some(r) = queue.pop() {
        let hits: Vec<(usize, &SingularPoint)> =
            inside.iter().filter_map(|p| corner_of(&r, p).map(|c| (c, *p))).collect();
        match hits.len() {
            0 => seeds.push((r, 0)),
            1 => {
                let (ci, sp) = hits[0];
                let cs = [
                    Complex64::new(r.x0, r.y0),
                    Complex64::new(r.x1, r.y0),
                    Complex64::new(r.x1, r.y1),
                    Complex64::new(r.x0, r.y1),
                ];
                let apex = cs[ci];
                // the two edges not incident to the apex
                for k in [1usize, 2] {
                    let a = cs[(ci + k) % 4];
                    let b = cs[(ci + k + 1) % 4];
                    let jac = ((a - apex).re * (b - apex).im - (a - apex).im * (b - apex).re).abs();
                    patches.push(Patch::Fan { apex, a, b, jac });
                    let idx = patches.len() - 1;
                    fans.push((idx, sp.exponent));
                    let s_min = spec.exclusion;
                    // graded rings toward the apex
                    let mut hi = 1.0;
                    while hi > 64.0 * s_min {
                        let lo = hi / 8.0;
                        seeds.push((Rect::new(lo, hi, 0.0, 1.0), idx));
                        hi = lo;
                    }
                    seeds.push((Rect::new(s_min, hi, 0.0, 1.0), idx));
                }
            }
            _ => queue.extend(r.quarters()),
        }
    }
    // deterministic order independent of the traversal above
    seeds.sort_by(|a, b| {
        (a.1, a.0.y0, a.0.x0)
            .partial_cmp(&(b.1, b.0.y0, b.0.x0))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    (patches, seeds, fans)
}

/// Adaptive integral of `f(x, y)` over `rect`.
///
/// Singular points of `spec` that fall inside `rect` are treated with Duffy
/// fans and an excluded disk of relative radius `spec.exclusion`.
pub fn integrate_rect<F>(f: F, rect: Rect, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    spec.validate()?;
    let (patches, seeds, fans) = build_patches(&rect, spec);
    let engine = Engine { f: &f, rule: GaussRule::new(spec.order), patches };

    // mass of the excluded apex disks, estimated from the innermost ring
    let ring_rule = GaussRule::new(spec.order.max(8));
    let mut excluded = 0.0;
    let mut excluded_err = 0.0;
    for &(idx, exponent) in &fans {
        let s_min = spec.exclusion;
        let ring: f64 = ring_rule.integrate(0.0, 1.0, |t| engine.patches[idx].eval(&f, s_min, t));
        let power = (2.0 + exponent).max(0.5);
        let est = s_min * ring / power;
        excluded += est;
        excluded_err += est.abs();
    }

    let mut cells: Vec<Cell> = seeds
        .par_iter()
        .map(|&(r, patch)| {
            let coarse = engine.tensor(patch, &r);
            engine
                .finish(Cell { rect: r, patch, coarse, fine: 0.0, depth: 0, frozen: false })
                .0
        })
        .collect();
    let mut evaluations = cells.len() * (engine.evals_per_cell() + engine.rule.nodes.len().pow(2));

    for _round in 0..spec.max_rounds {
        let total: f64 = cells.iter().map(|c| c.fine).sum::<f64>() + excluded;
        let err: f64 = cells.iter().map(Cell::error).sum::<f64>() + excluded_err;
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::NonConvergence { partial: total, error: err });
        }
        if err <= target {
            return Ok(QuadResult { value: total, error: err, cells: cells.len(), evaluations, warnings: vec![] });
        }
        if cells.len() > spec.max_cells {
            return Err(Error::NonConvergence { partial: total, error: err });
        }

        // refine the largest contributors until half of the excess is covered
        let mut order: Vec<usize> = (0..cells.len()).filter(|&i| !cells[i].frozen).collect();
        if order.is_empty() {
            return Err(Error::NonConvergence { partial: total, error: err });
        }
        order.sort_by(|&a, &b| {
            cells[b]
                .error()
                .partial_cmp(&cells[a].error())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut picked = Vec::new();
        let mut covered = 0.0;
        let excess = err - 0.5 * target;
        for &i in &order {
            if covered >= 0.5 * excess && !picked.is_empty() {
                break;
            }
            covered += cells[i].error();
            picked.push(i);
        }
        let mut refine = Vec::new();
        for &i in &picked {
            if cells[i].depth >= spec.max_depth {
                cells[i].frozen = true;
            } else {
                refine.push(i);
            }
        }
        if refine.is_empty() {
            continue;
        }
        refine.sort_unstable();
        let children: Vec<[Cell; 4]> = refine
            .par_iter()
            .map(|&i| {
                let parent = cells[i];
                let (_, quarter_vals) = engine.finish(Cell { fine: 0.0, ..parent });
                let q = parent.rect.quarters();
                let mut out = [parent; 4];
                for k in 0..4 {
                    let child = Cell {
                        rect: q[k],
                        patch: parent.patch,
                        coarse: quarter_vals[k],
                        fine: 0.0,
                        depth: parent.depth + 1,
                        frozen: false,
                    };
                    out[k] = engine.finish(child).0;
                }
                out
            })
            .collect();
        evaluations += refine.len() * 5 * engine.evals_per_cell();

        let mut next = Vec::with_capacity(cells.len() + 3 * refine.len());
        let mut k = 0;
        for (i, cell) in cells.iter().enumerate() {
            if k < refine.len() && refine[k] == i {
                next.extend_from_slice(&children[k]);
                k += 1;
            } else {
                next.push(*cell);
            }
        }
        cells = next;
    }
    let total: f64 = cells.iter().map(|c| c.fine).sum::<f64>() + excluded;
    let err: f64 = cells.iter().map(Cell::error).sum::<f64>() + excluded_err;
    Err(Error::NonConvergence { partial: total, error: err })
}

/// Integral of `f(w)` over the unit disk, in polar coordinates.
///
/// Singular points are given in the `w` plane; the angular range is chosen
/// so none of them sits on the seam.
pub fn integrate_disk<F>(f: F, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let (theta0, polar_points) = polar_layout(&spec.singular_points, 0.0);
    let polar_spec = QuadratureSpec { singular_points: polar_points, ..spec.clone() };
    integrate_rect(
        |r, t| {
            if r == 0.0 {
                return 0.0;
            }
            f(Complex64::from_polar(r, t)) * r
        },
        Rect::new(0.0, 1.0, theta0, theta0 + 2.0 * PI),
        &polar_spec,
    )
}

/// Picks a seam angle away from every singular point and maps the points to `(r, θ)`.
fn polar_layout(points: &[SingularPoint], r_min: f64) -> (f64, Vec<SingularPoint>) {
    let args: Vec<f64> = points.iter().filter(|p| p.at.norm() > r_min).map(|p| p.at.arg()).collect();
    let seam = if args.is_empty() {
        -PI
    } else {
        // midpoint of the widest angular gap between the singular directions
        let mut a = args.clone();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut best = (a[0] + 2.0 * PI - a[a.len() - 1], a[a.len() - 1]);
        for win in a.windows(2) {
            let gap = win[1] - win[0];
            if gap > best.0 {
                best = (gap, win[0]);
            }
        }
        best.1 + 0.5 * best.0
    };
    let mapped = points
        .iter()
        .filter(|p| p.at.norm() > r_min)
        .map(|p| {
            let mut t = p.at.arg();
            while t < seam {
                t += 2.0 * PI;
            }
            while t > seam + 2.0 * PI {
                t -= 2.0 * PI;
            }
            SingularPoint::new(Complex64::new(p.at.norm(), t), p.exponent)
        })
        .collect();
    (seam, mapped)
}

/// Integral of `f(z)` over `|z| > 1`.
///
/// The annulus `1 < |z| < R` (with `R` beyond every singular point) is
/// integrated directly in polar coordinates; the rest is mapped by `u = 1/z`
/// onto the punctured disk `|u| < 1/R`, where the area element picks up `|u|⁻⁴`.
/// `f` must decay like `|z|⁻³` or faster.
pub fn integrate_exterior_disk<F>(f: F, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    spec.validate()?;
    let r_max = spec
        .singular_points
        .iter()
        .map(|p| p.at.norm())
        .fold(1.0_f64, f64::max);
    let big_r = 2.0 * r_max;

    let (seam, polar_points) = polar_layout(&spec.singular_points, 1.0);
    let inner_spec = QuadratureSpec { singular_points: polar_points, ..spec.clone() };
    // split the tolerance budget between the two pieces
    let half_abs = 0.5 * spec.abs_tol;
    let annulus = integrate_rect(
        |r, t| f(Complex64::from_polar(r, t)) * r,
        Rect::new(1.0, big_r, seam, seam + 2.0 * PI),
        &QuadratureSpec { abs_tol: half_abs, ..inner_spec },
    )?;

    let outer_spec = QuadratureSpec { abs_tol: half_abs, singular_points: vec![], ..spec.clone() };
    let outer = integrate_rect(
        |rho, t| {
            if rho == 0.0 {
                return 0.0;
            }
            let z = Complex64::from_polar(1.0 / rho, -t);
            f(z) * rho.powi(-3)
        },
        Rect::new(0.0, 1.0 / big_r, -PI, PI),
        &outer_spec,
    )?;

    let mut warnings = Vec::new();
    // empirical decay check: ρ⁻³·|f(1/u)| should stay bounded as ρ → 0
    let probe = |rho: f64| -> f64 {
        (0..8)
            .map(|k| {
                let z = Complex64::from_polar(1.0 / rho, 2.0 * PI * k as f64 / 8.0 + 0.1);
                (f(z) * rho.powi(-3)).abs()
            })
            .fold(0.0, f64::max)
    };
    let (near, far) = (probe(1e-4 / big_r), probe(1e-2 / big_r));
    if near > 10.0 * far.max(1e-300) && near > 1e-12 {
        warnings.push(format!(
            "integrand decays slower than |z|^-3 at infinity (probe ratio {:.3e})",
            near / far.max(1e-300)
        ));
    }

    Ok(QuadResult {
        value: annulus.value + outer.value,
        error: annulus.error + outer.error,
        cells: annulus.cells + outer.cells,
        evaluations: annulus.evaluations + outer.evaluations,
        warnings,
    })
}

/// Adaptive Gauss–Legendre integral of a complex function on `[a, b]`.
///
/// Globally adaptive: the interval with the largest error estimate is halved
/// until the summed estimate meets `tol` (or the rounding floor of the sum).
/// Fails with [`Error::NonConvergence`] if an interval would exceed `max_depth` halvings.
pub fn integrate_line<F>(f: F, a: f64, b: f64, tol: f64, max_depth: usize) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    struct Piece {
        lo: f64,
        hi: f64,
        depth: usize,
        value: Complex64,
        error: f64,
    }
    let rule = GaussRule::new(12);
    let apply = |lo: f64, hi: f64| -> Complex64 { rule.integrate(lo, hi, &f) };
    let split = |lo: f64, hi: f64, depth: usize, whole: Complex64| -> [Piece; 2] {
        let mid = 0.5 * (lo + hi);
        let (left, right) = (apply(lo, mid), apply(mid, hi));
        let error = 0.5 * (left + right - whole).norm();
        [
            Piece { lo, hi: mid, depth: depth + 1, value: left, error },
            Piece { lo: mid, hi, depth: depth + 1, value: right, error },
        ]
    };
    let mut pieces: Vec<Piece> = split(a, b, 0, apply(a, b)).into();
    loop {
        let value: Complex64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        let magnitude: f64 = pieces.iter().map(|p| p.value.norm()).sum();
        if error <= tol.max(1e-15 * magnitude) {
            return Ok((value, error));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least two pieces");
        let p = pieces.swap_remove(worst);
        if p.depth >= max_depth {
            return Err(Error::NonConvergence { partial: value.norm(), error });
        }
        pieces.extend(split(p.lo, p.hi, p.depth, p.value));
    }
}
