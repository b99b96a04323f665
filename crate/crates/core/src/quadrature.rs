//! Gauss-Legendre rules on intervals, boxes and box faces.

use crate::error::{Error, Result};
use crate::kinematics::Box3;
use crate::tensor3::Vec3;

/// Tensor-product Gauss-Legendre rule with `order` nodes per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    order: usize,
    /// Nodes on (-1, 1), ascending.
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameters("quadrature order must be at least 1".into()));
        }
        let (nodes, weights) = gauss_legendre(order);
        Ok(QuadratureRule { order, nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Nodes and weights mapped to the interval `(lo, hi)`.
    pub fn interval(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (mid + half * x, half * w))
            .collect()
    }

    /// Points and weights of the tensor-product rule on a box.
    pub fn volume_points(&self, domain: &Box3) -> Vec<(Vec3, f64)> {
        let xs = self.interval(domain.x_lo, domain.x_hi);
        let ys = self.interval(domain.y_lo, domain.y_hi);
        let zs = self.interval(domain.z_lo, domain.z_hi);
        let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
        for &(x, wx) in &xs {
            for &(y, wy) in &ys {
                for &(z, wz) in &zs {
                    out.push((Vec3::new(x, y, z), wx * wy * wz));
                }
            }
        }
        out
    }

    /// Points and weights on one face of a box, with the face's outward unit normal.
    pub fn face_points(&self, domain: &Box3, face: Face) -> (Vec<(Vec3, f64)>, Vec3) {
        let axis = face.axis();
        let value = domain.bound(axis, face.is_high());
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        let us = self.interval(domain.bound(u, false), domain.bound(u, true));
        let vs = self.interval(domain.bound(v, false), domain.bound(v, true));
        let mut points = Vec::with_capacity(us.len() * vs.len());
        for &(pu, wu) in &us {
            for &(pv, wv) in &vs {
                let mut p = [0.0; 3];
                p[axis] = value;
                p[u] = pu;
                p[v] = pv;
                points.push((Vec3(p), wu * wv));
            }
        }
        let mut n = [0.0; 3];
        n[axis] = if face.is_high() { 1.0 } else { -1.0 };
        (points, Vec3(n))
    }
}

/// The six faces of an axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    XLow,
    XHigh,
    YLow,
    YHigh,
    ZLow,
    ZHigh,
}

impl Face {
    pub const ALL: [Face; 6] = [
        Face::XLow,
        Face::XHigh,
        Face::YLow,
        Face::YHigh,
        Face::ZLow,
        Face::ZHigh,
    ];
    pub const LATERAL: [Face; 4] = [Face::YLow, Face::YHigh, Face::ZLow, Face::ZHigh];

    pub fn axis(self) -> usize {
        match self {
            Face::XLow | Face::XHigh => 0,
            Face::YLow | Face::YHigh => 1,
            Face::ZLow | Face::ZHigh => 2,
        }
    }

    pub fn is_high(self) -> bool {
        matches!(self, Face::XHigh | Face::YHigh | Face::ZHigh)
    }
}

/// Nodes and weights on (-1, 1) by Newton iteration on the Legendre polynomial.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
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
    (nodes, weights)
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
