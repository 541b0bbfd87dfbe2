//! Horocyclic polygons in the hyperbolic plane: construction as an
//! intersection of horodisks, cone angle, truncation by an extra
//! horocycle, and the cosh-ratio deformation.
//!
//! Everything runs in the upper half-plane; polygon files give bases as
//! angles on the disk-model boundary, carried over by a fixed Cayley map.
//! A horocycle at a finite base is the tangent circle of Euclidean
//! diameter `size`; at base ∞ it is the line at height 1/size, so that
//! shrinking the horodisk means decreasing `size` in both cases.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HorocycleError {
    #[error("adjacent horocycles {0} and {1} do not intersect")]
    NoIntersection(usize, usize),
    #[error("horodisk {0} contributes no boundary arc")]
    RedundantHorodisk(usize),
    #[error("vertices {0} and {1} merge")]
    VerticesMerge(usize, usize),
    #[error("bad input: {0}")]
    BadInput(String),
}

/// A boundary point of the half-plane model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Base {
    Finite(f64),
    Infinity,
}

/// A horocycle with its canonical size parameter.
#[derive(Debug, Clone, Copy)]
pub struct Horocycle {
    pub base: Base,
    pub size: f64,
}

impl Horocycle {
    pub fn new(base: Base, size: f64) -> Result<Self, HorocycleError> {
        if !(size > 0.0) || !size.is_finite() {
            return Err(HorocycleError::BadInput(format!("size {size} not positive")));
        }
        Ok(Horocycle { base, size })
    }

    /// The horocycle through a given interior point.
    pub fn through(base: Base, z: Complex64) -> Result<Self, HorocycleError> {
        if z.im <= 0.0 {
            return Err(HorocycleError::BadInput("point not in the half-plane".into()));
        }
        let size = match base {
            Base::Finite(x) => {
                let d = z - Complex64::new(x, 0.0);
                d.norm_sqr() / z.im
            }
            Base::Infinity => 1.0 / z.im,
        };
        Horocycle::new(base, size)
    }

    /// Signed clearance of a point from the horodisk boundary: positive
    /// inside the horodisk.
    pub fn inside_margin(&self, z: Complex64) -> f64 {
        match self.base {
            Base::Finite(x) => {
                let r = self.size / 2.0;
                let c = Complex64::new(x, r);
                r - (z - c).norm()
            }
            Base::Infinity => z.im - 1.0 / self.size,
        }
    }

    pub fn contains_on_boundary(&self, z: Complex64, tol: f64) -> bool {
        self.inside_margin(z).abs() <= tol
    }
}

/// Intersection points of two horocycle boundaries (0, 1 or 2 points).
pub fn intersect(a: &Horocycle, b: &Horocycle) -> Result<Vec<Complex64>, HorocycleError> {
    match (a.base, b.base) {
        (Base::Infinity, Base::Infinity) => Err(HorocycleError::BadInput(
            "two horocycles share the base at infinity".into(),
        )),
        (Base::Infinity, Base::Finite(_)) => intersect(b, a),
        (Base::Finite(x), Base::Infinity) => {
            // Circle (x, d/2) radius d/2 against the line at height h.
            let d = a.size;
            let h = 1.0 / b.size;
            let disc = h * (d - h);
            if disc < 0.0 {
                return Ok(Vec::new());
            }
            let s = disc.sqrt();
            if s == 0.0 {
                return Ok(vec![Complex64::new(x, h)]);
            }
            Ok(vec![Complex64::new(x - s, h), Complex64::new(x + s, h)])
        }
        (Base::Finite(x1), Base::Finite(x2)) => {
            let (r1, r2) = (a.size / 2.0, b.size / 2.0);
            let c1 = Complex64::new(x1, r1);
            let c2 = Complex64::new(x2, r2);
            let d = c2 - c1;
            let dist = d.norm();
            if dist == 0.0 {
                return Err(HorocycleError::BadInput(
                    "horocycles share base and size".into(),
                ));
            }
            if dist > r1 + r2 || dist < (r1 - r2).abs() {
                return Ok(Vec::new());
            }
            let along = (r1 * r1 - r2 * r2 + dist * dist) / (2.0 * dist);
            let h2 = r1 * r1 - along * along;
            let mid = c1 + d * (along / dist);
            if h2 <= 0.0 {
                return Ok(vec![mid]);
            }
            let perp = Complex64::new(-d.im, d.re) * (h2.sqrt() / dist);
            Ok(vec![mid + perp, mid - perp])
        }
    }
}

/// Clockwise order of three points on a horocycle, in the sense of the
/// horodisk boundary orientation. The base itself counts as the point
/// where the circle touches the boundary.
fn clockwise_on(h: &Horocycle, p: Complex64, q: Complex64) -> bool {
    match h.base {
        Base::Finite(x) => {
            let b = Complex64::new(x, 0.0);
            let u = p - b;
            let v = q - b;
            u.re * v.im - u.im * v.re < 0.0
        }
        // Walking clockwise around {y ≥ h} goes in the −x direction, and
        // the base ∞ sits at the wrap-around.
        Base::Infinity => p.re > q.re,
    }
}

/// An embedded horocyclic polygon: horocycles h_0..h_{p−1} at cyclically
/// ordered bases, vertices s_i ∈ h_i ∩ h_{i+1}.
#[derive(Debug, Clone)]
pub struct HorocyclicPolygon {
    pub horocycles: Vec<Horocycle>,
    pub vertices: Vec<Complex64>,
}

/// Fixed Cayley map from the disk model boundary angle to a half-plane
/// base point: w = e^{iφ} goes to i(1−w)/(1+w); φ = π would go to ∞.
pub fn disk_angle_to_base(phi: f64) -> Base {
    let w = Complex64::new(phi.cos(), phi.sin());
    let den = Complex64::new(1.0, 0.0) + w;
    if den.norm() < 1e-12 {
        return Base::Infinity;
    }
    let z = Complex64::new(0.0, 1.0) * (Complex64::new(1.0, 0.0) - w) / den;
    Base::Finite(z.re)
}

impl HorocyclicPolygon {
    /// Intersect consecutive horocycles, choosing for each pair the point
    /// that lies inside all the other horodisks; then verify the clockwise
    /// invariant and that every horocycle contributes an arc.
    pub fn build(horocycles: Vec<Horocycle>) -> Result<Self, HorocycleError> {
        let p = horocycles.len();
        if p < 2 {
            return Err(HorocycleError::BadInput("need at least two horocycles".into()));
        }
        let scale: f64 = horocycles
            .iter()
            .map(|h| match h.base {
                Base::Finite(x) => x.abs().max(h.size),
                Base::Infinity => 1.0 / h.size,
            })
            .fold(1.0, f64::max);
        let tol = 1e-9 * scale;
        let mut vertices = Vec::with_capacity(p);
        if p == 2 {
            // Both vertices come from the same pair; assign by the
            // clockwise rule on h_0: (b_0, s_1, s_0) must be clockwise.
            let pts = intersect(&horocycles[0], &horocycles[1])?;
            if pts.len() < 2 {
                return Err(HorocycleError::NoIntersection(0, 1));
            }
            let (s0, s1) = if clockwise_on(&horocycles[0], pts[1], pts[0]) {
                (pts[0], pts[1])
            } else {
                (pts[1], pts[0])
            };
            vertices.push(s0);
            vertices.push(s1);
        } else {
            for i in 0..p {
                let j = (i + 1) % p;
                let pts = intersect(&horocycles[i], &horocycles[j])?;
                if pts.is_empty() {
                    return Err(HorocycleError::NoIntersection(i, j));
                }
                let inside = |z: Complex64| {
                    horocycles
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != i && *k != j)
                        .all(|(_, h)| h.inside_margin(z) >= -tol)
                };
                let chosen = pts
                    .iter()
                    .copied()
                    .filter(|&z| inside(z))
                    .max_by(|a, b| {
                        let ma = margin_min(&horocycles, *a);
                        let mb = margin_min(&horocycles, *b);
                        ma.partial_cmp(&mb).unwrap()
                    });
                match chosen {
                    Some(z) => vertices.push(z),
                    None => return Err(HorocycleError::RedundantHorodisk(j)),
                }
            }
        }
        let poly = HorocyclicPolygon {
            horocycles,
            vertices,
        };
        poly.verify(tol)?;
        Ok(poly)
    }

    /// Construction from disk-model data.
    pub fn from_disk(bases: &[f64], sizes: &[f64]) -> Result<Self, HorocycleError> {
        if bases.len() != sizes.len() {
            return Err(HorocycleError::BadInput(
                "bases and sizes differ in length".into(),
            ));
        }
        let hs = bases
            .iter()
            .zip(sizes)
            .map(|(&phi, &s)| Horocycle::new(disk_angle_to_base(phi), s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::build(hs)
    }

    fn verify(&self, tol: f64) -> Result<(), HorocycleError> {
        let p = self.horocycles.len();
        for i in 0..p {
            let prev = self.vertices[(i + p - 1) % p];
            let cur = self.vertices[i];
            if (prev - cur).norm() <= tol && p > 2 {
                return Err(HorocycleError::RedundantHorodisk(i));
            }
            // s_{i−1} and s_i both lie on h_i, in clockwise order seen
            // from the base.
            let h = &self.horocycles[i];
            if !h.contains_on_boundary(prev, tol.max(1e-9)) || !h.contains_on_boundary(cur, tol.max(1e-9)) {
                return Err(HorocycleError::BadInput(format!(
                    "vertex misses horocycle {i}"
                )));
            }
            if !clockwise_on(h, prev, cur) {
                return Err(HorocycleError::BadInput(format!(
                    "vertices out of clockwise order on horocycle {i}"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.horocycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.horocycles.is_empty()
    }

    /// Interior angle of the polygon at vertex s_i, between the geodesics
    /// toward b_i and b_{i+1}.
    pub fn angle_at(&self, i: usize) -> f64 {
        let p = self.len();
        let s = self.vertices[i];
        let t1 = geodesic_direction(s, self.horocycles[i].base);
        let t2 = geodesic_direction(s, self.horocycles[(i + 1) % p].base);
        let dot = t1.re * t2.re + t1.im * t2.im;
        dot.clamp(-1.0, 1.0).acos()
    }

    /// ℓ = Σ ∠ b_i s_i b_{i+1}; always < 2π for an embedded polygon.
    pub fn cone_angle(&self) -> f64 {
        (0..self.len()).map(|i| self.angle_at(i)).sum()
    }

    /// Hyperbolic distance from s_i to the geodesic b_i b_{i+1}.
    pub fn vertex_to_geodesic(&self, i: usize) -> f64 {
        let p = self.len();
        point_to_geodesic(
            self.vertices[i],
            self.horocycles[i].base,
            self.horocycles[(i + 1) % p].base,
        )
    }

    /// Residual of the triangle identity cosh δ_i · sin(α_i/2) = 1.
    pub fn angle_distance_residual(&self, i: usize) -> f64 {
        let alpha = self.angle_at(i);
        let delta = self.vertex_to_geodesic(i);
        (delta.cosh() * (alpha / 2.0).sin() - 1.0).abs()
    }

    /// Move every vertex along the perpendicular to its geodesic so that
    /// cosh δ'_i = cosh δ_i / k; k < 1 moves outward, k > 1 inward.
    /// Afterwards adjacent vertices still share a horocycle at the common
    /// base; the rebuilt polygon and the per-base size residuals are
    /// returned.
    pub fn deform(&self, k: f64) -> Result<(HorocyclicPolygon, Vec<f64>), HorocycleError> {
        if !(k > 0.0) {
            return Err(HorocycleError::BadInput(format!("k = {k} must be positive")));
        }
        let p = self.len();
        let mut moved = Vec::with_capacity(p);
        for i in 0..p {
            let b1 = self.horocycles[i].base;
            let b2 = self.horocycles[(i + 1) % p].base;
            moved.push(slide_along_perpendicular(self.vertices[i], b1, b2, k)?);
        }
        for i in 0..p {
            let j = (i + 1) % p;
            if (moved[i] - moved[j]).norm() < 1e-9 && p > 2 {
                return Err(HorocycleError::VerticesMerge(i, j));
            }
        }
        // The deformed horocycle at base b_i passes through both moved
        // neighbors of b_i; the size disagreement is the lemma's residual.
        let mut residuals = Vec::with_capacity(p);
        let mut new_hs = Vec::with_capacity(p);
        for i in 0..p {
            let prev = moved[(i + p - 1) % p];
            let cur = moved[i];
            let h_prev = Horocycle::through(self.horocycles[i].base, prev)?;
            let h_cur = Horocycle::through(self.horocycles[i].base, cur)?;
            residuals.push((h_prev.size - h_cur.size).abs() / h_cur.size.max(1.0));
            new_hs.push(Horocycle::new(
                self.horocycles[i].base,
                0.5 * (h_prev.size + h_cur.size),
            )?);
        }
        let rebuilt = HorocyclicPolygon::build(new_hs)?;
        Ok((rebuilt, residuals))
    }

    /// Truncate by a new horocycle inserted at cyclic position `at`.
    pub fn truncate(&self, at: usize, h: Horocycle) -> Result<HorocyclicPolygon, HorocycleError> {
        let mut hs = self.horocycles.clone();
        hs.insert(at.min(hs.len()), h);
        HorocyclicPolygon::build(hs)
    }
}

fn margin_min(hs: &[Horocycle], z: Complex64) -> f64 {
    hs.iter()
        .map(|h| h.inside_margin(z))
        .fold(f64::INFINITY, f64::min)
}

/// Unit tangent at z of the geodesic from z toward the boundary point b.
fn geodesic_direction(z: Complex64, b: Base) -> Complex64 {
    match b {
        Base::Infinity => Complex64::new(0.0, 1.0),
        Base::Finite(x) => {
            if (z.re - x).abs() < 1e-14 {
                Complex64::new(0.0, -1.0)
            } else {
                // Semicircle through z ending at x, centered on the axis.
                let c = (z.norm_sqr() - x * x) / (2.0 * (z.re - x));
                let radial = z - Complex64::new(c, 0.0);
                let t = Complex64::new(-radial.im, radial.re) / radial.norm();
                if t.re * (x - z.re) >= 0.0 {
                    t
                } else {
                    -t
                }
            }
        }
    }
}

/// Hyperbolic distance from a point to the geodesic with the given ideal
/// endpoints.
pub fn point_to_geodesic(z: Complex64, a: Base, b: Base) -> f64 {
    match (a, b) {
        (Base::Infinity, Base::Infinity) => f64::NAN,
        (Base::Infinity, Base::Finite(x)) | (Base::Finite(x), Base::Infinity) => {
            // Vertical line at x: cosh δ = |z − x| / Im z.
            ((z - Complex64::new(x, 0.0)).norm() / z.im).acosh()
        }
        (Base::Finite(x1), Base::Finite(x2)) => {
            let c = (x1 + x2) / 2.0;
            let r = (x2 - x1).abs() / 2.0;
            let d = z - Complex64::new(c, 0.0);
            // sinh δ = ||z − c|² − r²| / (2 r Im z)
            ((d.norm_sqr() - r * r).abs() / (2.0 * r * z.im)).asinh()
        }
    }
}

/// Move z along the perpendicular geodesic to (b1, b2) so the distance
/// changes from δ to δ' with cosh δ' = cosh δ / k, staying on its side.
fn slide_along_perpendicular(
    z: Complex64,
    b1: Base,
    b2: Base,
    k: f64,
) -> Result<Complex64, HorocycleError> {
    // Möbius-normalize so the geodesic is the imaginary axis.
    let (fwd, bwd): (Box<dyn Fn(Complex64) -> Complex64>, Box<dyn Fn(Complex64) -> Complex64>) =
        match (b1, b2) {
            (Base::Infinity, Base::Infinity) => {
                return Err(HorocycleError::BadInput("degenerate geodesic".into()))
            }
            (Base::Finite(a), Base::Infinity) => (
                Box::new(move |w| w - a),
                Box::new(move |w| w + a),
            ),
            (Base::Infinity, Base::Finite(b)) => (
                // z ↦ −1/(z − b) maps b ↦ ∞ → 0 wait: maps ∞ ↦ 0, b ↦ ∞.
                Box::new(move |w| -(w - b).inv()),
                Box::new(move |w| b - w.inv()),
            ),
            (Base::Finite(a), Base::Finite(b)) => {
                // Map the smaller endpoint to 0 and the larger to ∞; the
                // determinant hi − lo keeps the upper half-plane.
                let (lo, hi) = (a.min(b), a.max(b));
                (
                    Box::new(move |w| (lo - w) / (w - hi)),
                    Box::new(move |w| (lo + hi * w) / (w + Complex64::new(1.0, 0.0))),
                )
            }
        };
    let zn = fwd(z);
    if zn.im <= 0.0 {
        return Err(HorocycleError::BadInput(
            "normalization left the half-plane".into(),
        ));
    }
    let r = zn.norm();
    let beta = zn.im.atan2(zn.re);
    let s = k * beta.sin();
    if s > 1.0 {
        // cosh δ / k < 1: the perpendicular runs out before reaching it.
        return Err(HorocycleError::VerticesMerge(0, 0));
    }
    let beta2 = if beta.cos() >= 0.0 {
        s.asin()
    } else {
        PI - s.asin()
    };
    let out = bwd(Complex64::from_polar(r, beta2));
    Ok(out)
}

/// Random embedded polygon by iterated truncation: start from a 2-gon and
/// repeatedly truncate the wrap-around vertex with a slightly shrunk
/// horocycle through it, following the inductive construction.
pub fn random_polygon<R: Rng>(rng: &mut R, p: usize) -> Result<HorocyclicPolygon, HorocycleError> {
    assert!(p >= 2);
    let mut angles: Vec<f64> = Vec::new();
    // Cyclically ordered disk angles with a minimum gap.
    loop {
        angles.clear();
        for _ in 0..p {
            angles.push(rng.gen_range(0.0..2.0 * PI));
        }
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ok = angles.windows(2).all(|w| w[1] - w[0] > 0.3)
            && (angles[0] + 2.0 * PI - angles[p - 1]) > 0.3
            && angles.iter().all(|&a| (a - PI).abs() > 0.2);
        if ok {
            // Clockwise labeling on the disk boundary.
            angles.reverse();
            break;
        }
    }
    let bases: Vec<Base> = angles.iter().map(|&a| disk_angle_to_base(a)).collect();
    let h0 = Horocycle::new(bases[0], rng.gen_range(0.8..1.6))?;
    let h1 = Horocycle::new(
        bases[1],
        match (h0.base, bases[1]) {
            // Keep the first pair intersecting: |x0 − x1| ≤ √(d0 d1).
            (Base::Finite(x0), Base::Finite(x1)) => {
                let need = (x0 - x1) * (x0 - x1) / h0.size;
                need * rng.gen_range(1.1..2.0)
            }
            _ => rng.gen_range(0.8..1.6),
        },
    )?;
    let mut poly = HorocyclicPolygon::build(vec![h0, h1])?;
    for base in bases.iter().skip(2) {
        // The wrap vertex is the last one: s_{p−1} ∈ h_{p−1} ∩ h_0.
        let wrap = *poly.vertices.last().unwrap();
        let through = Horocycle::through(*base, wrap)?;
        let mut shrink = 0.97;
        let mut inserted = None;
        for _ in 0..24 {
            let candidate = Horocycle::new(*base, through.size * shrink)?;
            match poly.truncate(poly.len(), candidate) {
                Ok(q) => {
                    inserted = Some(q);
                    break;
                }
                Err(_) => shrink = 1.0 - (1.0 - shrink) * 0.5,
            }
        }
        poly = inserted.ok_or_else(|| {
            HorocycleError::BadInput("truncation failed to embed".into())
        })?;
    }
    Ok(poly)
}
