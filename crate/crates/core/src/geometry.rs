//! Geometric kernel for weighted points: power distance, ortho-centers of
//! simplices and the witness predicate.
//!
//! All comparisons go through a [`TolerancePolicy`]. Values within
//! `eps_abs` of each other compare as equal and equality satisfies the
//! closed inequalities of the alpha-complex conditions.

use std::cmp::Ordering;
use std::fmt;

use crate::error::AlphaError;

/// A point in R³ (Å).
pub type Vec3 = [f64; 3];

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm2(a: Vec3) -> f64 {
    dot(a, a)
}

/// A weighted point: center, radius and its stable input ordinal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Vec3,
    pub radius: f64,
    pub index: u32,
}

impl Ball {
    pub fn new(center: Vec3, radius: f64, index: u32) -> Self {
        Self {
            center,
            radius,
            index,
        }
    }

    #[inline]
    pub fn weight(&self) -> f64 {
        self.radius * self.radius
    }
}

/// `‖p − center‖² − radius²`.
#[inline]
pub fn power_distance(p: Vec3, b: &Ball) -> f64 {
    norm2(sub(p, b.center)) - b.weight()
}

const UNUSED: u32 = u32::MAX;

/// Canonical simplex identifier: 1 to 4 strictly increasing ball indices.
///
/// The derived ordering compares the dimension first and then the vertex
/// arrays lexicographically, which is the canonical output order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexKey {
    dim: u8,
    verts: [u32; 4],
}

impl SimplexKey {
    /// Builds a key from distinct ball indices in any order.
    ///
    /// Panics on an empty slice, more than four vertices or repeated indices.
    pub fn new(vertices: &[u32]) -> Self {
        assert!(
            (1..=4).contains(&vertices.len()),
            "a simplex has 1 to 4 vertices, got {}",
            vertices.len()
        );
        let mut verts = [UNUSED; 4];
        verts[..vertices.len()].copy_from_slice(vertices);
        verts[..vertices.len()].sort_unstable();
        assert!(
            verts[..vertices.len()].windows(2).all(|w| w[0] < w[1]),
            "simplex vertices must be distinct: {vertices:?}"
        );
        Self {
            dim: (vertices.len() - 1) as u8,
            verts,
        }
    }

    pub fn vertex(v: u32) -> Self {
        Self::new(&[v])
    }

    pub fn edge(a: u32, b: u32) -> Self {
        Self::new(&[a, b])
    }

    pub fn triangle(a: u32, b: u32, c: u32) -> Self {
        Self::new(&[a, b, c])
    }

    pub fn tet(a: u32, b: u32, c: u32, d: u32) -> Self {
        Self::new(&[a, b, c, d])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn vertices(&self) -> &[u32] {
        &self.verts[..=self.dim as usize]
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        self.vertices().contains(&v)
    }

    /// The `dim + 1` facets, each obtained by dropping one vertex. Empty for
    /// vertices.
    pub fn facets(&self) -> impl Iterator<Item = SimplexKey> + '_ {
        let n = self.dim as usize + 1;
        let skip_all = n == 1;
        (0..n).filter(move |_| !skip_all).map(move |drop| {
            let mut verts = [UNUSED; 4];
            let mut k = 0;
            for (i, &v) in self.vertices().iter().enumerate() {
                if i != drop {
                    verts[k] = v;
                    k += 1;
                }
            }
            SimplexKey {
                dim: self.dim - 1,
                verts,
            }
        })
    }

    /// Adds a vertex not already present, yielding the cofacet.
    pub fn with_vertex(&self, v: u32) -> SimplexKey {
        let mut all = [0u32; 4];
        let n = self.dim as usize + 1;
        all[..n].copy_from_slice(self.vertices());
        all[n] = v;
        SimplexKey::new(&all[..=n])
    }
}

impl fmt::Debug for SimplexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{:?})", self.dim, self.vertices())
    }
}

impl fmt::Display for SimplexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dim)?;
        for v in self.vertices() {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

/// Total order on simplices: dimension ascending, then lexicographic.
pub fn simplex_compare(a: &SimplexKey, b: &SimplexKey) -> Ordering {
    a.cmp(b)
}

/// Comparison slack for power-distance predicates and the singularity
/// threshold of the ortho-center solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    /// Absolute slack in Å².
    pub eps_abs: f64,
    /// Relative pivot threshold for the elimination.
    pub eps_singular: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            eps_abs: 1e-9,
            eps_singular: 1e-12,
        }
    }
}

impl TolerancePolicy {
    pub fn new(eps_abs: f64, eps_singular: f64) -> Result<Self, AlphaError> {
        if !(eps_abs > 0.0 && eps_abs.is_finite() && eps_singular > 0.0 && eps_singular.is_finite())
        {
            return Err(AlphaError::InvalidParameter(format!(
                "tolerances must be positive and finite (eps_abs={eps_abs}, eps_singular={eps_singular})"
            )));
        }
        Ok(Self {
            eps_abs,
            eps_singular,
        })
    }

    /// `a ≤ b` with slack.
    #[inline]
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.eps_abs
    }
}

/// Ortho-center of a simplex and its power distance to the incident balls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoResult {
    pub center: Vec3,
    pub ortho_size: f64,
}

/// Computes the ortho-center of 1 to 4 balls.
///
/// The point is sought in the affine hull of the centers as
/// `p = p0 + Σ λ_i (p_i − p0)`, where `p0` is the center of the lowest-index
/// ball. Equal power distance to every ball gives the Gram system
/// `Σ_j 2 (v_i·v_j) λ_j = ‖v_i‖² − r_i² + r_0²` with `v_i = p_i − p0`.
///
/// The system is solved through a QR factorization of the `v_i` rather than
/// by eliminating on the Gram matrix directly, so the degeneracy threshold
/// `eps_singular` applies to a flatness measured in lengths, not squared
/// lengths. Thin but genuine slivers from random inputs stay solvable.
pub fn ortho_center(simplex: &[&Ball], tol: &TolerancePolicy) -> Result<OrthoResult, AlphaError> {
    let n = simplex.len();
    assert!((1..=4).contains(&n), "ortho_center takes 1 to 4 balls");
    let mut sorted = [simplex[0]; 4];
    sorted[..n].copy_from_slice(simplex);
    sorted[..n].sort_by_key(|b| b.index);
    let balls = &sorted[..n];
    let b0 = balls[0];
    if n == 1 {
        return Ok(OrthoResult {
            center: b0.center,
            ortho_size: -b0.weight(),
        });
    }

    let d = n - 1;
    let mut v = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for i in 0..d {
        v[i] = sub(balls[i + 1].center, b0.center);
        rhs[i] = norm2(v[i]) - balls[i + 1].weight() + b0.weight();
    }
    let degenerate = || {
        let idx: Vec<u32> = balls.iter().map(|b| b.index).collect();
        AlphaError::DegenerateSimplex(SimplexKey::new(&idx))
    };
    let offset = solve_gram(&v, &rhs, d, tol.eps_singular).ok_or_else(degenerate)?;
    let center = [0, 1, 2].map(|k| b0.center[k] + offset[k]);
    Ok(OrthoResult {
        center,
        ortho_size: power_distance(center, b0),
    })
}

/// Solves `2 VᵀV λ = rhs` for the first `d` edge vectors and returns the
/// offset `x = Vλ` of the ortho-center from the first center.
///
/// With `V = QR` from Gram-Schmidt (run twice per vector to keep `Q`
/// orthonormal), the system reads `2 Rᵀ (Qᵀx) = rhs`, so `x = Qy` with
/// `y` from one triangular solve. The pivots are the diagonal of `R`, each
/// the distance of an edge vector from the span of the previous ones; the
/// solve fails when one is at most `rel_pivot` times the longest edge vector.
fn solve_gram(v: &[[f64; 3]; 3], rhs: &[f64; 3], d: usize, rel_pivot: f64) -> Option<Vec3> {
    let longest = v[..d].iter().map(|x| norm2(*x)).fold(0.0, f64::max).sqrt();
    if longest.is_nan() || longest <= 0.0 {
        return None;
    }
    let mut q = [[0.0; 3]; 3];
    let mut r = [[0.0; 3]; 3];
    for k in 0..d {
        let mut w = v[k];
        for _pass in 0..2 {
            for j in 0..k {
                let c = dot(q[j], w);
                r[j][k] += c;
                for (wc, qc) in w.iter_mut().zip(q[j]) {
                    *wc -= c * qc;
                }
            }
        }
        let len = norm2(w).sqrt();
        if len.is_nan() || len <= rel_pivot * longest {
            return None;
        }
        r[k][k] = len;
        q[k] = w.map(|c| c / len);
    }
    let mut x = [0.0; 3];
    let mut y = [0.0; 3];
    for i in 0..d {
        let mut acc = rhs[i] / 2.0;
        for j in 0..i {
            acc -= r[j][i] * y[j];
        }
        y[i] = acc / r[i][i];
        for (xc, qc) in x.iter_mut().zip(q[i]) {
            *xc += y[i] * qc;
        }
    }
    Some(x)
}

/// Ortho-center of the simplex identified by `key` in a ball store indexed
/// by ball index.
pub fn ortho_of_key(
    key: &SimplexKey,
    balls: &[Ball],
    tol: &TolerancePolicy,
) -> Result<OrthoResult, AlphaError> {
    let mut refs = [&balls[key.vertices()[0] as usize]; 4];
    for (slot, &v) in refs.iter_mut().zip(key.vertices()) {
        *slot = &balls[v as usize];
    }
    ortho_center(&refs[..=key.dim()], tol)
}

/// The witness test at `p`: no candidate ball outside the simplex is
/// strictly closer (beyond `eps_abs`) in power distance than the simplex's
/// lowest-index ball.
pub fn ac2_satisfied<'a, I>(
    simplex: &SimplexKey,
    p: Vec3,
    candidates: I,
    balls: &[Ball],
    tol: &TolerancePolicy,
) -> bool
where
    I: IntoIterator<Item = &'a Ball>,
{
    let reference = power_distance(p, &balls[simplex.vertices()[0] as usize]);
    candidates
        .into_iter()
        .filter(|b| !simplex.contains(b.index))
        .all(|b| tol.le(reference, power_distance(p, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ball(c: Vec3, r: f64, i: u32) -> Ball {
        Ball::new(c, r, i)
    }

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn power_distance_examples() {
        assert_eq!(power_distance([0.0; 3], &ball([0.0; 3], 1.0, 0)), -1.0);
        assert_eq!(
            power_distance([3.0, 0.0, 0.0], &ball([0.0; 3], 2.0, 0)),
            5.0
        );
        assert_eq!(
            power_distance([1.0, 2.0, 2.0], &ball([0.0; 3], 0.0, 0)),
            9.0
        );
    }

    #[test]
    fn vertex_ortho_is_center_and_negative_weight() {
        let b = ball([1.0, 2.0, 3.0], 1.5, 0);
        let o = ortho_center(&[&b], &tol()).unwrap();
        assert_eq!(o.center, b.center);
        assert_eq!(o.ortho_size, -2.25);
    }

    #[test]
    fn equal_radius_edge_is_midpoint() {
        let a = ball([0.0; 3], 1.0, 0);
        let b = ball([4.0, 0.0, 0.0], 1.0, 1);
        let o = ortho_center(&[&a, &b], &tol()).unwrap();
        assert_abs_diff_eq!(o.center[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(o.ortho_size, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn unequal_radius_edge_matches_radical_plane() {
        // x² − 4 = (x − 4)² − 1  ⇒  x = 19/8; ortho size = 19²/64 − 4.
        let a = ball([0.0; 3], 2.0, 0);
        let b = ball([4.0, 0.0, 0.0], 1.0, 1);
        let o = ortho_center(&[&a, &b], &tol()).unwrap();
        assert_abs_diff_eq!(o.center[0], 2.375, epsilon = 1e-12);
        assert_abs_diff_eq!(o.center[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(o.ortho_size, 1.640625, epsilon = 1e-12);

        // Independent check: the ortho size minimizes the maximum power
        // distance along the segment line.
        let best = (0..=400_000)
            .map(|k| {
                let x = -2.0 + 8.0 * k as f64 / 400_000.0;
                let p = [x, 0.0, 0.0];
                power_distance(p, &a).max(power_distance(p, &b))
            })
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(best, 1.640625, epsilon = 1e-6);
    }

    #[test]
    fn equilateral_triangle() {
        let s3 = 3f64.sqrt();
        let bs = [
            ball([0.0, 0.0, 0.0], 1.0, 0),
            ball([2.0, 0.0, 0.0], 1.0, 1),
            ball([1.0, s3, 0.0], 1.0, 2),
        ];
        let o = ortho_center(&[&bs[0], &bs[1], &bs[2]], &tol()).unwrap();
        assert_abs_diff_eq!(o.center[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(o.center[1], 1.0 / s3, epsilon = 1e-12);
        assert_abs_diff_eq!(o.center[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(o.ortho_size, 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn regular_tetrahedron() {
        let bs = [
            ball([1.0, 1.0, 1.0], 1.0, 0),
            ball([1.0, -1.0, -1.0], 1.0, 1),
            ball([-1.0, 1.0, -1.0], 1.0, 2),
            ball([-1.0, -1.0, 1.0], 1.0, 3),
        ];
        let o = ortho_center(&[&bs[0], &bs[1], &bs[2], &bs[3]], &tol()).unwrap();
        for c in o.center {
            assert_abs_diff_eq!(c, 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(o.ortho_size, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let a = ball([0.0; 3], 1.0, 0);
        let b = ball([1.0, 0.0, 0.0], 1.0, 1);
        let c = ball([2.0, 0.0, 0.0], 1.0, 2);
        let d = ball([0.0, 1.0, 0.0], 1.0, 3);
        let e = ball([1.0, 1.0, 0.0], 1.0, 4);
        let dup = ball([0.0; 3], 1.5, 5);
        assert_eq!(
            ortho_center(&[&a, &b, &c], &tol()),
            Err(AlphaError::DegenerateSimplex(SimplexKey::triangle(0, 1, 2)))
        );
        assert!(matches!(
            ortho_center(&[&a, &b, &d, &e], &tol()),
            Err(AlphaError::DegenerateSimplex(_))
        ));
        assert!(matches!(
            ortho_center(&[&a, &dup], &tol()),
            Err(AlphaError::DegenerateSimplex(_))
        ));
    }

    #[test]
    fn ac2_examples() {
        let balls = vec![
            ball([0.0; 3], 1.0, 0),
            ball([4.0, 0.0, 0.0], 1.0, 1),
            ball([2.0, 0.5, 0.0], 1.0, 2),
        ];
        let key = SimplexKey::edge(0, 1);
        let p = [2.0, 0.0, 0.0];
        assert_abs_diff_eq!(power_distance(p, &balls[2]), -0.75, epsilon = 1e-12);
        assert!(!ac2_satisfied(&key, p, &balls, &balls, &tol()));
        assert!(ac2_satisfied(&key, p, std::iter::empty(), &balls, &tol()));
        assert!(ac2_satisfied(&key, p, &balls[..2], &balls, &tol()));
    }

    #[test]
    fn ac2_ties_count_as_satisfied() {
        // Candidate exactly as close as the simplex balls.
        let balls = vec![
            ball([0.0; 3], 1.0, 0),
            ball([4.0, 0.0, 0.0], 1.0, 1),
            ball([2.0, 2.0, 0.0], 1.0, 2),
        ];
        let key = SimplexKey::edge(0, 1);
        assert!(ac2_satisfied(&key, [2.0, 0.0, 0.0], &balls, &balls, &tol()));
    }

    #[test]
    fn simplex_ordering() {
        assert_eq!(
            simplex_compare(&SimplexKey::vertex(5), &SimplexKey::edge(0, 1)),
            Ordering::Less
        );
        assert_eq!(
            simplex_compare(&SimplexKey::edge(0, 2), &SimplexKey::edge(0, 3)),
            Ordering::Less
        );
        assert_eq!(
            simplex_compare(
                &SimplexKey::triangle(1, 2, 3),
                &SimplexKey::triangle(3, 2, 1)
            ),
            Ordering::Equal
        );
    }

    #[test]
    fn facets_and_cofacets() {
        let t = SimplexKey::tet(4, 1, 3, 2);
        assert_eq!(t.vertices(), &[1, 2, 3, 4]);
        let f: Vec<_> = t.facets().collect();
        assert_eq!(
            f,
            vec![
                SimplexKey::triangle(2, 3, 4),
                SimplexKey::triangle(1, 3, 4),
                SimplexKey::triangle(1, 2, 4),
                SimplexKey::triangle(1, 2, 3),
            ]
        );
        assert_eq!(SimplexKey::vertex(3).facets().count(), 0);
        assert_eq!(
            SimplexKey::edge(1, 5).with_vertex(0),
            SimplexKey::triangle(0, 1, 5)
        );
        assert_eq!(format!("{}", SimplexKey::edge(0, 1)), "1 0 1");
    }

    #[test]
    #[should_panic]
    fn repeated_vertex_panics() {
        SimplexKey::new(&[1, 1]);
    }
}
