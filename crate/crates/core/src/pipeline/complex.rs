use crate::geometry::SimplexKey;

/// A fixed-α alpha complex, stored as one sorted, duplicate-free simplex list
/// per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaComplex {
    by_dim: [Vec<SimplexKey>; 4],
    alpha: f64,
    ball_count: usize,
}

impl AlphaComplex {
    pub fn empty(ball_count: usize, alpha: f64) -> Self {
        Self {
            by_dim: Default::default(),
            alpha,
            ball_count,
        }
    }

    /// Collects simplices of any dimension into canonical form.
    pub fn from_simplices<I>(ball_count: usize, alpha: f64, simplices: I) -> Self
    where
        I: IntoIterator<Item = SimplexKey>,
    {
        let mut by_dim: [Vec<SimplexKey>; 4] = Default::default();
        for s in simplices {
            by_dim[s.dim()].push(s);
        }
        for list in &mut by_dim {
            list.sort_unstable();
            list.dedup();
        }
        Self {
            by_dim,
            alpha,
            ball_count,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ball_count(&self) -> usize {
        self.ball_count
    }

    pub fn vertices(&self) -> &[SimplexKey] {
        &self.by_dim[0]
    }

    pub fn edges(&self) -> &[SimplexKey] {
        &self.by_dim[1]
    }

    pub fn triangles(&self) -> &[SimplexKey] {
        &self.by_dim[2]
    }

    pub fn tets(&self) -> &[SimplexKey] {
        &self.by_dim[3]
    }

    pub fn of_dim(&self, dim: usize) -> &[SimplexKey] {
        &self.by_dim[dim]
    }

    /// All simplices in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &SimplexKey> {
        self.by_dim.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, key: &SimplexKey) -> bool {
        self.by_dim[key.dim()].binary_search(key).is_ok()
    }

    /// `(simplex, facet)` pairs whose facet is absent.
    pub fn missing_facets(&self) -> Vec<(SimplexKey, SimplexKey)> {
        self.iter()
            .flat_map(|s| s.facets().map(move |f| (*s, f)))
            .filter(|(_, f)| !self.contains(f))
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.iter().all(|s| s.facets().all(|f| self.contains(&f)))
    }

    pub fn is_subcomplex_of(&self, other: &AlphaComplex) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    /// Per-dimension symmetric difference with another complex.
    pub fn symmetric_difference(&self, other: &AlphaComplex) -> [Vec<SimplexKey>; 4] {
        let mut out: [Vec<SimplexKey>; 4] = Default::default();
        for (d, slot) in out.iter_mut().enumerate() {
            let (a, b) = (&self.by_dim[d], &other.by_dim[d]);
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                match (a.get(i), b.get(j)) {
                    (Some(x), Some(y)) if x == y => {
                        i += 1;
                        j += 1;
                    }
                    (Some(x), Some(y)) if x < y => {
                        slot.push(*x);
                        i += 1;
                    }
                    (Some(_), Some(y)) => {
                        slot.push(*y);
                        j += 1;
                    }
                    (Some(x), None) => {
                        slot.push(*x);
                        i += 1;
                    }
                    (None, Some(y)) => {
                        slot.push(*y);
                        j += 1;
                    }
                    (None, None) => unreachable!(),
                }
            }
        }
        out
    }
}

/// Per-dimension counts of an alpha complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ComplexStats {
    pub counts: [usize; 4],
    pub total: usize,
    /// V − E + F − T.
    pub euler: i64,
}

pub fn complex_stats(k: &AlphaComplex) -> ComplexStats {
    let counts = [0, 1, 2, 3].map(|d| k.of_dim(d).len());
    ComplexStats {
        counts,
        total: counts.iter().sum(),
        euler: counts[0] as i64 - counts[1] as i64 + counts[2] as i64 - counts[3] as i64,
    }
}
