//! Persistence diagrams of superlevel filtrations.
//!
//! Cells are ordered by decreasing filtration value (ties by cell index) and
//! the boundary matrix is reduced over Z/2 by the standard column algorithm
//! with clearing. Infinite bars are truncated to the range of the filtration:
//! an essential class born at `b` becomes the point `(b, min)`. Pairs of zero
//! length are dropped.

use serde::{Deserialize, Serialize};

use crate::cubical::FilteredComplex;
use crate::error::{Error, Result};

/// A point `(birth, death)` with `birth >= death` (superlevel convention).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct PersistencePoint {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePoint {
    pub fn new(birth: f64, death: f64) -> Self {
        Self { birth, death }
    }

    /// Bar length `birth - death`.
    pub fn length(&self) -> f64 {
        self.birth - self.death
    }
}

impl From<[f64; 2]> for PersistencePoint {
    fn from([birth, death]: [f64; 2]) -> Self {
        Self { birth, death }
    }
}

impl From<PersistencePoint> for [f64; 2] {
    fn from(p: PersistencePoint) -> Self {
        [p.birth, p.death]
    }
}

/// Degree-`k` persistence diagram with truncated essential bars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pub degree: usize,
    /// `(min, max)` of the filtration.
    pub range: (f64, f64),
    pub points: Vec<PersistencePoint>,
    /// Number of essential classes, including those whose truncated bar has
    /// zero length and is therefore not listed in `points`.
    pub essential_count: usize,
}

impl Diagram {
    pub fn new(degree: usize, range: (f64, f64), points: Vec<PersistencePoint>) -> Self {
        Self {
            degree,
            range,
            points,
            essential_count: 0,
        }
    }

    pub fn empty(degree: usize, range: (f64, f64)) -> Self {
        Self::new(degree, range, Vec::new())
    }

    pub fn from_pairs(degree: usize, range: (f64, f64), pairs: &[(f64, f64)]) -> Self {
        Self::new(
            degree,
            range,
            pairs
                .iter()
                .map(|&(b, d)| PersistencePoint::new(b, d))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(PersistencePoint::length)
    }

    /// Number of points in the closed quadrant `R_x = [x, inf) x (-inf, x]`.
    pub fn mass_in_quadrant(&self, x: f64) -> usize {
        self.points
            .iter()
            .filter(|p| p.birth >= x && p.death <= x)
            .count()
    }

    /// Rank of `H_k({f >= x})` recovered from the diagram.
    ///
    /// A class is alive at `x` iff `death < x <= birth`: the killing cell has
    /// value `death` and is present at that level. At or below the bottom of
    /// the range the superlevel set is the whole space, whose rank is the
    /// essential count.
    pub fn rank_at(&self, x: f64) -> usize {
        if x <= self.range.0 {
            return self.essential_count;
        }
        self.points
            .iter()
            .filter(|p| p.death < x && x <= p.birth)
            .count()
    }

    /// Points sorted lexicographically by `(birth, death)`.
    pub fn sorted_points(&self) -> Vec<PersistencePoint> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then(a.death.total_cmp(&b.death))
        });
        pts
    }
}

/// Diagrams for degrees `0..=dim` using the default order (decreasing value,
/// ties by cell index).
pub fn compute_diagrams(k: &FilteredComplex) -> Vec<Diagram> {
    let mut order: Vec<usize> = (0..k.len()).collect();
    let cells = k.cells();
    order.sort_by(|&a, &b| cells[b].value.total_cmp(&cells[a].value).then(a.cmp(&b)));
    reduce(k, &order)
}

/// Diagrams for an explicit cell order, which must be a filtration order:
/// values non-increasing and every face before its cofaces.
pub fn compute_diagrams_with_order(k: &FilteredComplex, order: &[usize]) -> Result<Vec<Diagram>> {
    let n = k.len();
    let mut position = vec![usize::MAX; n];
    for (pos, &cell) in order.iter().enumerate() {
        if cell >= n || position[cell] != usize::MAX {
            return Err(Error::Malformed(
                "order is not a permutation of the cells".into(),
            ));
        }
        position[cell] = pos;
    }
    if order.len() != n {
        return Err(Error::Malformed(
            "order is not a permutation of the cells".into(),
        ));
    }
    let cells = k.cells();
    if order
        .windows(2)
        .any(|w| cells[w[0]].value < cells[w[1]].value)
    {
        return Err(Error::Malformed(
            "values must be non-increasing along the order".into(),
        ));
    }
    for (idx, cell) in cells.iter().enumerate() {
        if cell.boundary.iter().any(|&f| position[f] > position[idx]) {
            return Err(Error::Malformed(format!(
                "cell {idx} precedes one of its faces"
            )));
        }
    }
    Ok(reduce(k, order))
}

fn reduce(k: &FilteredComplex, order: &[usize]) -> Vec<Diagram> {
    let cells = k.cells();
    let n = cells.len();
    let dim = k.dim();
    let mut position = vec![0usize; n];
    for (pos, &cell) in order.iter().enumerate() {
        position[cell] = pos;
    }

    // columns[pos] holds the reduced boundary of order[pos] as sorted positions
    let mut columns: Vec<Vec<usize>> = order
        .iter()
        .map(|&c| {
            let mut col: Vec<usize> = cells[c].boundary.iter().map(|&f| position[f]).collect();
            col.sort_unstable();
            col
        })
        .collect();
    let mut pivot_owner = vec![usize::MAX; n];
    let mut cleared = vec![false; n];
    let mut scratch = Vec::new();

    for degree in (1..=dim).rev() {
        for pos in 0..n {
            if cells[order[pos]].degree != degree || cleared[pos] {
                continue;
            }
            while let Some(&low) = columns[pos].last() {
                let owner = pivot_owner[low];
                if owner == usize::MAX {
                    break;
                }
                add_column(&mut columns, pos, owner, &mut scratch);
            }
            if let Some(&low) = columns[pos].last() {
                pivot_owner[low] = pos;
                // the face column `low` is a creator; its column reduces to zero
                cleared[low] = true;
                columns[low].clear();
            }
        }
    }

    let range = (k.min_value(), k.max_value());
    let mut diagrams: Vec<Diagram> = (0..=dim).map(|d| Diagram::empty(d, range)).collect();
    for pos in 0..n {
        let cell = &cells[order[pos]];
        if let Some(&low) = columns[pos].last() {
            let birth_cell = &cells[order[low]];
            if birth_cell.value > cell.value {
                diagrams[birth_cell.degree]
                    .points
                    .push(PersistencePoint::new(birth_cell.value, cell.value));
            }
        } else if pivot_owner[pos] == usize::MAX {
            let diagram = &mut diagrams[cell.degree];
            diagram.essential_count += 1;
            if cell.value > range.0 {
                diagram
                    .points
                    .push(PersistencePoint::new(cell.value, range.0));
            }
        }
    }
    for d in &mut diagrams {
        d.points = d.sorted_points();
    }
    diagrams
}

/// Replaces `columns[target]` by `columns[target] + columns[source]` over Z/2.
fn add_column(columns: &mut [Vec<usize>], target: usize, source: usize, scratch: &mut Vec<usize>) {
    scratch.clear();
    let (a, b) = (&columns[target], &columns[source]);
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&a[i..]);
    scratch.extend_from_slice(&b[j..]);
    std::mem::swap(&mut columns[target], scratch);
}

/// A broken diagram invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    InvalidRange { range: (f64, f64) },
    NonFinite { index: usize },
    DeathAfterBirth { index: usize },
    OutsideRange { index: usize },
    EssentialCount { expected: usize, actual: usize },
}

/// Checks the point-level invariants of a diagram.
pub fn validate_diagram(d: &Diagram) -> Vec<Violation> {
    let mut out = Vec::new();
    let (lo, hi) = d.range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        out.push(Violation::InvalidRange { range: d.range });
    }
    for (index, p) in d.points.iter().enumerate() {
        if !(p.birth.is_finite() && p.death.is_finite()) {
            out.push(Violation::NonFinite { index });
            continue;
        }
        if p.death > p.birth {
            out.push(Violation::DeathAfterBirth { index });
        }
        let inside = |v: f64| lo <= v && v <= hi;
        if !(inside(p.birth) && inside(p.death)) {
            out.push(Violation::OutsideRange { index });
        }
    }
    out
}

/// [`validate_diagram`] plus the essential count of the `dim`-torus,
/// `binomial(dim, degree)`.
pub fn validate_torus_diagram(d: &Diagram, dim: usize) -> Vec<Violation> {
    let mut out = validate_diagram(d);
    let expected = binomial(dim, d.degree);
    if d.essential_count != expected {
        out.push(Violation::EssentialCount {
            expected,
            actual: d.essential_count,
        });
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::{betti_at_level_bruteforce, build_complex};
    use crate::field::{sample_white_noise, ScalarField};

    #[test]
    fn circle_diagrams() {
        let f = ScalarField::from_grid(vec![0.0, 1.0, 0.0, 1.0], &[4]).unwrap();
        let k = build_complex(&f);
        let dgms = compute_diagrams(&k);
        assert_eq!(dgms.len(), 2);
        assert_eq!(dgms[0].points, vec![PersistencePoint::new(1.0, 0.0); 2]);
        assert_eq!(dgms[0].essential_count, 1);
        assert!(dgms[1].points.is_empty());
        assert_eq!(dgms[1].essential_count, 1);
        assert_eq!(dgms[0].rank_at(0.5), 2);
        assert_eq!(dgms[0].rank_at(0.0), 1);
        assert_eq!(dgms[0].rank_at(-1.0), 1);
        assert_eq!(dgms[0].rank_at(1.1), 0);
    }

    #[test]
    fn constant_field_has_only_discarded_bars() {
        let k = build_complex(&ScalarField::from_grid(vec![2.0; 16], &[4, 4]).unwrap());
        let dgms = compute_diagrams(&k);
        for (deg, d) in dgms.iter().enumerate() {
            assert!(d.is_empty());
            assert_eq!(d.essential_count, binomial(2, deg));
        }
    }

    #[test]
    fn essential_counts_on_tori() {
        for shape in [vec![7], vec![4, 5], vec![3, 3, 3]] {
            let k = build_complex(&sample_white_noise(&shape, 2).unwrap());
            let dgms = compute_diagrams(&k);
            let dim = shape.len();
            let alt: i64 = dgms
                .iter()
                .map(|d| {
                    if d.degree % 2 == 0 {
                        d.essential_count as i64
                    } else {
                        -(d.essential_count as i64)
                    }
                })
                .sum();
            assert_eq!(alt, 0);
            for d in &dgms {
                assert!(
                    validate_torus_diagram(d, dim).is_empty(),
                    "{:?}",
                    validate_torus_diagram(d, dim)
                );
            }
        }
    }

    #[test]
    fn rank_matches_bruteforce_on_small_torus() {
        let k = build_complex(&sample_white_noise(&[4, 4], 17).unwrap());
        let dgms = compute_diagrams(&k);
        let mut levels = k.levels();
        levels.push(k.min_value() - 1.0);
        levels.push(k.max_value() + 1.0);
        for x in levels {
            for d in &dgms {
                assert_eq!(d.rank_at(x), betti_at_level_bruteforce(&k, x, d.degree));
            }
        }
    }

    #[test]
    fn rejects_invalid_orders() {
        let k = build_complex(&sample_white_noise(&[3], 0).unwrap());
        let identity: Vec<usize> = (0..k.len()).collect();
        assert!(compute_diagrams_with_order(&k, &identity[1..]).is_err());
        let mut rev = identity.clone();
        rev.reverse();
        assert!(compute_diagrams_with_order(&k, &rev).is_err());
    }

    #[test]
    fn validator_flags_each_violation() {
        let good = Diagram::from_pairs(0, (0.0, 3.0), &[(3.0, 1.0), (2.0, 1.5)]);
        assert!(validate_diagram(&good).is_empty());
        let inverted = Diagram::from_pairs(0, (0.0, 3.0), &[(1.0, 2.0)]);
        assert_eq!(
            validate_diagram(&inverted),
            vec![Violation::DeathAfterBirth { index: 0 }]
        );
        let outside = Diagram::from_pairs(0, (0.0, 3.0), &[(4.0, 1.0)]);
        assert_eq!(
            validate_diagram(&outside),
            vec![Violation::OutsideRange { index: 0 }]
        );
    }

    #[test]
    fn diagram_json_layout() {
        let d = Diagram {
            essential_count: 1,
            ..Diagram::from_pairs(1, (-1.0, 2.0), &[(2.0, -1.0), (0.5, 0.25)])
        };
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(
            text,
            r#"{"degree":1,"range":[-1.0,2.0],"points":[[2.0,-1.0],[0.5,0.25]],"essential_count":1}"#
        );
        let back: Diagram = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn binomials() {
        assert_eq!(
            (
                binomial(3, 0),
                binomial(3, 1),
                binomial(3, 2),
                binomial(3, 3)
            ),
            (1, 3, 3, 1)
        );
        assert_eq!(binomial(2, 3), 0);
    }
}
