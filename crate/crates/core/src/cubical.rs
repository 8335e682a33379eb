//! Periodic cubical complexes with the upper-star filtration.
//!
//! Every grid vertex `v` and every subset `S` of the axes span one cube
//! `[v, v + e_S]`, with indices taken modulo the grid shape. A cube enters the
//! superlevel filtration at the minimum of its vertex values, so the
//! subcomplex at level `x` is `{cells with value >= x}`.
//!
//! Cells are stored degree-major: all vertices, then all edges, and so on.
//! Within a degree, cells are ordered by axis mask and then by vertex index.

use crate::curves::StepCurve;
use crate::field::ScalarField;

/// One cell of the complex.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub degree: usize,
    pub value: f64,
    /// Faces with odd incidence (Z/2 boundary), sorted by cell index.
    pub boundary: Vec<usize>,
}

/// A periodic cubical complex over `[0,1)^d` filtered by upper-star values.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    dim: usize,
    shape: Vec<usize>,
    cells: Vec<Cell>,
    counts: Vec<usize>,
    // cell_index[mask][vertex]
    cell_index: Vec<Vec<usize>>,
}

impl FilteredComplex {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Number of cells of each degree `0..=dim`.
    pub fn counts_by_degree(&self) -> &[usize] {
        &self.counts
    }

    /// Index of the cell of the given grid vertex (row-major index).
    pub fn vertex_cell(&self, vertex: usize) -> usize {
        self.cell_index[0][vertex]
    }

    /// Index of the cube based at `vertex` spanning the axes in `mask`.
    pub fn cube(&self, vertex: usize, mask: usize) -> usize {
        self.cell_index[mask][vertex]
    }

    pub fn min_value(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| c.value)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| c.value)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sorted distinct filtration values.
    pub fn levels(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.cells.iter().map(|c| c.value).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Alternating sum of cell counts, `0` for every torus.
    pub fn euler_characteristic(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }
}

/// Builds the periodic cubical complex of `f` with upper-star values.
pub fn build_complex(f: &ScalarField) -> FilteredComplex {
    let dim = f.dim();
    let shape = f.shape().to_vec();
    let n_vertices = f.len();
    let n_masks = 1usize << dim;

    // strides of the row-major vertex index
    let mut strides = vec![1usize; dim];
    for axis in (0..dim.saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * shape[axis + 1];
    }
    let shift = |vertex: usize, axis: usize| -> usize {
        let coord = (vertex / strides[axis]) % shape[axis];
        if coord + 1 == shape[axis] {
            vertex - coord * strides[axis]
        } else {
            vertex + strides[axis]
        }
    };

    let mut masks: Vec<usize> = (0..n_masks).collect();
    masks.sort_by_key(|&m| (m.count_ones(), m));

    let mut cell_index = vec![Vec::new(); n_masks];
    let mut offset = 0;
    for &mask in &masks {
        cell_index[mask] = (offset..offset + n_vertices).collect();
        offset += n_vertices;
    }

    let mut cells = Vec::with_capacity(n_vertices * n_masks);
    let mut counts = vec![0usize; dim + 1];
    for &mask in &masks {
        let degree = mask.count_ones() as usize;
        counts[degree] += n_vertices;
        for vertex in 0..n_vertices {
            if mask == 0 {
                // `+ 0.0` maps -0.0 to 0.0, so that a single zero enters
                // the `total_cmp` orderings used downstream
                cells.push(Cell {
                    degree: 0,
                    value: f.values()[vertex] + 0.0,
                    boundary: Vec::new(),
                });
                continue;
            }
            let mut boundary: Vec<usize> = Vec::with_capacity(2 * degree);
            let mut value = f64::INFINITY;
            for axis in (0..dim).filter(|a| mask & (1 << a) != 0) {
                let sub = mask & !(1 << axis);
                let lower = cell_index[sub][vertex];
                let upper = cell_index[sub][shift(vertex, axis)];
                value = value.min(cells[lower].value).min(cells[upper].value);
                for face in [lower, upper] {
                    // Z/2: a face met twice (axis of length 1) cancels
                    match boundary.iter().position(|&b| b == face) {
                        Some(pos) => {
                            boundary.swap_remove(pos);
                        }
                        None => boundary.push(face),
                    }
                }
            }
            boundary.sort_unstable();
            cells.push(Cell {
                degree,
                value,
                boundary,
            });
        }
    }

    FilteredComplex {
        dim,
        shape,
        cells,
        counts,
        cell_index,
    }
}

/// Cells whose boundary of boundary is non-zero over Z/2 (empty for a valid
/// complex).
pub fn boundary_defects(k: &FilteredComplex) -> Vec<usize> {
    let mut defects = Vec::new();
    let mut parity = vec![false; k.len()];
    for (idx, cell) in k.cells.iter().enumerate() {
        let mut touched = Vec::new();
        for &face in &cell.boundary {
            for &ridge in &k.cells[face].boundary {
                parity[ridge] ^= true;
                touched.push(ridge);
            }
        }
        if touched.iter().any(|&r| parity[r]) {
            defects.push(idx);
        }
        for r in touched {
            parity[r] = false;
        }
    }
    defects
}

/// Faces whose value is below the value of a coface (empty for a valid
/// superlevel filtration).
pub fn monotonicity_defects(k: &FilteredComplex) -> Vec<(usize, usize)> {
    k.cells
        .iter()
        .enumerate()
        .flat_map(|(idx, cell)| {
            cell.boundary
                .iter()
                .filter(move |&&face| k.cells[face].value < cell.value)
                .map(move |&face| (face, idx))
        })
        .collect()
}

/// Euler curve by direct cell counting:
/// `chi(x) = sum_k (-1)^k #{k-cells with value >= x}`.
pub fn euler_curve_cells(k: &FilteredComplex) -> StepCurve {
    let mut signed: Vec<(f64, i64)> = k
        .cells
        .iter()
        .map(|c| (c.value, if c.degree % 2 == 0 { 1 } else { -1 }))
        .collect();
    signed.sort_by(|a, b| b.0.total_cmp(&a.0));

    // Sweep from the top; the running sum at a distinct value v is chi(v),
    // constant on (previous value, v].
    let mut levels_desc: Vec<(f64, i64)> = Vec::new();
    let mut running = 0i64;
    let mut i = 0;
    while i < signed.len() {
        let v = signed[i].0;
        while i < signed.len() && signed[i].0 == v {
            running += signed[i].1;
            i += 1;
        }
        levels_desc.push((v, running));
    }
    levels_desc.reverse();
    // chi below the minimum is the Euler characteristic of the full complex,
    // zero on tori; the step curve is zero outside its support.
    let breakpoints: Vec<f64> = levels_desc.iter().map(|l| l.0).collect();
    let values: Vec<f64> = levels_desc.iter().skip(1).map(|l| l.1 as f64).collect();
    StepCurve::new(breakpoints, values).expect("sorted distinct levels")
}

/// Rank of `H_k` of the subcomplex `{value >= x}` over Z/2, computed by
/// Gaussian elimination of the boundary matrices.
pub fn betti_at_level_bruteforce(k: &FilteredComplex, x: f64, degree: usize) -> usize {
    if degree > k.dim {
        return 0;
    }
    let present: Vec<bool> = k.cells.iter().map(|c| c.value >= x).collect();
    let n_k = k
        .cells
        .iter()
        .zip(&present)
        .filter(|(c, &p)| p && c.degree == degree)
        .count();
    if n_k == 0 {
        return 0;
    }
    let rank_k = boundary_rank(k, &present, degree);
    let rank_above = boundary_rank(k, &present, degree + 1);
    n_k - rank_k - rank_above
}

/// Rank of the boundary map from present `degree`-cells to present
/// `(degree-1)`-cells.
fn boundary_rank(k: &FilteredComplex, present: &[bool], degree: usize) -> usize {
    if degree == 0 || degree > k.dim {
        return 0;
    }
    // local numbering of the present faces
    let mut row_of = vec![usize::MAX; k.len()];
    let mut n_rows = 0;
    for (idx, c) in k.cells.iter().enumerate() {
        if present[idx] && c.degree == degree - 1 {
            row_of[idx] = n_rows;
            n_rows += 1;
        }
    }
    let words = n_rows.div_ceil(64);
    let mut columns: Vec<Vec<u64>> = k
        .cells
        .iter()
        .enumerate()
        .filter(|(idx, c)| present[*idx] && c.degree == degree)
        .map(|(_, c)| {
            let mut bits = vec![0u64; words];
            for &face in &c.boundary {
                // faces of present cells are present by monotonicity
                let r = row_of[face];
                bits[r / 64] ^= 1 << (r % 64);
            }
            bits
        })
        .collect();

    let mut rank = 0;
    for row in 0..n_rows {
        let (w, b) = (row / 64, 1u64 << (row % 64));
        let Some(pivot) = (rank..columns.len()).find(|&j| columns[j][w] & b != 0) else {
            continue;
        };
        columns.swap(rank, pivot);
        let pivot_col = columns[rank].clone();
        for col in columns.iter_mut().skip(rank + 1) {
            if col[w] & b != 0 {
                for (x, y) in col.iter_mut().zip(&pivot_col) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}
