//! Index relabeling: realignment, row/column transpositions and the general
//! `ρ^{T_Y}` family.
//!
//! Every index of an `n`-partite density matrix carries a label: `r_k` for the
//! row index of subsystem `k` and `c_k` for its column index. A
//! [`ReshapedMatrix`] records which labels sit on the row side and which on
//! the column side, and in which order (first label slowest). Moving labels
//! between sides and reordering them only repositions entries; nothing is
//! conjugated.
//!
//! The canonical layout sorts each side by subsystem and, when both labels of
//! a subsystem share a side, puts `c_k` before (slower than) `r_k`. With that
//! convention `{c_A, r_B}` on a two-qubit state is exactly the realigned matrix
//! `R(ρ)`, `{r}` on a single system maps `A` to `vec(A)ᵗ` and `{c}` to `vec(A)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::{offsets, DensityMatrix};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Largest subsystem count a [`LabelSet`] can describe (one letter per subsystem).
pub const MAX_SUBSYSTEMS: usize = 26;

/// Default limit on `n` for exhaustive subset scans (`2^{2n}` reshapes).
pub const DEFAULT_SCAN_LIMIT: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LabelKind {
    /// Column index; sorts first so that it varies slower when co-resident.
    Col,
    Row,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Label {
    pub subsystem: usize,
    pub kind: LabelKind,
}

impl Label {
    pub fn row(subsystem: usize) -> Self {
        Self { subsystem, kind: LabelKind::Row }
    }

    pub fn col(subsystem: usize) -> Self {
        Self { subsystem, kind: LabelKind::Col }
    }

    fn bit(self) -> u32 {
        2 * self.subsystem as u32 + u32::from(self.kind == LabelKind::Col)
    }

    fn canonical_key(self) -> (usize, LabelKind) {
        (self.subsystem, self.kind)
    }

    /// Side the label occupies in an untouched density matrix.
    fn default_on_rows(self) -> bool {
        self.kind == LabelKind::Row
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            LabelKind::Row => 'r',
            LabelKind::Col => 'c',
        };
        write!(f, "{k}{}", (b'A' + self.subsystem as u8) as char)
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        let kind = match chars.next() {
            Some('r') => LabelKind::Row,
            Some('c') => LabelKind::Col,
            _ => {
                return Err(Error::arg(format!("unknown label '{s}': expected r or c followed by a subsystem letter")))
            }
        };
        let letter = chars.next();
        match (letter, chars.next()) {
            (Some(l @ 'A'..='Z'), None) => Ok(Label { subsystem: (l as u8 - b'A') as usize, kind }),
            _ => Err(Error::arg(format!("unknown label '{s}': subsystem must be a single letter A-Z"))),
        }
    }
}

/// A subset `Y` of the `2n` labels `{r_A, c_A, ..., r_Z, c_Z}`.
///
/// Stored as a bitmask: bit `2k` is `r_k`, bit `2k+1` is `c_k`. Bitmask order
/// is the canonical enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabelSet {
    n: usize,
    mask: u64,
}

impl LabelSet {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SUBSYSTEMS {
            return Err(Error::arg(format!("label sets need 1..={MAX_SUBSYSTEMS} subsystems, got {n}")));
        }
        Ok(Self { n, mask: 0 })
    }

    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        let set = Self::empty(n)?;
        if mask & !set.full_mask() != 0 {
            return Err(Error::arg(format!("mask {mask:#b} has bits beyond {n} subsystems")));
        }
        Ok(Self { n, mask })
    }

    pub fn from_labels(n: usize, labels: impl IntoIterator<Item = Label>) -> Result<Self> {
        let mut set = Self::empty(n)?;
        for l in labels {
            if l.subsystem >= n {
                return Err(Error::arg(format!("label {l} out of range for {n} subsystems")));
            }
            if set.contains(l) {
                return Err(Error::arg(format!("label {l} listed twice")));
            }
            set.mask |= 1 << l.bit();
        }
        Ok(set)
    }

    /// Parses a comma separated list such as `"rA,cB"`; the empty string is `∅`.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Self::empty(n);
        }
        let labels = text.split(',').map(|s| Label::from_str(s.trim())).collect::<Result<Vec<_>>>()?;
        Self::from_labels(n, labels)
    }

    /// `∪_{k ∈ subsystems} {r_k, c_k}`: the ordinary partial transposition.
    pub fn partial_transposition(n: usize, subsystems: &[usize]) -> Result<Self> {
        Self::from_labels(n, subsystems.iter().flat_map(|&k| [Label::row(k), Label::col(k)]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    fn full_mask(&self) -> u64 {
        if 2 * self.n == 64 {
            u64::MAX
        } else {
            (1u64 << (2 * self.n)) - 1
        }
    }

    pub fn contains(&self, label: Label) -> bool {
        label.subsystem < self.n && self.mask & (1 << label.bit()) != 0
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn complement(&self) -> Self {
        Self { n: self.n, mask: self.full_mask() & !self.mask }
    }

    /// Members in bit order.
    pub fn labels(&self) -> Vec<Label> {
        (0..self.n).flat_map(|k| [Label::row(k), Label::col(k)]).filter(|&l| self.contains(l)).collect()
    }

    /// True when every subsystem contributes both or neither of its labels; the
    /// reshaped matrix is then square and Hermitian for Hermitian input.
    pub fn is_hermitian_case(&self) -> bool {
        (0..self.n).all(|k| self.contains(Label::row(k)) == self.contains(Label::col(k)))
    }

    /// Representative of the `{Y, Yᶜ}` pair: the member without `c` of the last subsystem.
    pub fn is_complement_representative(&self) -> bool {
        self.mask < self.complement().mask
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.labels().iter().map(Label::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for LabelSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.labels().iter().map(Label::to_string).collect();
        parts.serialize(s)
    }
}

/// All subsets of the `2n` labels in bitmask order; with `dedupe` only one
/// member of each `{Y, Yᶜ}` pair is kept.
pub fn enumerate_label_subsets(n: usize, dedupe: bool, max_n: usize) -> Result<Vec<LabelSet>> {
    if n == 0 {
        return Err(Error::arg("need at least one subsystem"));
    }
    if n > max_n || n > MAX_SUBSYSTEMS || 2 * n >= 64 {
        return Err(Error::Size(format!(
            "{n} subsystems exceed the scan limit of {max_n} ({} subsets); evaluate individual label sets instead",
            if 2 * n < 64 { (1u64 << (2 * n)).to_string() } else { "2^".to_string() + &(2 * n).to_string() }
        )));
    }
    let total = 1u64 << (2 * n);
    Ok((0..total).map(|mask| LabelSet { n, mask }).filter(|y| !dedupe || y.is_complement_representative()).collect())
}

/// A matrix whose rows and columns are indexed by ordered lists of labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ReshapedMatrix {
    mat: ComplexMatrix,
    row_labels: Vec<Label>,
    col_labels: Vec<Label>,
    source_dims: Vec<usize>,
}

impl ReshapedMatrix {
    /// The density matrix itself: `r_k` on rows, `c_k` on columns.
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let n = rho.num_subsystems();
        Self {
            mat: rho.matrix().clone(),
            row_labels: (0..n).map(Label::row).collect(),
            col_labels: (0..n).map(Label::col).collect(),
            source_dims: rho.dims().to_vec(),
        }
    }

    /// Any square matrix over the given subsystem dimensions, in density layout.
    /// Reshaping is pure index work, so no trace or hermiticity checks apply.
    pub fn from_square(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let side: usize = dims.iter().product();
        if dims.is_empty() || dims.len() > MAX_SUBSYSTEMS || !mat.is_square() || mat.rows() != side {
            return Err(Error::Shape(format!(
                "{}x{} matrix does not match subsystem dimensions {dims:?}",
                mat.rows(),
                mat.cols()
            )));
        }
        let n = dims.len();
        Ok(Self {
            mat,
            row_labels: (0..n).map(Label::row).collect(),
            col_labels: (0..n).map(Label::col).collect(),
            source_dims: dims,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn row_labels(&self) -> &[Label] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[Label] {
        &self.col_labels
    }

    pub fn source_dims(&self) -> &[usize] {
        &self.source_dims
    }

    pub fn shape(&self) -> (usize, usize) {
        self.mat.shape()
    }

    fn dim(&self, label: Label) -> usize {
        self.source_dims[label.subsystem]
    }

    fn on_rows(&self, label: Label) -> bool {
        self.row_labels.contains(&label)
    }

    /// Re-lays the entries with an explicit ordering of the labels on each side.
    /// `rows ∪ cols` must be exactly the `2n` labels.
    pub fn relayout(&self, rows: Vec<Label>, cols: Vec<Label>) -> Result<Self> {
        let n = self.source_dims.len();
        let mut seen = vec![false; 2 * n];
        for &l in rows.iter().chain(&cols) {
            if l.subsystem >= n {
                return Err(Error::arg(format!("label {l} out of range for {n} subsystems")));
            }
            if std::mem::replace(&mut seen[l.bit() as usize], true) {
                return Err(Error::arg(format!("label {l} appears twice in layout")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::arg("layout must place every label exactly once"));
        }

        // flat offset step of each label in the current buffer
        let src_cols = self.mat.cols();
        let mut step = vec![0usize; 2 * n];
        let mut w = 1;
        for &l in self.col_labels.iter().rev() {
            step[l.bit() as usize] = w;
            w *= self.dim(l);
        }
        let mut w = src_cols;
        for &l in self.row_labels.iter().rev() {
            step[l.bit() as usize] = w;
            w *= self.dim(l);
        }

        let side = |labels: &[Label]| -> (Vec<usize>, Vec<usize>) {
            labels.iter().map(|&l| (self.dim(l), step[l.bit() as usize])).unzip()
        };
        let (row_dims, row_steps) = side(&rows);
        let (col_dims, col_steps) = side(&cols);
        let n_rows: usize = row_dims.iter().product();
        let n_cols: usize = col_dims.iter().product();
        let row_off = offsets(&row_dims, &row_steps);
        let col_off = offsets(&col_dims, &col_steps);

        let src = self.mat.entries();
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for &r in &row_off {
            data.extend(col_off.iter().map(|&c| src[r + c]));
        }
        Ok(Self {
            mat: ComplexMatrix::from_raw(n_rows, n_cols, data),
            row_labels: rows,
            col_labels: cols,
            source_dims: self.source_dims.clone(),
        })
    }

    /// Moves every label of `y` to the other side, then lays both sides out canonically.
    pub fn flip(&self, y: &LabelSet) -> Result<Self> {
        let n = self.source_dims.len();
        if y.n() != n {
            return Err(Error::arg(format!("label set is over {} subsystems, matrix has {n}", y.n())));
        }
        let mut rows = Vec::new();
        let mut cols = Vec::new();
        for l in (0..n).flat_map(|k| [Label::col(k), Label::row(k)]) {
            if self.on_rows(l) != y.contains(l) {
                rows.push(l);
            } else {
                cols.push(l);
            }
        }
        rows.sort_by_key(|l| l.canonical_key());
        cols.sort_by_key(|l| l.canonical_key());
        self.relayout(rows, cols)
    }

    /// Lays both sides out canonically without moving labels between sides.
    pub fn canonical(&self) -> Result<Self> {
        let mut rows = self.row_labels.clone();
        let mut cols = self.col_labels.clone();
        rows.sort_by_key(|l| l.canonical_key());
        cols.sort_by_key(|l| l.canonical_key());
        self.relayout(rows, cols)
    }

    /// Set of labels currently away from their default side.
    pub fn moved_labels(&self) -> LabelSet {
        let n = self.source_dims.len();
        let moved = self.row_labels.iter().filter(|l| !l.default_on_rows());
        let moved = moved.chain(self.col_labels.iter().filter(|l| l.default_on_rows()));
        LabelSet::from_labels(n, moved.copied()).expect("layout labels are valid")
    }
}

/// `ρ^{T_Y}`: the labels in `y` change sides, everything else stays put.
pub fn generalized_transpose(rho: &DensityMatrix, y: &LabelSet) -> Result<ReshapedMatrix> {
    ReshapedMatrix::from_density(rho).flip(y)
}

fn realign_blocks(mat: &ComplexMatrix, m: usize, n: usize) -> ComplexMatrix {
    // rows are vec(Z_{1,1})ᵀ … vec(Z_{m,1})ᵀ, vec(Z_{1,2})ᵀ, … with Z_{i,j} the n×n blocks
    let side = m * n;
    let src = mat.entries();
    let mut data = Vec::with_capacity(side * side);
    for bj in 0..m {
        for bi in 0..m {
            for y in 0..n {
                for x in 0..n {
                    data.push(src[(bi * n + x) * side + bj * n + y]);
                }
            }
        }
    }
    ComplexMatrix::from_raw(m * m, n * n, data)
}

/// Realignment `R(ρ)` of a bipartite state with dimensions `(m, n)`; the result is `m² × n²`.
pub fn realign(rho: &DensityMatrix) -> Result<ReshapedMatrix> {
    let dims = rho.dims();
    if dims.len() != 2 {
        return Err(Error::arg(format!(
            "realignment needs exactly 2 subsystems, got {}; use cut_and_realign",
            dims.len()
        )));
    }
    Ok(ReshapedMatrix {
        mat: realign_blocks(rho.matrix(), dims[0], dims[1]),
        row_labels: vec![Label::col(0), Label::row(0)],
        col_labels: vec![Label::col(1), Label::row(1)],
        source_dims: dims.to_vec(),
    })
}

/// `ρ^{T_X}` for a non-empty set of subsystems, as a square matrix.
pub fn partial_transpose(rho: &DensityMatrix, subsystems: &[usize]) -> Result<ComplexMatrix> {
    if subsystems.is_empty() {
        return Err(Error::arg("partial transposition needs at least one subsystem"));
    }
    let y = LabelSet::partial_transposition(rho.num_subsystems(), subsystems)?;
    Ok(generalized_transpose(rho, &y)?.into_matrix())
}

/// Partition of the subsystems into two non-empty blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    first: Vec<usize>,
    second: Vec<usize>,
}

impl Bipartition {
    pub fn new(n: usize, first: &[usize]) -> Result<Self> {
        let mut in_first = vec![false; n];
        for &k in first {
            if k >= n {
                return Err(Error::arg(format!("subsystem {k} out of range for {n} subsystems")));
            }
            in_first[k] = true;
        }
        let first: Vec<usize> = (0..n).filter(|&k| in_first[k]).collect();
        let second: Vec<usize> = (0..n).filter(|&k| !in_first[k]).collect();
        if first.is_empty() || second.is_empty() {
            return Err(Error::arg("a bipartite cut needs two non-empty blocks"));
        }
        Ok(Self { first, second })
    }

    /// All cuts with subsystem 0 in the first block, ordered by bitmask of that block.
    pub fn all(n: usize) -> Vec<Self> {
        if !(2..64).contains(&n) {
            return Vec::new();
        }
        (1u64..(1 << n) - 1)
            .filter(|m| m & 1 == 1)
            .map(|m| {
                let first: Vec<usize> = (0..n).filter(|&k| m >> k & 1 == 1).collect();
                Self::new(n, &first).expect("non-trivial mask")
            })
            .collect()
    }

    pub fn first(&self) -> &[usize] {
        &self.first
    }

    pub fn second(&self) -> &[usize] {
        &self.second
    }

    pub fn num_subsystems(&self) -> usize {
        self.first.len() + self.second.len()
    }

    /// The label set whose transposition is this cut's realignment up to a
    /// row/column permutation: `c_k` for the first block, `r_k` for the second.
    pub fn equivalent_labels(&self) -> LabelSet {
        let labels = self.first.iter().map(|&k| Label::col(k)).chain(self.second.iter().map(|&k| Label::row(k)));
        LabelSet::from_labels(self.num_subsystems(), labels).expect("cut labels are valid")
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = |ks: &[usize]| ks.iter().map(|&k| (b'A' + k as u8) as char).collect::<String>();
        write!(f, "{}|{}", letters(&self.first), letters(&self.second))
    }
}

/// Fuses each block of the cut into one effective subsystem (ascending order
/// within a block) and realigns the resulting bipartite matrix.
pub fn cut_and_realign(rho: &DensityMatrix, cut: &Bipartition) -> Result<ReshapedMatrix> {
    let n = rho.num_subsystems();
    if cut.num_subsystems() != n {
        return Err(Error::arg(format!("cut covers {} subsystems, state has {n}", cut.num_subsystems())));
    }
    let order: Vec<usize> = cut.first.iter().chain(&cut.second).copied().collect();
    let permuted = rho.permute_subsystems(&order)?;
    let m: usize = cut.first.iter().map(|&k| rho.dims()[k]).product();
    let d: usize = cut.second.iter().map(|&k| rho.dims()[k]).product();
    let block = |ks: &[usize]| -> Vec<Label> {
        ks.iter().map(|&k| Label::col(k)).chain(ks.iter().map(|&k| Label::row(k))).collect()
    };
    Ok(ReshapedMatrix {
        mat: realign_blocks(permuted.matrix(), m, d),
        row_labels: block(&cut.first),
        col_labels: block(&cut.second),
        source_dims: rho.dims().to_vec(),
    })
}
