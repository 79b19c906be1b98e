use std::collections::BTreeMap;
use std::fmt;

use super::Field;

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<Vec<F>>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![vec![F::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = F::one();
        }
        m
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(cols: usize, data: Vec<Vec<F>>) -> Self {
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix {
            rows: data.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i]
    }

    pub fn row_vecs(&self) -> &[Vec<F>] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i][j] = v;
    }

    pub fn push_row(&mut self, row: Vec<F>) {
        assert_eq!(row.len(), self.cols);
        self.data.push(row);
        self.rows += 1;
    }

    pub fn map<G: Field>(&self, mut f: impl FnMut(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|r| r.iter().map(&mut f).collect())
                .collect(),
        }
    }

    pub fn try_map<G: Field>(&self, mut f: impl FnMut(&F) -> Option<G>) -> Option<Matrix<G>> {
        let mut data = Vec::with_capacity(self.rows);
        for r in &self.data {
            let mut row = Vec::with_capacity(self.cols);
            for x in r {
                row.push(f(x)?);
            }
            data.push(row);
        }
        Some(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|r| {
                r.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }
}

impl<F: Field> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", x)?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form: pivot entries are 1 and pivot columns are
/// otherwise zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon<F> {
    pub cols: usize,
    pub rows: Vec<Vec<F>>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Echelon<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduce `v` against the echelon rows; the result is zero iff `v` is in
    /// the row space.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let c = v[p].clone();
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    v[j] = v[j].clone() - c.clone() * x;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }
}

/// Gauss-Jordan elimination. Rows are first cleared of denominators; each
/// pivot is the cheapest nonzero candidate in its column.
pub fn rref<F: Field>(m: &Matrix<F>) -> Echelon<F> {
    let mut rows: Vec<Vec<F>> = m
        .data
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    for r in rows.iter_mut() {
        F::clear_denominators(r);
    }
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..m.cols {
        if top == rows.len() {
            break;
        }
        let best = (top..rows.len())
            .filter(|&i| !rows[i][col].is_zero())
            .min_by_key(|&i| (rows[i][col].cost(), i));
        let Some(best) = best else { continue };
        rows.swap(top, best);
        let inv = rows[top][col].inv().expect("nonzero pivot");
        for x in rows[top].iter_mut() {
            if !x.is_zero() {
                *x = x.clone() * &inv;
            }
        }
        let pivot_row = rows[top].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i == top || r[col].is_zero() {
                continue;
            }
            let c = r[col].clone();
            for (j, p) in pivot_row.iter().enumerate() {
                if !p.is_zero() {
                    r[j] = r[j].clone() - c.clone() * p;
                }
            }
        }
        pivots.push(col);
        top += 1;
    }
    rows.truncate(top);
    Echelon {
        cols: m.cols,
        rows,
        pivots,
    }
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    rref(m).rank()
}

/// Basis of {v : M v = 0}; each vector's first nonzero entry is 1.
pub fn nullspace<F: Field>(m: &Matrix<F>) -> Vec<Vec<F>> {
    let e = rref(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![F::zero(); m.cols];
        v[free] = F::one();
        for (row, &p) in e.rows.iter().zip(&e.pivots) {
            if !row[free].is_zero() {
                v[p] = -row[free].clone();
            }
        }
        let lead = v.iter().find(|x| !x.is_zero()).cloned().expect("nonzero");
        if !lead.is_one() {
            let inv = lead.inv().expect("nonzero");
            for x in v.iter_mut() {
                if !x.is_zero() {
                    *x = x.clone() * &inv;
                }
            }
        }
        basis.push(v);
    }
    basis
}

/// Incremental elimination over sparse rows. Stored rows are normalized so
/// their leading entry (smallest column) is 1, and no two share a leading
/// column.
#[derive(Clone, Debug)]
pub struct SparseEchelon<F> {
    cols: usize,
    rows: BTreeMap<usize, BTreeMap<usize, F>>,
}

impl<F: Field> SparseEchelon<F> {
    pub fn new(cols: usize) -> Self {
        SparseEchelon {
            cols,
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }

    fn reduce_map(&self, mut row: BTreeMap<usize, F>) -> BTreeMap<usize, F> {
        let mut from = 0;
        loop {
            let next = row.range(from..).map(|(&c, _)| c).find(|c| self.rows.contains_key(c));
            let Some(col) = next else { return row };
            let c = row.remove(&col).expect("present");
            for (&j, x) in self.rows[&col].range(col + 1..) {
                let v = row.remove(&j).unwrap_or_else(F::zero) - c.clone() * x;
                if !v.is_zero() {
                    row.insert(j, v);
                }
            }
            from = col + 1;
        }
    }

    /// Add a row; returns true if it raised the rank.
    pub fn insert(&mut self, entries: impl IntoIterator<Item = (usize, F)>) -> bool {
        let mut row = BTreeMap::new();
        for (j, x) in entries {
            if !x.is_zero() {
                let v = row.remove(&j).unwrap_or_else(F::zero) + &x;
                if !v.is_zero() {
                    row.insert(j, v);
                }
            }
        }
        let row = self.reduce_map(row);
        let Some((&lead, lc)) = row.iter().next() else {
            return false;
        };
        let inv = lc.inv().expect("nonzero");
        let row = row.into_iter().map(|(j, x)| (j, x * &inv)).collect();
        self.rows.insert(lead, row);
        true
    }

    /// Fully reduced rows: pivot column to the row's entries outside all
    /// pivot columns, negated (so x_pivot = Σ entry_j x_j on the kernel).
    fn back_substituted(&self) -> BTreeMap<usize, BTreeMap<usize, F>> {
        let mut reduced: BTreeMap<usize, BTreeMap<usize, F>> = BTreeMap::new();
        for (&p, row) in self.rows.iter().rev() {
            let mut out: BTreeMap<usize, F> = BTreeMap::new();
            for (&j, x) in row.range(p + 1..) {
                if let Some(pr) = reduced.get(&j) {
                    for (&k, y) in pr {
                        let v = out.remove(&k).unwrap_or_else(F::zero) + x.clone() * y;
                        if !v.is_zero() {
                            out.insert(k, v);
                        }
                    }
                } else {
                    let v = out.remove(&j).unwrap_or_else(F::zero) + x;
                    if !v.is_zero() {
                        out.insert(j, v);
                    }
                }
            }
            reduced.insert(p, out.into_iter().map(|(j, x)| (j, -x)).collect());
        }
        reduced
    }

    /// The reduced row echelon basis of the row space, ordered by pivot.
    pub fn reduced_rows(&self) -> Vec<(usize, Vec<(usize, F)>)> {
        self.back_substituted()
            .into_iter()
            .map(|(p, r)| {
                let mut row = vec![(p, F::one())];
                row.extend(r.into_iter().map(|(j, x)| (j, -x)));
                row.sort_by_key(|(j, _)| *j);
                (p, row)
            })
            .collect()
    }

    /// Reduce a vector against the stored rows; zero iff it lies in the span.
    pub fn reduce(&self, entries: impl IntoIterator<Item = (usize, F)>) -> Vec<(usize, F)> {
        let mut row = BTreeMap::new();
        for (j, x) in entries {
            let v = row.remove(&j).unwrap_or_else(F::zero) + &x;
            if !v.is_zero() {
                row.insert(j, v);
            }
        }
        self.reduce_map(row).into_iter().collect()
    }

    /// Basis of the vectors annihilated by every inserted row, normalized as
    /// in [`nullspace`].
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let reduced = self.back_substituted();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !self.rows.contains_key(c)) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (&p, r) in &reduced {
                if let Some(x) = r.get(&free) {
                    v[p] = x.clone();
                }
            }
            let lead = v.iter().find(|x| !x.is_zero()).cloned().expect("nonzero");
            if !lead.is_one() {
                let inv = lead.inv().expect("nonzero");
                for x in v.iter_mut() {
                    if !x.is_zero() {
                        *x = x.clone() * &inv;
                    }
                }
            }
            basis.push(v);
        }
        basis
    }
}
