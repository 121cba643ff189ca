//! Dense matrices and an exact sparse linear solver.

use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// Square or rectangular dense matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self[(i, j)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + o[(i, j)].clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - o[(i, j)].clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc + a.clone() * x.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self) -> S {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        match n {
            0 => return S::one(),
            1 => return self[(0, 0)].clone(),
            2 => {
                return self[(0, 0)].clone() * self[(1, 1)].clone()
                    - self[(0, 1)].clone() * self[(1, 0)].clone()
            }
            _ => {}
        }
        let mut a = self.clone();
        let mut det = S::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
                return S::zero();
            };
            if p != c {
                for j in 0..n {
                    let t = a[(p, j)].clone();
                    a[(p, j)] = a[(c, j)].clone();
                    a[(c, j)] = t;
                }
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det = det * piv.clone();
            let inv = piv.inv().expect("nonzero pivot");
            for r in c + 1..n {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone() * inv.clone();
                for j in c..n {
                    let v = a[(c, j)].clone();
                    if !v.is_zero() {
                        a[(r, j)] = a[(r, j)].clone() - f.clone() * v;
                    }
                }
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut b = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a[(r, c)].is_zero())?;
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                    b.data.swap(p * n + j, c * n + j);
                }
            }
            let inv = a[(c, c)].inv()?;
            for j in 0..n {
                a[(c, j)] = a[(c, j)].clone() * inv.clone();
                b[(c, j)] = b[(c, j)].clone() * inv.clone();
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone();
                for j in 0..n {
                    if !a[(c, j)].is_zero() {
                        a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(c, j)].clone();
                    }
                    if !b[(c, j)].is_zero() {
                        b[(r, j)] = b[(r, j)].clone() - f.clone() * b[(c, j)].clone();
                    }
                }
            }
        }
        Some(b)
    }

    /// Positive definiteness through leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric()
            && (1..=self.rows).all(|k| {
                let idx: Vec<usize> = (0..k).collect();
                self.submatrix(&idx, &idx).det().signum() > 0
            })
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }
}

/// Incremental row-echelon solver for `A x = b`.
///
/// Rows are sparse; columns are unknowns `0..ncols`. Inconsistent rows are
/// remembered so [`LinearSystem::solve`] can report them.
pub struct LinearSystem<S> {
    ncols: usize,
    pivots: BTreeMap<usize, (BTreeMap<usize, S>, S)>,
    inconsistent: bool,
}

/// Outcome of a linear solve: one particular solution and a nullspace basis.
#[derive(Clone, Debug)]
pub struct Solution<S> {
    pub particular: Vec<S>,
    pub nullspace: Vec<Vec<S>>,
}

impl<S: Scalar> LinearSystem<S> {
    pub fn new(ncols: usize) -> Self {
        LinearSystem { ncols, pivots: BTreeMap::new(), inconsistent: false }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Add the equation `Σ row[c] x_c = rhs`.
    pub fn push(&mut self, row: impl IntoIterator<Item = (usize, S)>, rhs: S) {
        let mut r: BTreeMap<usize, S> = BTreeMap::new();
        for (c, v) in row {
            assert!(c < self.ncols, "column out of range");
            if v.is_zero() {
                continue;
            }
            let e = r.entry(c).or_insert_with(S::zero);
            *e = e.clone() + v;
        }
        r.retain(|_, v| !v.is_zero());
        let mut rhs = rhs;
        let mut cursor = 0;
        loop {
            let Some((&c, v)) = r.range(cursor..).next() else { break };
            if let Some((prow, prhs)) = self.pivots.get(&c) {
                let f = v.clone();
                for (pc, pv) in prow {
                    let e = r.entry(*pc).or_insert_with(S::zero);
                    *e = e.clone() - f.clone() * pv.clone();
                    if e.is_zero() {
                        r.remove(pc);
                    }
                }
                rhs = rhs - f * prhs.clone();
            }
            cursor = c + 1;
        }
        match r.iter().next() {
            None => {
                if !rhs.is_zero() {
                    self.inconsistent = true;
                }
            }
            Some((&c, v)) => {
                let inv = v.inv().expect("nonzero leading entry");
                let row: BTreeMap<usize, S> =
                    r.into_iter().map(|(k, x)| (k, x * inv.clone())).collect();
                self.pivots.insert(c, (row, rhs * inv));
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    fn back_substitute(&self, rhs: bool, free: &BTreeMap<usize, S>) -> Vec<S> {
        let mut x = vec![S::zero(); self.ncols];
        for (c, v) in free {
            x[*c] = v.clone();
        }
        for (&p, (row, b)) in self.pivots.iter().rev() {
            let mut acc = if rhs { b.clone() } else { S::zero() };
            for (c, v) in row.range(p + 1..) {
                if !x[*c].is_zero() {
                    acc = acc - v.clone() * x[*c].clone();
                }
            }
            x[p] = acc;
        }
        x
    }

    /// Particular solution with free variables set to zero, plus a nullspace basis.
    pub fn solve(&self) -> Option<Solution<S>> {
        if self.inconsistent {
            return None;
        }
        let particular = self.back_substitute(true, &BTreeMap::new());
        let nullspace = (0..self.ncols)
            .filter(|c| !self.pivots.contains_key(c))
            .map(|f| self.back_substitute(false, &BTreeMap::from([(f, S::one())])))
            .collect();
        Some(Solution { particular, nullspace })
    }
}
