//! Finite-dimensional checks of the Leavitt-type relations: residuals of
//! each clause, tameness of the generated semigroup, and trace identities.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type ComplexMatrix = DMatrix<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("matrix rows have inconsistent lengths")]
    Ragged,
    #[error("real and imaginary parts differ in shape")]
    ShapeMismatch,
    #[error("expected {expected} {family} matrices, got {got}")]
    Count { family: &'static str, expected: usize, got: usize },
    #[error("all matrices must be {d}x{d}")]
    Dimension { d: usize },
    #[error("entry is not finite")]
    NotFinite,
    #[error("negative tolerance {0}")]
    Tolerance(f64),
}

/// Largest singular value.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Residual `||M M* M - M||` and whether it is within `tol`.
pub fn is_partial_isometry(m: &ComplexMatrix, tol: f64) -> (bool, f64) {
    let residual = op_norm(&(m * m.adjoint() * m - m));
    (residual <= tol, residual)
}

/// `E_{ij}` in dimension `d`, 1-based.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(i - 1, j - 1)] = Complex64::new(1.0, 0.0);
    m
}

/// Wire format of a square complex matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub d: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        MatrixJson { d: m.nrows(), re: rows(|c| c.re), im: rows(|c| c.im) }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = MatrixError;

    fn try_from(j: &MatrixJson) -> Result<Self, Self::Error> {
        let d = j.d;
        let square = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if !square(&j.re) {
            return Err(MatrixError::Ragged);
        }
        if !square(&j.im) {
            return Err(MatrixError::ShapeMismatch);
        }
        let m = ComplexMatrix::from_fn(d, d, |r, c| Complex64::new(j.re[r][c], j.im[r][c]));
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatrixError::NotFinite);
        }
        Ok(m)
    }
}

/// Candidate images `S_1..S_n`, `T_1..T_m` of the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialIsometrySet {
    pub n: usize,
    pub m: usize,
    pub tol: f64,
    pub s: Vec<ComplexMatrix>,
    pub t: Vec<ComplexMatrix>,
}

impl PartialIsometrySet {
    pub fn new(n: usize, m: usize, tol: f64, s: Vec<ComplexMatrix>, t: Vec<ComplexMatrix>) -> Result<Self, MatrixError> {
        if s.len() != n {
            return Err(MatrixError::Count { family: "S", expected: n, got: s.len() });
        }
        if t.len() != m {
            return Err(MatrixError::Count { family: "T", expected: m, got: t.len() });
        }
        if tol.is_nan() || tol < 0.0 {
            return Err(MatrixError::Tolerance(tol));
        }
        let d = s.first().or(t.first()).map_or(0, |x| x.nrows());
        if s.iter().chain(&t).any(|x| x.nrows() != d || x.ncols() != d) {
            return Err(MatrixError::Dimension { d });
        }
        Ok(PartialIsometrySet { n, m, tol, s, t })
    }

    pub fn dim(&self) -> usize {
        self.s.first().or(self.t.first()).map_or(0, |x| x.nrows())
    }

    /// `w = S_1* S_1` (or `T_1* T_1` when `n = 0`).
    pub fn w(&self) -> ComplexMatrix {
        match self.s.first().or(self.t.first()) {
            Some(x) => x.adjoint() * x,
            None => ComplexMatrix::zeros(0, 0),
        }
    }

    fn range_sum(family: &[ComplexMatrix], d: usize) -> ComplexMatrix {
        family.iter().fold(ComplexMatrix::zeros(d, d), |acc, x| acc + x * x.adjoint())
    }

    /// `v = sum S_i S_i*`.
    pub fn v(&self) -> ComplexMatrix {
        Self::range_sum(&self.s, self.dim())
    }

    /// Generators in the order `S_1..S_n, T_1..T_m, S_1*..S_n*, T_1*..T_m*`.
    fn alphabet(&self) -> Vec<(String, ComplexMatrix)> {
        let named = |prefix: &str, fam: &[ComplexMatrix], star: bool| -> Vec<(String, ComplexMatrix)> {
            fam.iter()
                .enumerate()
                .map(|(i, x)| {
                    if star {
                        (format!("{prefix}{}*", i + 1), x.adjoint())
                    } else {
                        (format!("{prefix}{}", i + 1), x.clone())
                    }
                })
                .collect()
        };
        let mut out = named("S", &self.s, false);
        out.extend(named("T", &self.t, false));
        out.extend(named("S", &self.s, true));
        out.extend(named("T", &self.t, true));
        out
    }
}

/// The `(2, 2)` family in dimension 3: `S_1 = E21`, `S_2 = E31` and the
/// `T`'s a rotation of them by `theta`.
pub fn theta_family(theta: f64, tol: f64) -> PartialIsometrySet {
    let (e21, e31) = (matrix_unit(3, 2, 1), matrix_unit(3, 3, 1));
    let (c, s) = (Complex64::from(theta.cos()), Complex64::from(theta.sin()));
    let t1 = &e21 * c + &e31 * s;
    let t2 = &e21 * (-s) + &e31 * c;
    PartialIsometrySet::new(2, 2, tol, vec![e21, e31], vec![t1, t2]).expect("consistent shapes")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartialIsometrySetJson {
    pub n: usize,
    pub m: usize,
    pub tol: f64,
    pub s: Vec<MatrixJson>,
    pub t: Vec<MatrixJson>,
}

impl From<&PartialIsometrySet> for PartialIsometrySetJson {
    fn from(set: &PartialIsometrySet) -> Self {
        PartialIsometrySetJson {
            n: set.n,
            m: set.m,
            tol: set.tol,
            s: set.s.iter().map(MatrixJson::from).collect(),
            t: set.t.iter().map(MatrixJson::from).collect(),
        }
    }
}

impl TryFrom<&PartialIsometrySetJson> for PartialIsometrySet {
    type Error = MatrixError;

    fn try_from(j: &PartialIsometrySetJson) -> Result<Self, Self::Error> {
        let s = j.s.iter().map(ComplexMatrix::try_from).collect::<Result<_, _>>()?;
        let t = j.t.iter().map(ComplexMatrix::try_from).collect::<Result<_, _>>()?;
        PartialIsometrySet::new(j.n, j.m, j.tol, s, t)
    }
}

/// Operator-norm residual of every clause. The same fields serve the
/// final-projection form, where `*_orthogonality` compares range projections.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RelationReport {
    /// Largest partial-isometry residual of a generator.
    pub generators: f64,
    pub s_orthogonality: f64,
    pub t_orthogonality: f64,
    /// `max ||S_i* S_i - w||, ||T_j* T_j - w||`.
    pub source: f64,
    /// `||sum S S* - sum T T*||`.
    pub range: f64,
    pub vw: f64,
    /// `||v + w - 1||`.
    pub unit: f64,
}

impl RelationReport {
    pub fn max(&self) -> f64 {
        [self.generators, self.s_orthogonality, self.t_orthogonality, self.source, self.range, self.vw, self.unit]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

fn pairwise_max(items: &[ComplexMatrix], f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, x) in items.iter().enumerate() {
        for (k, y) in items.iter().enumerate() {
            if i != k {
                worst = worst.max(op_norm(&f(x, y)));
            }
        }
    }
    worst
}

/// Residuals of the relations in terms of the generators.
pub fn check_r(set: &PartialIsometrySet) -> RelationReport {
    let d = set.dim();
    let w = set.w();
    let v = set.v();
    let vt = PartialIsometrySet::range_sum(&set.t, d);
    RelationReport {
        generators: set.s.iter().chain(&set.t).map(|x| is_partial_isometry(x, set.tol).1).fold(0.0, f64::max),
        s_orthogonality: pairwise_max(&set.s, |x, y| x.adjoint() * y),
        t_orthogonality: pairwise_max(&set.t, |x, y| x.adjoint() * y),
        source: set.s.iter().chain(&set.t).map(|x| op_norm(&(x.adjoint() * x - &w))).fold(0.0, f64::max),
        range: op_norm(&(&v - &vt)),
        vw: op_norm(&(&v * &w)),
        unit: op_norm(&(&v + &w - ComplexMatrix::identity(d, d))),
    }
}

/// Residuals of the relations rewritten with the projections
/// `e(a_i) = S_i S_i*`, `e(a_i^-1) = S_i* S_i`, `e(b_j) = T_j T_j*`,
/// `e(b_j^-1) = T_j* T_j`.
pub fn check_r_prime(set: &PartialIsometrySet) -> RelationReport {
    let d = set.dim();
    let range = |fam: &[ComplexMatrix]| fam.iter().map(|x| x * x.adjoint()).collect::<Vec<_>>();
    let source = |fam: &[ComplexMatrix]| fam.iter().map(|x| x.adjoint() * x).collect::<Vec<_>>();
    let (ea, eb) = (range(&set.s), range(&set.t));
    let sources: Vec<ComplexMatrix> = source(&set.s).into_iter().chain(source(&set.t)).collect();
    let w = sources.first().cloned().unwrap_or_else(|| ComplexMatrix::zeros(d, d));
    let sum = |fam: &[ComplexMatrix]| fam.iter().fold(ComplexMatrix::zeros(d, d), |acc, x| acc + x);
    let (v, vb) = (sum(&ea), sum(&eb));
    let projection = |p: &ComplexMatrix| op_norm(&(p * p - p)).max(op_norm(&(p - p.adjoint())));
    RelationReport {
        generators: ea.iter().chain(&eb).chain(&sources).map(projection).fold(0.0, f64::max),
        s_orthogonality: pairwise_max(&ea, |x, y| x * y),
        t_orthogonality: pairwise_max(&eb, |x, y| x * y),
        source: sources.iter().map(|x| op_norm(&(x - &w))).fold(0.0, f64::max),
        range: op_norm(&(&v - &vb)),
        vw: op_norm(&(&v * &w)),
        unit: op_norm(&(&v + &w - ComplexMatrix::identity(d, d))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TameResult {
    /// Every product of length `<= max_len` is a partial isometry.
    Tame { max_len: usize, products_checked: usize },
    /// First failing word in (length, lexicographic) order.
    Violation { word: String, residual: f64 },
}

/// Checks every product of at most `max_len` generators and adjoints.
/// Products with norm `<= tol` are treated as zero and not extended.
pub fn tame_check(set: &PartialIsometrySet, max_len: usize, tol: f64) -> TameResult {
    let alphabet = set.alphabet();
    let d = set.dim();
    let mut frontier: Vec<(Vec<usize>, ComplexMatrix)> = vec![(Vec::new(), ComplexMatrix::identity(d, d))];
    let mut checked = 0;
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, product) in &frontier {
            for (k, (_, letter)) in alphabet.iter().enumerate() {
                let p = product * letter;
                if op_norm(&p) <= tol {
                    continue;
                }
                checked += 1;
                let (ok, residual) = is_partial_isometry(&p, tol);
                let mut w = word.clone();
                w.push(k);
                if !ok {
                    let word = w.iter().map(|&i| alphabet[i].0.as_str()).collect::<Vec<_>>().join(" ");
                    return TameResult::Violation { word, residual };
                }
                next.push((w, p));
            }
        }
        frontier = next;
    }
    TameResult::Tame { max_len, products_checked: checked }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub d: usize,
    pub t_w: f64,
    pub t_v: f64,
    /// `|(n - m) t_w|`.
    pub difference_residual: f64,
    /// `|d - (t_v + t_w)|`.
    pub dimension_residual: f64,
    /// `max(source, range)` residual of the relations.
    pub epsilon: f64,
    /// `(n + m + 1) / |n - m|`, absent when `n = m`.
    pub constant: Option<f64>,
    /// `C d epsilon`, the guaranteed bound on `|t_w|` when `n != m`.
    pub bound: Option<f64>,
    /// `n != m` and the relations hold within tolerance, forcing `t_w = 0`
    /// and hence `d = 0`.
    pub forces_zero_dimension: bool,
}

/// Trace identities. From `tr(X X*) = tr(X* X)`,
/// `(n - m) t_w = tr(v_S - v_T) - sum tr(S_i* S_i - w) + sum tr(T_j* T_j - w)`
/// and `|tr A| <= d ||A||` gives `|t_w| <= C d epsilon`.
pub fn trace_obstruction(set: &PartialIsometrySet) -> TraceReport {
    let d = set.dim();
    let t_w = set.w().trace().re;
    let t_v = set.v().trace().re;
    let report = check_r(set);
    let epsilon = report.source.max(report.range);
    let gap = set.n.abs_diff(set.m);
    let constant = (gap != 0).then(|| (set.n + set.m + 1) as f64 / gap as f64);
    TraceReport {
        d,
        t_w,
        t_v,
        difference_residual: (gap as f64 * t_w).abs(),
        dimension_residual: (d as f64 - (t_v + t_w)).abs(),
        epsilon,
        constant,
        bound: constant.map(|c| c * d as f64 * epsilon),
        forces_zero_dimension: gap != 0 && report.holds(set.tol),
    }
}
