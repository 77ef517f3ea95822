//! Commutative association schemes with closed-form spectral data.
//!
//! A scheme is stored as its dense 0/1 adjacency matrices `A_0..A_d` together with
//! the first eigenmatrix `P` (column `i` holds the eigenvalues of `A_i` on the
//! primitive idempotents `E_0..E_d`). Everything else is derived: valencies
//! `k_j = P_{0,j}`, the cosine matrix `c_{i,j} = P_{i,j}/k_j`, multiplicities from the
//! row orthogonality `sum_j k_j |c_{i,j}|^2 = |X|/m_i`, and the second eigenmatrix
//! `Q_{j,i} = m_i conj(c_{i,j})`. Construction refuses anything that fails
//! [`validate_scheme`].

use std::collections::{BTreeMap, VecDeque};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, root_of_unity, to_complex, CMatrix, IntMatrix};

/// Tolerance applied to the floating-point spectral identities.
pub const SPECTRAL_TOL: f64 = 1e-10;

/// Structure constants `p_{ij}^k` of a scheme, stored densely.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionNumbers {
    classes: usize,
    data: Vec<i64>,
}

impl IntersectionNumbers {
    pub fn classes(&self) -> usize {
        self.classes
    }

    /// `p_{ij}^k`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> i64 {
        let c = self.classes;
        self.data[(i * c + j) * c + k]
    }

    /// Nested `[i][j][k]` view, used for serialization.
    pub fn to_nested(&self) -> Vec<Vec<Vec<i64>>> {
        let c = self.classes;
        (0..c)
            .map(|i| (0..c).map(|j| (0..c).map(|k| self.get(i, j, k)).collect()).collect())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct AssociationScheme {
    name: String,
    size: usize,
    adjacency: Vec<IntMatrix>,
    first: CMatrix,
    second: CMatrix,
    cosine: CMatrix,
    valencies: Vec<u64>,
    multiplicities: Vec<u64>,
    transpose_map: Vec<usize>,
    intersection: IntersectionNumbers,
    relation: Vec<usize>,
}

impl AssociationScheme {
    /// Builds a scheme from adjacency matrices and its first eigenmatrix, deriving the
    /// remaining spectral data and rejecting inconsistent input.
    pub fn from_parts(name: impl Into<String>, adjacency: Vec<IntMatrix>, first: CMatrix) -> Result<Self> {
        let name = name.into();
        check_shapes(&adjacency)?;
        let classes = adjacency.len();
        if first.shape() != (classes, classes) {
            return Err(Error::DimensionMismatch(format!(
                "eigenmatrix is {:?}, expected {classes}x{classes}",
                first.shape()
            )));
        }
        let size = adjacency[0].nrows();

        let valencies = first
            .row(0)
            .iter()
            .map(|v| positive_integer(*v, "valency"))
            .collect::<Result<Vec<u64>>>()?;
        let cosine = CMatrix::from_fn(classes, classes, |i, j| first[(i, j)] / valencies[j] as f64);
        let multiplicities = (0..classes)
            .map(|i| {
                let norm: f64 = (0..classes)
                    .map(|j| valencies[j] as f64 * cosine[(i, j)].norm_sqr())
                    .sum();
                positive_integer(Complex64::new(size as f64 / norm, 0.0), "multiplicity")
            })
            .collect::<Result<Vec<u64>>>()?;
        let second = CMatrix::from_fn(classes, classes, |j, i| multiplicities[i] as f64 * cosine[(i, j)].conj());

        let report = validate_scheme(&adjacency, &first, &second)?;
        if let Some(failed) = report.checks.iter().find(|c| !c.passed) {
            return Err(Error::NotAScheme(format!(
                "{name}: check '{}' failed (residual {:e})",
                failed.name, failed.residual
            )));
        }

        let transpose_map = transpose_map(&adjacency)?;
        let intersection = intersection_numbers(&adjacency)?;
        let mut relation = vec![0usize; size * size];
        for (i, a) in adjacency.iter().enumerate() {
            for x in 0..size {
                for y in 0..size {
                    if a[(x, y)] == 1 {
                        relation[x * size + y] = i;
                    }
                }
            }
        }

        Ok(Self {
            name,
            size,
            adjacency,
            first,
            second,
            cosine,
            valencies,
            multiplicities,
            transpose_map,
            intersection,
            relation,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `|X|`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of relations `d + 1`.
    pub fn classes(&self) -> usize {
        self.adjacency.len()
    }

    /// Class `d`.
    pub fn class_number(&self) -> usize {
        self.adjacency.len() - 1
    }

    pub fn adjacency(&self) -> &[IntMatrix] {
        &self.adjacency
    }

    pub fn first_eigenmatrix(&self) -> &CMatrix {
        &self.first
    }

    pub fn second_eigenmatrix(&self) -> &CMatrix {
        &self.second
    }

    pub fn cosine(&self) -> &CMatrix {
        &self.cosine
    }

    pub fn valencies(&self) -> &[u64] {
        &self.valencies
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    pub fn transpose_map(&self) -> &[usize] {
        &self.transpose_map
    }

    pub fn intersection(&self) -> &IntersectionNumbers {
        &self.intersection
    }

    /// Index `i` of the relation containing `(x, y)`.
    pub fn relation_of(&self, x: usize, y: usize) -> usize {
        self.relation[x * self.size + y]
    }

    /// Primitive idempotent `E_j = (1/|X|) sum_k Q_{k,j} A_k`.
    pub fn idempotent(&self, j: usize) -> CMatrix {
        idempotent(&self.adjacency, &self.second, j)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_scheme(&self.adjacency, &self.first, &self.second)
            .expect("shapes were checked at construction")
    }
}

/// The two-point scheme: identity and swap.
pub fn trivial_scheme_2() -> AssociationScheme {
    let a0 = IntMatrix::identity(2, 2);
    let a1 = IntMatrix::from_row_slice(2, 2, &[0, 1, 1, 0]);
    let p = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(-1.0)]);
    AssociationScheme::from_parts("trivial2", vec![a0, a1], p).expect("two-point scheme is valid")
}

/// Directed `n`-gon: `A_k = Z^k` for the cyclic shift `Z`, `P_{k,l} = zeta^{kl}`.
pub fn directed_ngon(n: usize) -> Result<AssociationScheme> {
    if n == 0 {
        return Err(Error::InvalidParameter("directed n-gon needs n >= 1".into()));
    }
    let adjacency = (0..n)
        .map(|k| IntMatrix::from_fn(n, n, |x, y| i64::from(y == (x + k) % n)))
        .collect();
    let p = CMatrix::from_fn(n, n, |k, l| root_of_unity(n, (k * l) as i64));
    AssociationScheme::from_parts(format!("ngon{n}"), adjacency, p)
}

/// Ordered binary word scheme `OW(2, d)` on `2^d` points.
///
/// Tensor-basis relations of the `d`-fold power of the two-point scheme are labelled by
/// words `(i_1, .., i_d)`; generator `g_j` flips `i_{j-1}` whenever `i_j = 1`. Each orbit
/// sum is one relation. Class `j >= 1` is the orbit of words whose last nonzero letter
/// sits at position `j`, which has valency `2^{j-1}`.
pub fn ordered_word_scheme(d: usize) -> Result<AssociationScheme> {
    if d == 0 {
        return Err(Error::InvalidParameter("ordered word scheme needs d >= 1".into()));
    }
    if d > 12 {
        return Err(Error::InvalidParameter(format!("depth {d} is too large to materialize")));
    }
    let base = [
        IntMatrix::identity(2, 2),
        IntMatrix::from_row_slice(2, 2, &[0, 1, 1, 0]),
    ];
    let words = 1usize << d;
    let letter = |w: usize, pos: usize| (w >> (d - pos)) & 1; // pos is 1-based, i_1 most significant
    let flip = |w: usize, pos: usize| w ^ (1 << (d - pos));

    // Orbits of the generated group via breadth-first search.
    let mut orbit_of = vec![usize::MAX; words];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..words {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![start];
        orbit_of[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(w) = queue.pop_front() {
            for j in 2..=d {
                if letter(w, j) == 1 {
                    let image = flip(w, j - 1);
                    if orbit_of[image] == usize::MAX {
                        orbit_of[image] = id;
                        members.push(image);
                        queue.push_back(image);
                    }
                }
            }
        }
        orbits.push(members);
    }
    // Identity orbit first, then by increasing size.
    orbits.sort_by_key(|o| (!o.contains(&0), o.len()));
    if orbits.len() != d + 1 {
        return Err(Error::NotAScheme(format!("expected {} orbits, found {}", d + 1, orbits.len())));
    }

    let tensor_basis = |w: usize| -> IntMatrix {
        (1..=d).fold(IntMatrix::identity(1, 1), |acc, pos| acc.kronecker(&base[letter(w, pos)]))
    };
    let adjacency: Vec<IntMatrix> = orbits
        .iter()
        .map(|orbit| {
            orbit
                .iter()
                .fold(IntMatrix::zeros(words, words), |acc, &w| acc + tensor_basis(w))
        })
        .collect();

    let p = CMatrix::from_fn(d + 1, d + 1, |i, j| {
        let v = if j == 0 {
            1.0
        } else {
            let k = (1u64 << (j - 1)) as f64;
            if i == 0 || i + j < d + 1 {
                k
            } else if i + j == d + 1 {
                -k
            } else {
                0.0
            }
        };
        c(v)
    });
    AssociationScheme::from_parts(format!("ow{d}"), adjacency, p)
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the four scheme axioms in exact integer arithmetic, then the spectral
/// identities `PQ = |X| I`, `A_i = sum_j P_{j,i} E_j`, `k_j = P_{0,j}` and
/// `m_i = Q_{0,i} = rank E_i` in floating point.
pub fn validate_scheme(adjacency: &[IntMatrix], first: &CMatrix, second: &CMatrix) -> Result<ValidationReport> {
    check_shapes(adjacency)?;
    let classes = adjacency.len();
    if first.shape() != (classes, classes) || second.shape() != (classes, classes) {
        return Err(Error::DimensionMismatch(format!(
            "eigenmatrices must be {classes}x{classes}"
        )));
    }
    let size = adjacency[0].nrows();
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, residual: f64| {
        checks.push(Check {
            name: name.to_string(),
            passed,
            residual,
        })
    };

    let identity = IntMatrix::identity(size, size);
    let bad = int_mismatch(&adjacency[0], &identity);
    push("identity", bad == 0, bad as f64);

    let binary = adjacency
        .iter()
        .map(|a| a.iter().filter(|&&v| v != 0 && v != 1).count())
        .sum::<usize>();
    let total = adjacency.iter().fold(IntMatrix::zeros(size, size), |acc, a| acc + a);
    let bad = binary + int_mismatch(&total, &IntMatrix::from_element(size, size, 1));
    push("partition", bad == 0, bad as f64);

    let unmatched = adjacency
        .iter()
        .filter(|a| {
            let t = a.transpose();
            !adjacency.contains(&t)
        })
        .count();
    push("transpose", unmatched == 0, unmatched as f64);

    let mut failures = 0usize;
    for i in 0..classes {
        for j in 0..classes {
            let ij = &adjacency[i] * &adjacency[j];
            let ji = &adjacency[j] * &adjacency[i];
            failures += int_mismatch(&ij, &ji);
            if expand_in_basis(adjacency, &ij).is_none() {
                failures += 1;
            }
        }
    }
    push("closure", failures == 0, failures as f64);

    let pq = first * second;
    let target = CMatrix::identity(classes, classes) * c(size as f64);
    let residual = max_abs_diff(&pq, &target);
    push("eigenmatrix-inverse", residual < SPECTRAL_TOL, residual);

    let idempotents: Vec<CMatrix> = (0..classes).map(|j| idempotent(adjacency, second, j)).collect();
    let mut residual: f64 = 0.0;
    for (i, a) in adjacency.iter().enumerate() {
        let recon = idempotents
            .iter()
            .enumerate()
            .fold(CMatrix::zeros(size, size), |acc, (j, e)| acc + e * first[(j, i)]);
        residual = residual.max(max_abs_diff(&to_complex(a), &recon));
    }
    push("spectral-expansion", residual < SPECTRAL_TOL, residual);

    let residual = adjacency
        .iter()
        .enumerate()
        .map(|(j, a)| (first[(0, j)] - c(a.row(0).sum() as f64)).norm())
        .fold(0.0, f64::max);
    push("valencies", residual < SPECTRAL_TOL, residual);

    let residual = idempotents
        .iter()
        .enumerate()
        .map(|(i, e)| (second[(0, i)] - e.trace()).norm())
        .fold(0.0, f64::max);
    push("multiplicities", residual < SPECTRAL_TOL, residual);

    Ok(ValidationReport { checks })
}

/// Exact structure constants `A_i A_j = sum_k p_{ij}^k A_k`.
pub fn intersection_numbers(adjacency: &[IntMatrix]) -> Result<IntersectionNumbers> {
    check_shapes(adjacency)?;
    let classes = adjacency.len();
    let mut data = vec![0i64; classes * classes * classes];
    for i in 0..classes {
        for j in 0..classes {
            let product = &adjacency[i] * &adjacency[j];
            let coeffs = expand_in_basis(adjacency, &product).ok_or_else(|| {
                Error::NotAScheme(format!("A_{i} A_{j} is not constant on every relation"))
            })?;
            for (k, v) in coeffs.into_iter().enumerate() {
                data[(i * classes + j) * classes + k] = v;
            }
        }
    }
    Ok(IntersectionNumbers { classes, data })
}

fn transpose_map(adjacency: &[IntMatrix]) -> Result<Vec<usize>> {
    adjacency
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let t = a.transpose();
            adjacency
                .iter()
                .position(|b| *b == t)
                .ok_or_else(|| Error::NotAScheme(format!("transpose of A_{i} is not a relation")))
        })
        .collect()
}

/// Coefficients of `m` in the basis `A_0..A_d`, or `None` if `m` is not constant on
/// some relation or the relations are empty.
fn expand_in_basis(adjacency: &[IntMatrix], m: &IntMatrix) -> Option<Vec<i64>> {
    let size = m.nrows();
    let mut coeffs: BTreeMap<usize, i64> = BTreeMap::new();
    for (k, a) in adjacency.iter().enumerate() {
        for x in 0..size {
            for y in 0..size {
                if a[(x, y)] != 0 {
                    match coeffs.get(&k) {
                        Some(&v) if v != m[(x, y)] => return None,
                        Some(_) => {}
                        None => {
                            coeffs.insert(k, m[(x, y)]);
                        }
                    }
                }
            }
        }
    }
    (0..adjacency.len()).map(|k| coeffs.get(&k).copied()).collect()
}

fn idempotent(adjacency: &[IntMatrix], second: &CMatrix, j: usize) -> CMatrix {
    let size = adjacency[0].nrows();
    let scale = 1.0 / size as f64;
    adjacency
        .iter()
        .enumerate()
        .fold(CMatrix::zeros(size, size), |acc, (k, a)| {
            acc + to_complex(a) * (second[(k, j)] * scale)
        })
}

fn check_shapes(adjacency: &[IntMatrix]) -> Result<()> {
    let first = adjacency
        .first()
        .ok_or_else(|| Error::DimensionMismatch("no adjacency matrices".into()))?;
    let n = first.nrows();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty point set".into()));
    }
    for (i, a) in adjacency.iter().enumerate() {
        if a.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "A_{i} is {:?}, expected {n}x{n}",
                a.shape()
            )));
        }
    }
    Ok(())
}

fn int_mismatch(a: &IntMatrix, b: &IntMatrix) -> usize {
    a.iter().zip(b.iter()).filter(|(x, y)| x != y).count()
}

fn positive_integer(v: Complex64, what: &str) -> Result<u64> {
    let rounded = v.re.round();
    if v.im.abs() > 1e-9 || (v.re - rounded).abs() > 1e-9 || rounded < 1.0 {
        return Err(Error::NotAScheme(format!("{what} {v} is not a positive integer")));
    }
    Ok(rounded as u64)
}

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_scheme_data() {
        let s = trivial_scheme_2();
        let expected = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(-1.0)]);
        assert_eq!(s.cosine(), &expected);
        assert_eq!(s.first_eigenmatrix(), &expected);
        assert_eq!(s.second_eigenmatrix(), &expected);
        assert_eq!(s.valencies(), &[1, 1]);
        assert_eq!(s.multiplicities(), &[1, 1]);
        assert!(s.validate().passed());
        // A_1 E_1 = -E_1
        let e1 = s.idempotent(1);
        let a1e1 = to_complex(&s.adjacency()[1]) * &e1;
        assert!(max_abs_diff(&a1e1, &(-e1)) < 1e-15);
    }

    #[test]
    fn ngon_two_matches_trivial() {
        let g = directed_ngon(2).unwrap();
        let t = trivial_scheme_2();
        assert_eq!(g.adjacency(), t.adjacency());
        assert!(max_abs_diff(g.first_eigenmatrix(), t.first_eigenmatrix()) < 1e-15);
    }

    #[test]
    fn ngon_three_eigenvalue() {
        let g = directed_ngon(3).unwrap();
        let zeta2 = Complex64::from_polar(1.0, 4.0 * std::f64::consts::PI / 3.0);
        assert!((g.first_eigenmatrix()[(1, 2)] - zeta2).norm() < 1e-15);
    }

    #[test]
    fn ngon_one_is_degenerate() {
        let g = directed_ngon(1).unwrap();
        assert_eq!(g.classes(), 1);
        assert_eq!(g.adjacency()[0], IntMatrix::identity(1, 1));
        assert_eq!(g.first_eigenmatrix()[(0, 0)], c(1.0));
    }

    #[test]
    fn ngon_rejects_zero() {
        assert!(matches!(directed_ngon(0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn ngon_cosine_equals_p_and_q_is_conjugate() {
        for n in 1..=7 {
            let g = directed_ngon(n).unwrap();
            assert_eq!(g.cosine(), g.first_eigenmatrix());
            assert_eq!(g.second_eigenmatrix(), &g.first_eigenmatrix().map(|v| v.conj()));
            for k in 0..n {
                assert_eq!(g.transpose_map()[k], (n - k) % n);
            }
            let report = g.validate();
            assert!(report.passed(), "{report:?}");
            for name in ["eigenmatrix-inverse", "spectral-expansion"] {
                assert!(report.check(name).unwrap().residual < 1e-12);
            }
        }
    }

    #[test]
    fn ngon_intersection_numbers_are_cyclic() {
        let n = 5;
        let g = directed_ngon(n).unwrap();
        let p = g.intersection();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert_eq!(p.get(i, j, k), i64::from((i + j) % n == k));
                }
            }
        }
    }

    #[test]
    fn identity_row_of_intersections() {
        for s in [trivial_scheme_2(), directed_ngon(4).unwrap(), ordered_word_scheme(3).unwrap()] {
            let p = s.intersection();
            for i in 0..s.classes() {
                for k in 0..s.classes() {
                    assert_eq!(p.get(i, 0, k), i64::from(i == k));
                    assert_eq!(p.get(0, i, k), i64::from(i == k));
                }
            }
        }
    }

    #[test]
    fn ordered_word_small_cases() {
        let ow1 = ordered_word_scheme(1).unwrap();
        let t = trivial_scheme_2();
        assert_eq!(ow1.adjacency(), t.adjacency());
        assert!(max_abs_diff(ow1.first_eigenmatrix(), t.first_eigenmatrix()) < 1e-15);

        let ow3 = ordered_word_scheme(3).unwrap();
        assert_eq!(ow3.valencies(), &[1, 1, 2, 4]);
        assert_eq!(ow3.multiplicities(), &[1, 1, 2, 4]);
        assert_eq!(ow3.intersection().get(1, 1, 0), 1);

        // OW(2,2) axioms checked by brute force on the 4x4 orbit sums
        let ow2 = ordered_word_scheme(2).unwrap();
        let report = validate_scheme(ow2.adjacency(), ow2.first_eigenmatrix(), ow2.second_eigenmatrix()).unwrap();
        for name in ["identity", "partition", "transpose", "closure"] {
            assert!(report.check(name).unwrap().passed);
        }
    }

    #[test]
    fn ordered_word_cosine_pattern() {
        let d = 4;
        let s = ordered_word_scheme(d).unwrap();
        for i in 1..=d {
            for j in 1..=d {
                let expected = if i + j < d + 1 {
                    1.0
                } else if i + j == d + 1 {
                    -1.0
                } else {
                    0.0
                };
                assert_eq!(s.cosine()[(i, j)], c(expected));
            }
        }
        assert!(s.validate().passed());
        assert_eq!(s.transpose_map(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn flipped_entry_breaks_axioms() {
        let s = directed_ngon(4).unwrap();
        let mut adjacency = s.adjacency().to_vec();
        adjacency[1][(0, 1)] = 0;
        let report = validate_scheme(&adjacency, s.first_eigenmatrix(), s.second_eigenmatrix()).unwrap();
        assert!(!report.check("partition").unwrap().passed || !report.check("closure").unwrap().passed);
        assert!(!report.passed());
        assert!(AssociationScheme::from_parts("broken", adjacency.clone(), s.first_eigenmatrix().clone()).is_err());
        assert!(intersection_numbers(&adjacency).is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = vec![IntMatrix::identity(2, 2), IntMatrix::zeros(3, 3)];
        let p = CMatrix::identity(2, 2);
        assert!(matches!(validate_scheme(&a, &p, &p), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn column_orthogonality_against_multiplicities() {
        for s in [trivial_scheme_2(), directed_ngon(6).unwrap(), ordered_word_scheme(4).unwrap()] {
            let cos = s.cosine();
            for k in 0..s.classes() {
                let sum: Complex64 = (0..s.classes())
                    .map(|l| cos[(l, k)].conj() * s.multiplicities()[l] as f64)
                    .sum();
                let expected = if k == 0 { s.size() as f64 } else { 0.0 };
                assert!((sum - c(expected)).norm() < 1e-10);
            }
            for i in 0..s.classes() {
                assert_eq!(s.transpose_map()[s.transpose_map()[i]], i);
                assert_eq!(s.valencies()[s.transpose_map()[i]], s.valencies()[i]);
            }
        }
    }
}
