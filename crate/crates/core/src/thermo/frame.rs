use super::assignment::{greedy_max, optimal_max};
use crate::error::{Error, Result};
use crate::operator::{c, hermitian_part, HermitianOperator, Matrix, C64};
use crate::spectrum::{diagonal_element, fix_phase_by_largest_entry, hermitian_eigendecompose};
use crate::state::DensityMatrix;

pub const DEFAULT_DEG_TOL: f64 = 1e-8;
/// Greedy matches weaker than this trigger optimal assignment.
pub const GREEDY_OVERLAP_MIN: f64 = 0.7;
/// Two overlaps this close make the match ambiguous.
pub const AMBIGUITY_TOL: f64 = 1e-6;

/// Eigendecomposition of the state at one time, with continuity-matched
/// ordering and parallel-transport phases relative to the previous frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFrame {
    pub t: f64,
    /// Continuity-ordered, not sorted.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub eigenvectors: Matrix,
    /// `<psi_j| drho/dt |psi_j>`.
    pub lambda_dot: Vec<f64>,
    /// Partition of `0..N` into (near-)degenerate groups.
    pub degeneracy_blocks: Vec<Vec<usize>>,
    /// Set when matching against the previous frame was ambiguous.
    pub ambiguous: bool,
}

impl SpectralFrame {
    /// Builds the frame for `rho` at time `t`, where `rho_dot` is the exact
    /// generator output `L(rho)`.
    pub fn new(
        t: f64,
        rho: &DensityMatrix,
        rho_dot: &Matrix,
        previous: Option<&SpectralFrame>,
        deg_tol: f64,
    ) -> Result<Self> {
        let n = rho.dim();
        crate::operator::check_dims(n, rho_dot.nrows())?;
        let rho_dot = hermitian_part(rho_dot);
        let spectrum = rho.spectrum()?;
        let mut values = spectrum.eigenvalues;
        let mut vectors = spectrum.eigenvectors;

        let mut blocks = sorted_blocks(&values, deg_tol);
        for block in blocks.iter().filter(|b| b.len() > 1) {
            adapt_block(&mut vectors, &mut values, block, rho.matrix(), &rho_dot)?;
        }
        fix_phase_by_largest_entry(&mut vectors);

        let mut ambiguous = false;
        if let Some(prev) = previous {
            crate::operator::check_dims(prev.eigenvalues.len(), n)?;
            let overlaps: Vec<Vec<f64>> = (0..n)
                .map(|j| (0..n).map(|k| inner(&prev.eigenvectors, j, &vectors, k).norm()).collect())
                .collect();
            let mut assign = greedy_max(&overlaps);
            if (0..n).any(|j| overlaps[j][assign[j]] < GREEDY_OVERLAP_MIN) {
                assign = optimal_max(&overlaps);
            }

            let permuted_values: Vec<f64> = assign.iter().map(|&k| values[k]).collect();
            let permuted_vectors = Matrix::from_fn(n, n, |i, j| vectors[(i, assign[j])]);
            let mut position = vec![0; n];
            for (j, &k) in assign.iter().enumerate() {
                position[k] = j;
            }
            for block in blocks.iter_mut() {
                for idx in block.iter_mut() {
                    *idx = position[*idx];
                }
            }
            values = permuted_values;
            vectors = permuted_vectors;

            // Ambiguity: the best and second-best overlap of a previous
            // eigenvector are indistinguishable.
            for j in 0..n {
                let row: Vec<f64> = (0..n).map(|k| overlaps[j][assign[k]]).collect();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| row[b].total_cmp(&row[a]));
                let (first, second) = (order[0], order[1]);
                if row[first] - row[second] < AMBIGUITY_TOL {
                    ambiguous = true;
                    merge_blocks(&mut blocks, first, second);
                }
            }

            for j in 0..n {
                let z = inner(&prev.eigenvectors, j, &vectors, j);
                let norm = z.norm();
                if norm > 0.0 {
                    let phase = z.conj() / norm;
                    for i in 0..n {
                        vectors[(i, j)] *= phase;
                    }
                }
            }
        }

        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort();

        let lambda_dot: Vec<f64> = (0..n).map(|j| diagonal_element(&vectors, j, &rho_dot).re).collect();
        if values.iter().chain(&lambda_dot).any(|v| !v.is_finite())
            || vectors.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFiniteFrame { t });
        }
        Ok(Self {
            t,
            eigenvalues: values,
            eigenvectors: vectors,
            lambda_dot,
            degeneracy_blocks: blocks,
            ambiguous,
        })
    }

    /// Frame from an explicit eigenbasis. `lambda_dot` is evaluated from
    /// `rho_dot` in that basis; blocks group eigenvalues closer than `deg_tol`.
    pub fn from_basis(
        t: f64,
        eigenvalues: Vec<f64>,
        eigenvectors: Matrix,
        rho_dot: &Matrix,
        deg_tol: f64,
    ) -> Result<Self> {
        let n = eigenvalues.len();
        crate::operator::check_dims(n, eigenvectors.ncols())?;
        crate::operator::check_dims(n, rho_dot.nrows())?;
        let rho_dot = hermitian_part(rho_dot);
        let lambda_dot = (0..n).map(|j| diagonal_element(&eigenvectors, j, &rho_dot).re).collect();
        Ok(Self {
            t,
            degeneracy_blocks: unsorted_blocks(&eigenvalues, deg_tol),
            eigenvalues,
            eigenvectors,
            lambda_dot,
            ambiguous: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn in_same_block(&self, j: usize, k: usize) -> bool {
        self.degeneracy_blocks
            .iter()
            .any(|b| b.contains(&j) && b.contains(&k))
    }

    /// `<psi_j|A|psi_j>` for every `j`.
    pub fn diagonal_of(&self, a: &Matrix) -> Vec<f64> {
        (0..self.dim())
            .map(|j| diagonal_element(&self.eigenvectors, j, a).re)
            .collect()
    }

    /// `V† A V`: the operator in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &Matrix) -> Matrix {
        self.eigenvectors.adjoint() * a * &self.eigenvectors
    }

    /// `V A V†`: back to the computational basis.
    pub fn from_eigenbasis(&self, a: &Matrix) -> Matrix {
        &self.eigenvectors * a * self.eigenvectors.adjoint()
    }

    pub fn entropy(&self) -> f64 {
        self.eigenvalues
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| -l * l.ln())
            .sum()
    }
}

fn inner(a: &Matrix, j: usize, b: &Matrix, k: usize) -> C64 {
    a.column(j)
        .iter()
        .zip(b.column(k).iter())
        .fold(c(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

/// Groups of consecutive sorted eigenvalues closer than `deg_tol`.
fn sorted_blocks(values: &[f64], deg_tol: f64) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match blocks.last_mut() {
            Some(b) if (values[*b.last().unwrap()] - v).abs() < deg_tol => b.push(i),
            _ => blocks.push(vec![i]),
        }
    }
    blocks
}

fn unsorted_blocks(values: &[f64], deg_tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut blocks: Vec<Vec<usize>> = sorted_blocks(&sorted, deg_tol)
        .into_iter()
        .map(|b| {
            let mut b: Vec<usize> = b.into_iter().map(|i| order[i]).collect();
            b.sort_unstable();
            b
        })
        .collect();
    blocks.sort();
    blocks
}

fn merge_blocks(blocks: &mut Vec<Vec<usize>>, a: usize, b: usize) {
    let ia = blocks.iter().position(|blk| blk.contains(&a));
    let ib = blocks.iter().position(|blk| blk.contains(&b));
    if let (Some(ia), Some(ib)) = (ia, ib) {
        if ia != ib {
            let moved = blocks[ib].clone();
            blocks[ia].extend(moved);
            blocks.remove(ib);
        }
    }
}

/// Rotates a degenerate eigenspace onto the basis that diagonalizes the
/// generator restricted to it, the basis that continues smoothly in time.
fn adapt_block(
    vectors: &mut Matrix,
    values: &mut [f64],
    block: &[usize],
    rho: &Matrix,
    rho_dot: &Matrix,
) -> Result<()> {
    let n = vectors.nrows();
    let m = block.len();
    let sub = Matrix::from_fn(n, m, |i, j| vectors[(i, block[j])]);
    let restricted = sub.adjoint() * rho_dot * &sub;
    let eig = hermitian_eigendecompose(&HermitianOperator::new(hermitian_part(&restricted))?)?;
    let rotated = sub * eig.eigenvectors;
    for (j, &col) in block.iter().enumerate() {
        for i in 0..n {
            vectors[(i, col)] = rotated[(i, j)];
        }
        values[col] = diagonal_element(vectors, col, rho).re;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli;

    fn bloch_rho(b: [f64; 3]) -> DensityMatrix {
        DensityMatrix::new((pauli::identity() + pauli::dot(b)) * c(0.5, 0.0)).unwrap()
    }

    #[test]
    fn blocks_group_close_values() {
        assert_eq!(sorted_blocks(&[0.5, 0.5, 0.0], 1e-8), vec![vec![0, 1], vec![2]]);
        assert_eq!(unsorted_blocks(&[0.1, 0.6, 0.1 + 1e-12, 0.2], 1e-8), vec![vec![0, 2], vec![1], vec![3]]);
    }

    #[test]
    fn degenerate_block_is_rotated_onto_generator_basis() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        // generator diagonal in the x basis
        let rho_dot = pauli::x() * c(0.1, 0.0);
        let f = SpectralFrame::new(0.0, &rho, &rho_dot, None, 1e-8).unwrap();
        assert_eq!(f.degeneracy_blocks, vec![vec![0, 1]]);
        let inb = f.to_eigenbasis(&rho_dot);
        assert!(inb[(0, 1)].norm() < 1e-15);
        assert!((f.lambda_dot[0].abs() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn continuity_keeps_labels_through_a_crossing() {
        // diagonal populations crossing at 1/2
        let rho_dot = Matrix::zeros(2, 2);
        let a = DensityMatrix::new(HermitianOperator::diagonal(&[0.45, 0.55]).unwrap().matrix().clone()).unwrap();
        let b = DensityMatrix::new(HermitianOperator::diagonal(&[0.55, 0.45]).unwrap().matrix().clone()).unwrap();
        let fa = SpectralFrame::new(0.0, &a, &rho_dot, None, 1e-8).unwrap();
        let fb = SpectralFrame::new(1.0, &b, &rho_dot, Some(&fa), 1e-8).unwrap();
        // first label follows e2 in `a`, and should stay on e2
        assert!((fa.eigenvalues[0] - 0.55).abs() < 1e-15);
        assert!((fb.eigenvalues[0] - 0.45).abs() < 1e-15);
        assert!((fb.eigenvectors[(1, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(!fb.ambiguous);
    }

    #[test]
    fn parallel_transport_phase() {
        let rho_dot = Matrix::zeros(2, 2);
        let f0 = SpectralFrame::new(0.0, &bloch_rho([0.6, 0.0, 0.0]), &rho_dot, None, 1e-8).unwrap();
        let f1 = SpectralFrame::new(0.1, &bloch_rho([0.58, 0.1, 0.05]), &rho_dot, Some(&f0), 1e-8).unwrap();
        for j in 0..2 {
            let z = inner(&f0.eigenvectors, j, &f1.eigenvectors, j);
            assert!(z.im.abs() < 1e-14 && z.re > 0.9);
        }
    }

    #[test]
    fn ambiguous_match_widens_block() {
        let rho_dot = Matrix::zeros(2, 2);
        let f0 = SpectralFrame::new(0.0, &bloch_rho([0.0, 0.0, 0.6]), &rho_dot, None, 1e-8).unwrap();
        // eigenbasis rotated by exactly 45 degrees on the sphere's x-z plane: B along x
        let f1 = SpectralFrame::new(1.0, &bloch_rho([0.6, 0.0, 0.0]), &rho_dot, Some(&f0), 1e-8).unwrap();
        assert!(f1.ambiguous);
        assert_eq!(f1.degeneracy_blocks, vec![vec![0, 1]]);
    }
}
