use rayon::prelude::*;

use super::voxel::{pair_iou, VoxelGrid};
use super::DiversityError;

/// Symmetric pairwise similarity with unit diagonal, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self, DiversityError> {
        if values.len() != n * n {
            return Err(DiversityError::InvalidMatrix(format!(
                "{} values for a {n}x{n} matrix",
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 1.0 {
                return Err(DiversityError::InvalidMatrix(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(DiversityError::InvalidMatrix(format!("entry ({i},{j}) = {v} outside [0,1]")));
                }
                if v != values[j * n + i] {
                    return Err(DiversityError::InvalidMatrix(format!("entry ({i},{j}) is not symmetric")));
                }
            }
        }
        Ok(Self { n, values })
    }

    /// Builds a matrix from the strict upper triangle, row by row.
    pub fn from_upper(n: usize, upper: impl Fn(usize, usize) -> f64) -> Result<Self, DiversityError> {
        let mut values = vec![1.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = upper(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self::new(n, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Mean similarity of `i` to every other index.
    pub fn row_mean_off_diagonal(&self, i: usize) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let s: f64 = self.row(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).sum();
        s / (self.n - 1) as f64
    }

    /// Mean similarity over all unordered pairs of `subset`.
    pub fn mean_pairwise(&self, subset: &[usize]) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (a, &i) in subset.iter().enumerate() {
            for &j in &subset[a + 1..] {
                sum += self.get(i, j);
                count += 1;
            }
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}

/// Pairwise voxel IoU over bimanual grid pairs. Rows are filled in
/// parallel; the result does not depend on scheduling.
pub fn similarity_matrix(grids: &[(VoxelGrid, VoxelGrid)], eps: f64) -> Result<SimilarityMatrix, DiversityError> {
    let n = grids.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| pair_iou((&grids[i].0, &grids[i].1), (&grids[j].0, &grids[j].1), eps))
                .collect::<Result<Vec<f64>, _>>()
        })
        .collect::<Result<_, _>>()?;
    SimilarityMatrix::from_upper(n, |i, j| rows[i][j - i - 1])
}

/// Greedy max-diversity selection. The first pick minimises the mean
/// similarity to all others; each later pick minimises the mean similarity
/// to the picks so far. Ties go to the lowest index.
pub fn greedy_diverse_select(s: &SimilarityMatrix, k: usize) -> Result<Vec<usize>, DiversityError> {
    let n = s.n();
    if k == 0 || k > n {
        return Err(DiversityError::KOutOfRange { k, n });
    }
    let mut first = 0;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let m = s.row_mean_off_diagonal(i);
        if m < best {
            best = m;
            first = i;
        }
    }
    let mut selected = vec![first];
    let mut taken = vec![false; n];
    taken[first] = true;
    // running sums of similarity to the selected set
    let mut sums: Vec<f64> = s.row(first).to_vec();
    while selected.len() < k {
        let mut pick = None;
        let mut best = f64::INFINITY;
        for i in (0..n).filter(|&i| !taken[i]) {
            let m = sums[i] / selected.len() as f64;
            if m < best {
                best = m;
                pick = Some(i);
            }
        }
        let pick = pick.expect("k <= n leaves an unselected index");
        taken[pick] = true;
        selected.push(pick);
        for (acc, v) in sums.iter_mut().zip(s.row(pick)) {
            *acc += v;
        }
    }
    Ok(selected)
}
