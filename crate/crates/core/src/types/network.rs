use serde::Serialize;

use crate::error::{Error, Result, ValidationError, Violation};

/// Dense row-major square matrix. Entry `(n, m)` is the weight of `m` on `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightMatrix {
    n: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Dimension {
                    what: "weight matrix row",
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.n + col] = value;
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.n..(row + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n.max(1)).take(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|w| w * factor).collect(),
        }
    }
}

/// Directed base contagion weights `alpha` plus the group partition.
#[derive(Debug, Clone, PartialEq)]
pub struct ContagionNetwork {
    base: WeightMatrix,
    group_of: Vec<usize>,
    n_groups: usize,
}

impl ContagionNetwork {
    pub fn new(base: WeightMatrix, group_of: Vec<usize>) -> Result<Self, ValidationError> {
        let mut violations = Vec::new();
        collect_violations(&base, &group_of, &mut violations);
        ValidationError::check(violations)?;
        let n_groups = group_of.iter().max().map_or(0, |g| g + 1);
        Ok(Self {
            base,
            group_of,
            n_groups,
        })
    }

    /// Weight `weight` between every ordered pair of distinct agents sharing a
    /// group, zero across groups.
    pub fn full_within_groups(group_of: Vec<usize>, weight: f64) -> Result<Self, ValidationError> {
        let base = full_within_groups_matrix(&group_of, weight);
        Self::new(base, group_of)
    }

    pub fn n_agents(&self) -> usize {
        self.group_of.len()
    }

    pub fn n_groups(&self) -> usize {
        self.n_groups
    }

    pub fn base_weights(&self) -> &WeightMatrix {
        &self.base
    }

    pub fn group_of(&self) -> &[usize] {
        &self.group_of
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_groups];
        for &g in &self.group_of {
            sizes[g] += 1;
        }
        sizes
    }

    pub fn members(&self, group: usize) -> Vec<usize> {
        self.group_of
            .iter()
            .enumerate()
            .filter_map(|(n, &g)| (g == group).then_some(n))
            .collect()
    }

    /// `Some(w)` when the base weights are exactly the full-within-groups
    /// pattern with weight `w`.
    pub fn uniform_within_group_weight(&self) -> Option<f64> {
        let n = self.n_agents();
        let mut weight = None;
        for i in 0..n {
            for j in 0..n {
                if i != j && self.group_of[i] == self.group_of[j] {
                    let w = self.base.get(i, j);
                    match weight {
                        None => weight = Some(w),
                        Some(prev) if prev != w => return None,
                        _ => {}
                    }
                }
            }
        }
        let w = weight.unwrap_or(0.0);
        (full_within_groups_matrix(&self.group_of, w) == self.base).then_some(w)
    }
}

pub(crate) fn full_within_groups_matrix(group_of: &[usize], weight: f64) -> WeightMatrix {
    let n = group_of.len();
    let mut base = WeightMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && group_of[i] == group_of[j] {
                base.set(i, j, weight);
            }
        }
    }
    base
}

pub(crate) fn collect_violations(
    base: &WeightMatrix,
    group_of: &[usize],
    out: &mut Vec<Violation>,
) {
    let n = group_of.len();
    if base.dim() != n {
        out.push(Violation::new(
            "network.weights",
            format!("matrix is {0}x{0} but there are {n} agents", base.dim()),
        ));
    }
    for i in 0..base.dim() {
        if base.get(i, i) != 0.0 {
            out.push(Violation::new(
                format!("network.weights[{i}][{i}]"),
                format!(
                    "diagonal must be 0 (no self-contagion), found {}",
                    base.get(i, i)
                ),
            ));
        }
        for j in 0..base.dim() {
            let w = base.get(i, j);
            if !(w.is_finite() && w >= 0.0) {
                out.push(Violation::new(
                    format!("network.weights[{i}][{j}]"),
                    format!("{w} must be a finite weight >= 0"),
                ));
            }
        }
    }
    let n_groups = group_of.iter().max().map_or(0, |g| g + 1);
    let mut seen = vec![false; n_groups];
    for &g in group_of {
        seen[g] = true;
    }
    for (g, present) in seen.iter().enumerate() {
        if !present {
            out.push(Violation::new(
                "agents.groups",
                format!("group {g} has no members; group indices must be dense 0..{n_groups}"),
            ));
        }
    }
}
