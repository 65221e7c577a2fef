//! Eigenvalue bookkeeping for the cross-section `N`.
//!
//! The circle is exact: eigenvalues `0, 1, 1, 4, 4, …, k², k²` for the basis
//! `φ_0 = 1/√(2π)`, `φ_{2k-1} = sin(kθ)/√π`, `φ_{2k} = cos(kθ)/√π`. Spheres
//! and Zoll surfaces enter only through the abstract cluster model with the
//! m-th cluster at `b_m = m² + (n-1) m`.

use crate::{Error, Result};

/// Tag for the cross-section the eigenvalues belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossSection {
    Circle,
    /// Abstract cluster model in dimension `n`: one eigenvalue per cluster.
    ClusterModel(u32),
}

/// Ordered eigenvalues of the cross-section with their cluster structure.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    eigenvalues: Vec<f64>,
    cluster_index: Vec<usize>,
    cross_section: CrossSection,
}

/// `b_m = m² + (n-1) m`, the location of the m-th eigenvalue cluster of the
/// round n-sphere.
pub fn cluster_value(n: u32, m: u64) -> f64 {
    let m = m as f64;
    m * m + (n as f64 - 1.0) * m
}

impl SpectralBasis {
    /// Circle basis truncated at wave number `k_max >= 1`:
    /// eigenvalues `[0, 1, 1, 4, 4, …, k_max², k_max²]`.
    pub fn circle(k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::DegenerateBasis);
        }
        let mut eigenvalues = Vec::with_capacity(2 * k_max + 1);
        let mut cluster_index = Vec::with_capacity(2 * k_max + 1);
        eigenvalues.push(0.0);
        cluster_index.push(0);
        for k in 1..=k_max {
            let lam = (k * k) as f64;
            eigenvalues.push(lam); // sin(kθ)
            eigenvalues.push(lam); // cos(kθ)
            cluster_index.push(k);
            cluster_index.push(k);
        }
        let basis = Self {
            eigenvalues,
            cluster_index,
            cross_section: CrossSection::Circle,
        };
        basis.assert_invariants();
        Ok(basis)
    }

    /// Degenerate constants-only basis, allowed only through this explicit
    /// constructor (testing hook).
    pub fn circle_constants_only() -> Self {
        Self {
            eigenvalues: vec![0.0],
            cluster_index: vec![0],
            cross_section: CrossSection::Circle,
        }
    }

    /// Abstract cluster model: eigenvalues `b_0, …, b_{m_max}` once each.
    pub fn cluster_model(n: u32, m_max: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("cluster model needs n >= 1".into()));
        }
        let eigenvalues: Vec<f64> = (0..=m_max as u64).map(|m| cluster_value(n, m)).collect();
        let cluster_index = (0..=m_max).collect();
        let basis = Self {
            eigenvalues,
            cluster_index,
            cross_section: CrossSection::ClusterModel(n),
        };
        basis.assert_invariants();
        Ok(basis)
    }

    fn assert_invariants(&self) {
        debug_assert_eq!(self.eigenvalues[0], 0.0);
        debug_assert!(self
            .eigenvalues
            .windows(2)
            .all(|w| w[0] <= w[1] && w[0] >= 0.0));
    }

    pub fn cross_section(&self) -> CrossSection {
        self.cross_section
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalue(&self, j: usize) -> f64 {
        self.eigenvalues[j]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn cluster_of(&self, j: usize) -> usize {
        self.cluster_index[j]
    }

    /// Largest wave number for a circle basis.
    pub fn k_max(&self) -> usize {
        *self.cluster_index.last().unwrap()
    }

    /// Basis index of `cos(kθ)` (circle).
    pub fn index_cos(k: usize) -> usize {
        if k == 0 {
            0
        } else {
            2 * k
        }
    }

    /// Basis index of `sin(kθ)` for `k >= 1` (circle).
    pub fn index_sin(k: usize) -> usize {
        2 * k - 1
    }

    /// First basis index of cluster `m` (λ jumps right before it).
    pub fn cluster_start(&self, m: usize) -> usize {
        self.cluster_index
            .iter()
            .position(|&c| c == m)
            .unwrap_or(self.len())
    }

    /// Human label for a circle mode index.
    pub fn mode_label(&self, j: usize) -> String {
        match self.cross_section {
            CrossSection::Circle => {
                if j == 0 {
                    "const".to_string()
                } else if j % 2 == 1 {
                    format!("sin{}", j.div_ceil(2))
                } else {
                    format!("cos{}", j / 2)
                }
            }
            CrossSection::ClusterModel(_) => format!("cluster{j}"),
        }
    }

    /// Smallest `m >= 1` with `λ_m - λ_{m-1} > kappa`. The returned index is
    /// always the first eigenvalue of a cluster.
    pub fn find_gap_index(&self, kappa: f64) -> Result<usize> {
        for m in 1..self.len() {
            if self.eigenvalues[m] - self.eigenvalues[m - 1] > kappa {
                return Ok(m);
            }
        }
        Err(Error::GapNotFound {
            truncation: self.len(),
            kappa,
        })
    }
}

/// Select the smallest cluster index `m` such that
/// `ᾱ = 2 (b_{m-1} + 1)^{1/2} + 1` satisfies both
/// `ᾱ >= max(alpha, kappa)` and `ᾱ² + ᾱ <= 4 b_m - kappa`.
///
/// Returns `(m, ᾱ)`. Quadratic growth of `b_m` guarantees termination; the
/// search is still capped at `m <= 10^6` with a hard error.
pub fn choose_alpha_bar(n: u32, alpha: f64, kappa: f64) -> Result<(usize, f64)> {
    const CAP: usize = 1_000_000;
    let floor = alpha.max(kappa);
    for m in 1..=CAP {
        let ab = 2.0 * (cluster_value(n, m as u64 - 1) + 1.0).sqrt() + 1.0;
        if ab >= floor && ab * ab + ab <= 4.0 * cluster_value(n, m as u64) - kappa {
            return Ok((m, ab));
        }
    }
    Err(Error::AlphaBarSearchCap { cap: CAP })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn circle_basis_eigenvalues() {
        let b = SpectralBasis::circle(2).unwrap();
        assert_eq!(b.eigenvalues(), &[0.0, 1.0, 1.0, 4.0, 4.0]);
        assert_eq!(b.cluster_of(3), 2);

        let b1 = SpectralBasis::circle(1).unwrap();
        assert_eq!(b1.eigenvalues(), &[0.0, 1.0, 1.0]);

        let b4 = SpectralBasis::circle(4).unwrap();
        assert_eq!(b4.len(), 9);
        assert_eq!(b4.eigenvalue(8), 16.0);

        assert!(matches!(SpectralBasis::circle(0), Err(Error::DegenerateBasis)));
        assert_eq!(SpectralBasis::circle_constants_only().len(), 1);
    }

    #[test]
    fn circle_cluster_boundary_gaps_are_2k_minus_1() {
        let k_max = 7;
        let b = SpectralBasis::circle(k_max).unwrap();
        for k in 1..=k_max {
            let m = b.cluster_start(k);
            assert_eq!(m, 2 * k - 1);
            assert_relative_eq!(
                b.eigenvalue(m) - b.eigenvalue(m - 1),
                (2 * k - 1) as f64,
                epsilon = 0.0
            );
        }
    }

    #[test]
    fn cluster_values() {
        assert_eq!(cluster_value(1, 3), 9.0);
        assert_eq!(cluster_value(5, 0), 0.0);
        assert_eq!(cluster_value(2, 3), 12.0);
    }

    #[test]
    fn gap_search() {
        let b = SpectralBasis::circle(5).unwrap();
        assert_eq!(b.find_gap_index(5.0).unwrap(), 7);

        let b2 = SpectralBasis::circle(2).unwrap();
        assert_eq!(b2.find_gap_index(0.5).unwrap(), 1);
        assert!(matches!(
            b2.find_gap_index(10.0),
            Err(Error::GapNotFound { truncation: 5, .. })
        ));
    }

    #[test]
    fn alpha_bar_reference_case() {
        let (m, ab) = choose_alpha_bar(1, 0.0, 1.0).unwrap();
        assert_eq!(m, 4);
        assert_relative_eq!(ab, 2.0 * 10.0_f64.sqrt() + 1.0, epsilon = 1e-14);
        // Re-evaluate both selection inequalities independently.
        assert!(ab >= 1.0);
        assert!(2.0 * (cluster_value(1, 3) + 1.0).sqrt() + 1.0 <= ab + 1e-14);
        assert!(ab * ab + ab <= 4.0 * cluster_value(1, 4) - 1.0);
    }

    /// Brute-force enumeration oracle for the ᾱ selection.
    fn alpha_bar_oracle(n: u32, alpha: f64, kappa: f64) -> (usize, f64) {
        for m in 1..100_000u64 {
            let ab = 2.0 * (cluster_value(n, m - 1) + 1.0).sqrt() + 1.0;
            if ab >= alpha.max(kappa) && ab * ab + ab <= 4.0 * cluster_value(n, m) - kappa {
                return (m as usize, ab);
            }
        }
        unreachable!()
    }

    #[test]
    fn alpha_bar_matches_enumeration_oracle() {
        for &(n, alpha, kappa) in &[
            (1u32, 20.0, 1.0),
            (2, 0.0, 1.0),
            (1, 0.0, 7.5),
            (3, 11.0, 2.0),
            (2, 55.0, 1.0),
        ] {
            let got = choose_alpha_bar(n, alpha, kappa).unwrap();
            let want = alpha_bar_oracle(n, alpha, kappa);
            assert_eq!(got.0, want.0, "cluster index for n={n} alpha={alpha} kappa={kappa}");
            assert_relative_eq!(got.1, want.1, epsilon = 1e-13);
        }
    }

    #[test]
    fn alpha_bar_is_deterministic() {
        let a = choose_alpha_bar(1, 3.0, 1.0).unwrap();
        let b = choose_alpha_bar(1, 3.0 + 0.0, 1.0).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }

    #[test]
    fn cluster_model_basis() {
        let b = SpectralBasis::cluster_model(2, 4).unwrap();
        assert_eq!(b.eigenvalues(), &[0.0, 2.0, 6.0, 12.0, 20.0]);
        assert_eq!(b.cluster_start(3), 3);
    }
}
