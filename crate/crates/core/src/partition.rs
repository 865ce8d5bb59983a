//! Strip partitions of the walker ensemble and spatially resolved profiles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::field::WaveSet;
use crate::scalar::Real;
use crate::stats::{slater_mixture_statistics, subset_statistics, walker_statistics, ClassicalStats, SubsetStatistics};
use crate::tdqmc::WalkerEnsemble;

/// Number of leading Schmidt coefficients kept in tabular outputs.
pub const SPECTRUM_COLUMNS: usize = 8;

/// Uniform strips along one electron's coordinate (`axis` 0 or 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripPartition<T> {
    pub axis: usize,
    pub edges: Vec<T>,
}

impl<T: Real> StripPartition<T> {
    #[inline]
    pub fn n_strips(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn width(&self, alpha: usize) -> T {
        self.edges[alpha + 1] - self.edges[alpha]
    }

    pub fn center(&self, alpha: usize) -> T {
        (self.edges[alpha] + self.edges[alpha + 1]) * T::lit(0.5)
    }

    pub fn centers(&self) -> Vec<T> {
        (0..self.n_strips()).map(|a| self.center(a)).collect()
    }

    /// Strip holding `x`: left-closed, right-open, the last strip closed.
    pub fn locate(&self, x: T) -> Option<usize> {
        let n = self.n_strips();
        if !(x >= self.edges[0]) || x > self.edges[n] {
            return None;
        }
        if x == self.edges[n] {
            return Some(n - 1);
        }
        Some(self.edges.partition_point(|e| *e <= x) - 1)
    }

    /// Index of the strip whose center is nearest `x = 0`.
    pub fn central_strip(&self) -> usize {
        (0..self.n_strips())
            .min_by(|&a, &b| {
                self.center(a)
                    .abs()
                    .partial_cmp(&self.center(b).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(0)
    }
}

fn check_axis(axis: usize) -> Result<()> {
    if axis > 1 {
        return Err(Error::param("axis", format!("electron index must be 0 or 1, got {axis}")));
    }
    Ok(())
}

pub fn make_strips<T: Real>(x_lo: T, x_hi: T, n_strips: usize, axis: usize) -> Result<StripPartition<T>> {
    check_axis(axis)?;
    if n_strips == 0 {
        return Err(Error::param("n_strips", "need at least one strip"));
    }
    if !(x_lo < x_hi) || !x_lo.is_finite() || !x_hi.is_finite() {
        return Err(Error::param("strips", format!("invalid range [{x_lo}, {x_hi}]")));
    }
    let w = (x_hi - x_lo) / T::from_usize_lossy(n_strips);
    let mut edges: Vec<T> = (0..n_strips).map(|i| x_lo + w * T::from_usize_lossy(i)).collect();
    edges.push(x_hi);
    Ok(StripPartition { axis, edges })
}

/// Strips centered on `x = 0` spanning `fraction` of the walker cloud's
/// extent along `axis`.
pub fn centered_strips<T: Real>(
    walkers: &WalkerEnsemble<T>,
    n_strips: usize,
    fraction: T,
    axis: usize,
) -> Result<StripPartition<T>> {
    check_axis(axis)?;
    if !(fraction > T::zero()) || fraction > T::one() {
        return Err(Error::param("strip_fraction", format!("must lie in (0, 1], got {fraction}")));
    }
    let xs = walkers.coordinate(axis);
    let lo = xs.iter().copied().fold(T::infinity(), T::min);
    let hi = xs.iter().copied().fold(T::neg_infinity(), T::max);
    let half = (hi - lo) * fraction * T::lit(0.5);
    if !(half > T::zero()) {
        return Err(Error::DegenerateInput {
            op: "centered_strips",
            detail: "walker cloud has zero extent".into(),
        });
    }
    make_strips(-half, half, n_strips, axis)
}

/// Strip index of every walker, `None` when it falls outside all strips.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DomainAssignment {
    pub membership: Vec<Option<usize>>,
    pub n_strips: usize,
}

impl DomainAssignment {
    pub fn members(&self, alpha: usize) -> Vec<usize> {
        self.membership
            .iter()
            .enumerate()
            .filter_map(|(k, m)| (*m == Some(alpha)).then_some(k))
            .collect()
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.n_strips];
        self.membership.iter().flatten().for_each(|&a| c[a] += 1);
        c
    }

    pub fn out_of_range(&self) -> usize {
        self.membership.iter().filter(|m| m.is_none()).count()
    }
}

pub fn assign_walkers<T: Real>(p: &StripPartition<T>, walkers: &WalkerEnsemble<T>) -> DomainAssignment {
    DomainAssignment {
        membership: walkers.positions.iter().map(|w| p.locate(w[p.axis])).collect(),
        n_strips: p.n_strips(),
    }
}

/// Statistics of one populated domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainStats<T> {
    pub count: usize,
    pub variance: T,
    pub sigma: T,
    pub entropy: T,
    pub linear_entropy: T,
    pub k_eff: T,
    pub spectrum: Vec<T>,
    pub classical: ClassicalStats<T>,
}

impl<T: Real> DomainStats<T> {
    fn new(s: SubsetStatistics<T>, classical: ClassicalStats<T>) -> Self {
        Self {
            count: s.count,
            variance: s.variance,
            sigma: s.sigma,
            entropy: s.entropy,
            linear_entropy: s.linear_entropy,
            k_eff: s.k_eff,
            spectrum: s.spectrum.lambdas().to_vec(),
            classical,
        }
    }

    /// Leading `m` Schmidt coefficients, zero-padded.
    pub fn top(&self, m: usize) -> Vec<T> {
        let mut v: Vec<T> = self.spectrum.iter().copied().take(m).collect();
        v.resize(m, T::zero());
        v
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StripRow<T> {
    pub alpha: usize,
    pub x_center: T,
    pub count: usize,
    /// `None` for an empty strip.
    pub stats: Option<DomainStats<T>>,
}

/// Per-strip statistics plus the global row over every walker.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntanglementProfile<T> {
    pub axis: usize,
    pub edges: Vec<T>,
    pub rows: Vec<StripRow<T>>,
    pub global: DomainStats<T>,
    pub out_of_range: usize,
}

impl<T: Real> EntanglementProfile<T> {
    /// Entropy of every strip, `None` where undefined.
    pub fn entropies(&self) -> Vec<Option<T>> {
        self.rows.iter().map(|r| r.stats.as_ref().map(|s| s.entropy)).collect()
    }

    pub fn sigmas(&self) -> Vec<Option<T>> {
        self.rows.iter().map(|r| r.stats.as_ref().map(|s| s.sigma)).collect()
    }

    pub fn centers(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.x_center).collect()
    }

    /// Copy with `shift` subtracted from every entropy, global row included.
    ///
    /// Used for the `ln 2` correction; results are left unclamped.
    pub fn shifted_entropy(&self, shift: T) -> Self {
        let mut out = self.clone();
        out.rows.iter_mut().filter_map(|r| r.stats.as_mut()).for_each(|s| s.entropy -= shift);
        out.global.entropy -= shift;
        out
    }
}

fn profile_with<T, F>(p: &StripPartition<T>, a: &DomainAssignment, walkers: &WalkerEnsemble<T>, stats: F) -> Result<EntanglementProfile<T>>
where
    T: Real,
    F: Fn(&[usize]) -> Result<SubsetStatistics<T>> + Sync,
{
    if a.membership.len() != walkers.len() || a.n_strips != p.n_strips() {
        return Err(Error::Partition(format!(
            "assignment covers {} walkers in {} strips; expected {} walkers in {}",
            a.membership.len(),
            a.n_strips,
            walkers.len(),
            p.n_strips()
        )));
    }
    let domain = |subset: &[usize]| -> Result<DomainStats<T>> {
        let pts: Vec<[T; 2]> = subset.iter().map(|&k| walkers.positions[k]).collect();
        Ok(DomainStats::new(stats(subset)?, walker_statistics(&pts)?))
    };
    let rows = (0..p.n_strips())
        .into_par_iter()
        .map(|alpha| {
            let members = a.members(alpha);
            let stats = if members.is_empty() { None } else { Some(domain(&members)?) };
            Ok(StripRow {
                alpha,
                x_center: p.center(alpha),
                count: members.len(),
                stats,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<usize> = (0..walkers.len()).collect();
    Ok(EntanglementProfile {
        axis: p.axis,
        edges: p.edges.clone(),
        rows,
        global: domain(&all)?,
        out_of_range: a.out_of_range(),
    })
}

/// Profile of the marginal waves `waves` (one per walker) over the strips.
pub fn local_profile<T: Real>(
    p: &StripPartition<T>,
    a: &DomainAssignment,
    waves: &WaveSet<T>,
    walkers: &WalkerEnsemble<T>,
) -> Result<EntanglementProfile<T>> {
    if waves.len() != walkers.len() {
        return Err(Error::Partition(format!("{} waves for {} walkers", waves.len(), walkers.len())));
    }
    profile_with(p, a, walkers, |s| subset_statistics(waves, s))
}

/// Identical-fermion profile from the per-walker Slater pairs `(φ₁ᵏ, φ₂ᵏ)`.
pub fn slater_profile<T: Real>(
    p: &StripPartition<T>,
    a: &DomainAssignment,
    first: &WaveSet<T>,
    second: &WaveSet<T>,
    walkers: &WalkerEnsemble<T>,
) -> Result<EntanglementProfile<T>> {
    if first.len() != walkers.len() || second.len() != walkers.len() {
        return Err(Error::Partition("orbital stacks and walkers differ in size".into()));
    }
    profile_with(p, a, walkers, |s| slater_mixture_statistics(first, second, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_edges() {
        let p = make_strips(-5.5f64, 5.5, 11, 0).unwrap();
        for (a, c) in p.centers().iter().enumerate() {
            assert!((c - (a as f64 - 5.0)).abs() < 1e-12);
            assert!((p.width(a) - 1.0).abs() < 1e-12);
        }
        assert_eq!(p.central_strip(), 5);
        let q = make_strips(0.0f64, 1.0, 4, 1).unwrap();
        assert_eq!(q.edges, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(make_strips(0.0f64, 1.0, 1, 0).unwrap().n_strips(), 1);
        assert!(make_strips(1.0f64, 0.0, 3, 0).is_err());
        assert!(make_strips(0.0f64, 1.0, 0, 0).is_err());
        assert!(make_strips(0.0f64, 1.0, 2, 2).is_err());
    }

    #[test]
    fn boundary_convention() {
        let p = make_strips(0.0f64, 1.0, 4, 0).unwrap();
        assert_eq!(p.locate(0.25), Some(1));
        assert_eq!(p.locate(0.0), Some(0));
        assert_eq!(p.locate(1.0), Some(3));
        assert_eq!(p.locate(1.0 + 1e-12), None);
        assert_eq!(p.locate(-1e-12), None);
        let w = WalkerEnsemble::new(vec![[0.5, 9.0], [0.1, -3.0], [2.0, 0.6]]).unwrap();
        let a = assign_walkers(&p, &w);
        assert_eq!(a.membership, vec![Some(2), Some(0), None]);
        assert_eq!(a.counts().iter().sum::<usize>() + a.out_of_range(), 3);
    }
}
