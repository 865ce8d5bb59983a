//! Population moments of walker clouds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Mean, covariance, and total variance of a point cloud with `1/M` weighting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalStats<T> {
    pub mean: Vec<T>,
    pub covariance: Vec<Vec<T>>,
    pub variance: T,
    pub std: T,
}

/// Law-of-total-variance split of a partitioned cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceDecomposition<T> {
    pub global_var: T,
    pub mean_of_local_vars: T,
    pub var_of_local_means: T,
}

pub fn walker_statistics<T: Real, P: AsRef<[T]>>(points: &[P]) -> Result<ClassicalStats<T>> {
    let first = points.first().ok_or(Error::EmptyDomain { op: "walker_statistics" })?;
    let d = first.as_ref().len();
    let inv = T::from_usize_lossy(points.len()).recip();
    let mut mean = vec![T::zero(); d];
    for p in points {
        let p = p.as_ref();
        if p.len() != d {
            return Err(Error::Dimension {
                op: "walker_statistics",
                detail: format!("mixed point dimensions {d} and {}", p.len()),
            });
        }
        mean.iter_mut().zip(p).for_each(|(m, v)| *m += *v);
    }
    mean.iter_mut().for_each(|m| *m *= inv);
    let mut covariance = vec![vec![T::zero(); d]; d];
    for p in points {
        let p = p.as_ref();
        for a in 0..d {
            let da = p[a] - mean[a];
            for b in a..d {
                covariance[a][b] += da * (p[b] - mean[b]);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            covariance[a][b] *= inv;
            covariance[b][a] = covariance[a][b];
        }
    }
    let variance: T = (0..d).map(|a| covariance[a][a]).sum();
    Ok(ClassicalStats {
        mean,
        covariance,
        variance,
        std: variance.sqrt(),
    })
}

/// Splits the total variance over domains weighted by `M_α / M`.
///
/// `labels[k]` is the domain of point `k`; every point must be assigned.
pub fn variance_decomposition<T: Real, P: AsRef<[T]>>(
    points: &[P],
    labels: &[Option<usize>],
) -> Result<VarianceDecomposition<T>> {
    if points.len() != labels.len() {
        return Err(Error::Dimension {
            op: "variance_decomposition",
            detail: format!("{} points but {} labels", points.len(), labels.len()),
        });
    }
    let global = walker_statistics(points)?;
    let mut domains: Vec<Vec<usize>> = Vec::new();
    for (k, l) in labels.iter().enumerate() {
        let a = l.ok_or_else(|| Error::Partition(format!("point {k} is not assigned to any domain")))?;
        if domains.len() <= a {
            domains.resize_with(a + 1, Vec::new);
        }
        domains[a].push(k);
    }
    let inv_m = T::from_usize_lossy(points.len()).recip();
    let mut within = T::zero();
    let mut between = T::zero();
    for members in domains.iter().filter(|d| !d.is_empty()) {
        let local: Vec<&[T]> = members.iter().map(|&k| points[k].as_ref()).collect();
        let s = walker_statistics(&local)?;
        let w = T::from_usize_lossy(members.len()) * inv_m;
        within += w * s.variance;
        let shift: T = s
            .mean
            .iter()
            .zip(&global.mean)
            .map(|(a, b)| (*a - *b) * (*a - *b))
            .sum();
        between += w * shift;
    }
    Ok(VarianceDecomposition {
        global_var: global.variance,
        mean_of_local_vars: within,
        var_of_local_means: between,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_pair() {
        let s = walker_statistics(&[[-1.0], [1.0]]).unwrap();
        assert_eq!(s.mean, vec![0.0]);
        assert_eq!(s.variance, 1.0);
    }

    #[test]
    fn single_point_and_empty() {
        let s = walker_statistics(&[[3.0, 4.0]]).unwrap();
        assert_eq!(s.variance, 0.0);
        let none: [[f64; 2]; 0] = [];
        assert!(matches!(walker_statistics(&none), Err(Error::EmptyDomain { .. })));
    }

    #[test]
    fn unassigned_point_rejected() {
        let pts = [[0.0], [1.0]];
        assert!(matches!(
            variance_decomposition(&pts, &[Some(0), None]),
            Err(Error::Partition(_))
        ));
    }

    #[test]
    fn trivial_partitions() {
        let pts = [[0.0f64, 1.0], [2.0, -1.0], [0.5, 0.5], [3.0, 3.0]];
        let one = variance_decomposition(&pts, &[Some(0); 4]).unwrap();
        assert!(one.var_of_local_means.abs() < 1e-15);
        let each = variance_decomposition(&pts, &[Some(0), Some(1), Some(2), Some(3)]).unwrap();
        assert!(each.mean_of_local_vars.abs() < 1e-15);
        assert!((each.var_of_local_means - each.global_var).abs() < 1e-12);
    }
}
