use crate::dispersion::Waveguide;
use crate::error::{Error, Result};
use crate::exec::Exec;

use super::phase_time_analytic;

/// |τ| below this many seconds counts as nonnegative.
pub const SIGN_THRESHOLD_S: f64 = 1e-15;

/// τ sampled on a node lattice over (well width, frequency).
///
/// Values are stored row-major: row `i` is well width `a_axis[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub a_axis: Vec<f64>,
    pub f_axis: Vec<f64>,
    pub tau: Vec<f64>,
}

impl RegionMap {
    pub fn tau_at(&self, ia: usize, jf: usize) -> f64 {
        self.tau[ia * self.f_axis.len() + jf]
    }

    pub fn is_negative(&self, ia: usize, jf: usize) -> bool {
        self.tau_at(ia, jf) < -SIGN_THRESHOLD_S
    }

    /// τ values of the column at well width `a_axis[ia]`.
    pub fn column(&self, ia: usize) -> &[f64] {
        let nf = self.f_axis.len();
        &self.tau[ia * nf..(ia + 1) * nf]
    }

    pub fn column_has_negative(&self, ia: usize) -> bool {
        self.column(ia).iter().any(|&t| t < -SIGN_THRESHOLD_S)
    }

    /// Highest frequency with negative τ in the column.
    pub fn column_negative_upper_edge(&self, ia: usize) -> Option<f64> {
        self.column(ia)
            .iter()
            .rposition(|&t| t < -SIGN_THRESHOLD_S)
            .map(|j| self.f_axis[j])
    }

    /// Index of the lattice width closest to `a`.
    pub fn nearest_a(&self, a: f64) -> usize {
        self.a_axis
            .iter()
            .enumerate()
            .min_by(|(_, x), (_, y)| (*x - a).abs().total_cmp(&(*y - a).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    pub fn negative_count(&self) -> usize {
        self.tau.iter().filter(|&&t| t < -SIGN_THRESHOLD_S).count()
    }

    /// Negative τ values over the whole lattice.
    pub fn negative_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.tau.iter().copied().filter(|&t| t < -SIGN_THRESHOLD_S)
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let nf = self.f_axis.len();
        self.tau
            .iter()
            .enumerate()
            .map(move |(idx, &t)| (self.a_axis[idx / nf], self.f_axis[idx % nf], t))
    }
}

fn lattice(range: (f64, f64), nodes: usize, name: &'static str) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if nodes < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::EmptyRange(name));
    }
    let last = nodes - 1;
    Ok((0..nodes)
        .map(|i| {
            if i == last {
                hi
            } else {
                lo + (hi - lo) * (i as f64 / last as f64)
            }
        })
        .collect())
}

/// Fills an `(a, f)` node lattice with the closed-form phase time.
///
/// `resolution` is the node count along (a, f). Node coordinates depend only
/// on `i / (nodes - 1)`, so a lattice with `2n - 1` nodes contains the
/// `n`-node lattice exactly.
pub fn region_map(
    model: &Waveguide,
    a_range: (f64, f64),
    f_range: (f64, f64),
    resolution: (usize, usize),
    exec: Exec,
) -> Result<RegionMap> {
    let a_axis = lattice(a_range, resolution.0, "well width")?;
    let f_axis = lattice(f_range, resolution.1, "frequency")?;
    if a_axis[0] < 0.0 {
        return Err(Error::EmptyRange("well width"));
    }
    let f0 = model.cutoffs().f0();
    if !(f_axis[0] > f0) {
        return Err(Error::Evanescent {
            omega: 2.0 * std::f64::consts::PI * f_axis[0],
            cutoff: model.cutoffs().omega0,
        });
    }
    let nf = f_axis.len();
    let tau = exec.try_map(a_axis.len() * nf, |idx| {
        phase_time_analytic(model, f_axis[idx % nf], a_axis[idx / nf])
    })?;
    Ok(RegionMap {
        a_axis,
        f_axis,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{GuideGeometry, Medium};

    fn teflon() -> Waveguide {
        Waveguide::new(GuideGeometry::xband(0.0).unwrap(), Medium::teflon())
    }

    #[test]
    fn cells_equal_pointwise_phase_time() {
        let m = region_map(
            &teflon(),
            (0.0, 0.09),
            (6.56e9, 6.9e9),
            (31, 17),
            Exec::default(),
        )
        .unwrap();
        for (i, j) in [(0, 0), (5, 3), (30, 16), (17, 9)] {
            let expect = phase_time_analytic(&teflon(), m.f_axis[j], m.a_axis[i]).unwrap();
            assert_eq!(m.tau_at(i, j), expect);
        }
        assert!(m.column(0).iter().all(|&t| t == 0.0));
        assert!(!m.column_has_negative(0));
    }

    #[test]
    fn empty_ranges_are_rejected() {
        let w = teflon();
        assert!(matches!(
            region_map(&w, (0.01, 0.01), (6.6e9, 6.9e9), (10, 10), Exec::Sequential),
            Err(Error::EmptyRange(_))
        ));
        assert!(region_map(&w, (0.0, 0.01), (6.9e9, 6.6e9), (10, 10), Exec::Sequential).is_err());
        assert!(region_map(&w, (0.0, 0.01), (6.6e9, 6.9e9), (1, 10), Exec::Sequential).is_err());
        assert!(region_map(&w, (0.0, 0.01), (6.0e9, 6.9e9), (4, 4), Exec::Sequential).is_err());
    }

    #[test]
    fn doubling_resolution_keeps_classification() {
        let w = teflon();
        let coarse =
            region_map(&w, (0.0, 0.09), (6.56e9, 6.9e9), (46, 35), Exec::default()).unwrap();
        let fine = region_map(&w, (0.0, 0.09), (6.56e9, 6.9e9), (91, 69), Exec::default()).unwrap();
        for i in 0..coarse.a_axis.len() {
            assert_eq!(coarse.a_axis[i], fine.a_axis[2 * i]);
            for j in 0..coarse.f_axis.len() {
                assert_eq!(coarse.f_axis[j], fine.f_axis[2 * j]);
                assert_eq!(coarse.is_negative(i, j), fine.is_negative(2 * i, 2 * j));
            }
        }
    }
}
