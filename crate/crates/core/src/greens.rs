//! Infinite-chain resolvent route to the defect levels: closed-form lattice
//! Green's function, impurity T-matrix factors, and bound-state energies by
//! root bracketing. Everything here is independent of diagonalization, which
//! makes it a cross-check for the `spectrum` module and the fast path for
//! region maps over the defect-strength plane.
//!
//! Conventions. Energies z live outside the band [h - 2J, h + 2J]. With the
//! dimensionless coordinate x = (z - h) / (2J), the free resolvent between
//! sites r and s is
//!
//! ```text
//! G0(r, s; z) = sign(x) * rho^|r - s| / (2J sqrt(x^2 - 1)),
//! rho = -x + sign(x) * sqrt(x^2 - 1),  |rho| < 1,
//! ```
//!
//! which reproduces the finite-ring spectral sum as N grows. A defect of
//! strength epsilon >= 0 enters as the signed potential v = -epsilon (it
//! lowers the on-site energy), so the single-impurity T-matrix factor
//! t = v / (1 - v G0) has its pole at the bound state z* = h - sqrt(4J^2 +
//! epsilon^2).
//!
//! For the symmetric triple the bound-state condition factorizes into the
//! inter-impurity function [`f_lmn_inverse`] times the single-impurity
//! denominators. Their product is exactly the 3x3 determinant
//! det(I - G0 V), which is pole-free below the band and is what
//! [`bound_state_energies`] actually brackets. The number of roots steps from
//! one to two at epsilon * d = 1 and from two to three at epsilon * d = 3;
//! these thresholds are exact on the lattice.

use crate::scalar::{real, Real};
use thiserror::Error;

/// Errors from resolvent evaluations and root searches.
#[derive(Debug, Error)]
pub enum GreensError {
    #[error("energy z = {z:e} lies inside the band; the lattice resolvent closed form requires |z - h| > 2J")]
    InsideBand { z: f64 },
    #[error("T-matrix factor pole at site {site}: z = {z:e} is a single-impurity bound-state energy")]
    TFactorPole { site: i64, z: f64 },
    #[error("site {site} is not part of the impurity set")]
    UnknownSite { site: i64 },
    #[error("invalid impurity set: {0}")]
    InvalidImpuritySet(String),
}

/// Three impurities on the infinite chain: strictly increasing, equally
/// spaced sites carrying signed on-site potentials (attractive = negative).
#[derive(Debug, Clone, PartialEq)]
pub struct ImpuritySet<T: Real = f64> {
    /// Impurity sites, strictly increasing with equal spacing.
    pub sites: [i64; 3],
    /// Signed potential at each site; a defect of strength epsilon >= 0
    /// contributes -epsilon.
    pub strengths: [T; 3],
}

impl<T: Real> ImpuritySet<T> {
    pub fn new(sites: [i64; 3], strengths: [T; 3]) -> Result<Self, GreensError> {
        if !(sites[0] < sites[1] && sites[1] < sites[2]) {
            return Err(GreensError::InvalidImpuritySet(format!(
                "sites {sites:?} must be strictly increasing"
            )));
        }
        if sites[1] - sites[0] != sites[2] - sites[1] {
            return Err(GreensError::InvalidImpuritySet(format!(
                "sites {sites:?} must be equally spaced"
            )));
        }
        if strengths.iter().any(|v| !v.is_finite()) {
            return Err(GreensError::InvalidImpuritySet(
                "strengths must be finite".into(),
            ));
        }
        Ok(Self { sites, strengths })
    }

    /// The symmetric attractive triple at sites `{-d, 0, +d}` with defect
    /// strength `epsilon >= 0` (stored as the signed potential `-epsilon`).
    pub fn symmetric_attractive(epsilon: T, d: i64) -> Result<Self, GreensError> {
        if d < 1 {
            return Err(GreensError::InvalidImpuritySet(format!(
                "spacing d = {d} must be at least 1"
            )));
        }
        if !(epsilon >= T::zero()) {
            return Err(GreensError::InvalidImpuritySet(
                "defect strength must be non-negative and finite".into(),
            ));
        }
        Self::new([-d, 0, d], [-epsilon; 3])
    }

    /// Spacing between neighbouring impurities.
    pub fn spacing(&self) -> i64 {
        self.sites[1] - self.sites[0]
    }

    fn strength_at(&self, site: i64) -> Result<T, GreensError> {
        self.sites
            .iter()
            .position(|&s| s == site)
            .map(|a| self.strengths[a])
            .ok_or(GreensError::UnknownSite { site })
    }

    /// Largest potential magnitude in the set.
    fn max_strength(&self) -> T {
        self.strengths
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }
}

/// Free lattice resolvent `<r| (z - H0)^-1 |s>` for z outside the band.
pub fn g0_element<T: Real>(r: i64, s: i64, z: T, h: T, j: T) -> Result<T, GreensError> {
    let two = real::<T>(2.0);
    let x = (z - h) / (two * j);
    if x.abs() <= T::one() {
        return Err(GreensError::InsideBand {
            z: z.to_f64().unwrap_or(f64::NAN),
        });
    }
    let root = (x * x - T::one()).sqrt();
    let sign = if x > T::zero() { T::one() } else { -T::one() };
    let rho = -x + sign * root;
    let dist = r.abs_diff(s).min(i32::MAX as u64) as i32;
    Ok(sign * rho.powi(dist) / (two * j * root))
}

/// Single-impurity T-matrix factor `t = v / (1 - v G0(site, site; z))`.
pub fn t_factor<T: Real>(
    site: i64,
    z: T,
    imp: &ImpuritySet<T>,
    h: T,
    j: T,
) -> Result<T, GreensError> {
    let v = imp.strength_at(site)?;
    if v == T::zero() {
        return Ok(T::zero());
    }
    let g = g0_element(site, site, z, h, j)?;
    let den = T::one() - v * g;
    if den.abs() < real::<T>(1e-14) {
        return Err(GreensError::TFactorPole {
            site,
            z: z.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(v / den)
}

/// Inter-impurity interference function whose zeros (together with the
/// single-impurity pole factors) locate the composite bound states:
///
/// ```text
/// 1 - t_l t_m G(l,m)G(m,l) - t_m t_n G(m,n)G(n,m) - t_n t_l G(n,l)G(l,n)
///   - t_l t_m t_n [G(l,m)G(m,n)G(n,l) + G(m,l)G(l,n)G(n,m)]
/// ```
pub fn f_lmn_inverse<T: Real>(
    z: T,
    imp: &ImpuritySet<T>,
    h: T,
    j: T,
) -> Result<T, GreensError> {
    let [l, m, n] = imp.sites;
    let tl = t_factor(l, z, imp, h, j)?;
    let tm = t_factor(m, z, imp, h, j)?;
    let tn = t_factor(n, z, imp, h, j)?;
    let g = |a: i64, b: i64| g0_element(a, b, z, h, j);
    let (glm, gml) = (g(l, m)?, g(m, l)?);
    let (gmn, gnm) = (g(m, n)?, g(n, m)?);
    let (gnl, gln) = (g(n, l)?, g(l, n)?);
    Ok(T::one()
        - tl * tm * glm * gml
        - tm * tn * gmn * gnm
        - tn * tl * gnl * gln
        - tl * tm * tn * (glm * gmn * gnl + gml * gln * gnm))
}

/// Pole-free bound-state function: `det(I - G0 V)` over the three impurity
/// sites. Equal to `f_lmn_inverse` times the product of the t-factor
/// denominators, but safe to evaluate everywhere below the band.
pub fn scattering_determinant<T: Real>(
    z: T,
    imp: &ImpuritySet<T>,
    h: T,
    j: T,
) -> Result<T, GreensError> {
    let mut a = [[T::zero(); 3]; 3];
    for p in 0..3 {
        for q in 0..3 {
            let g = g0_element(imp.sites[p], imp.sites[q], z, h, j)?;
            let kron = if p == q { T::one() } else { T::zero() };
            a[p][q] = kron - g * imp.strengths[q];
        }
    }
    Ok(a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
}

/// Bound-state energies below the band, ascending (deepest first).
///
/// Brackets sign changes of [`scattering_determinant`] on 4000 log-spaced
/// depths from `1e-9` to `10 (J + max |v|)` below the band bottom, then
/// bisects each bracket to an absolute width of `1e-12` (widened to the
/// scalar's own resolution for f32). Returns an empty list when every
/// strength is zero; an attractive triple always yields one to three roots.
pub fn bound_state_energies<T: Real>(
    imp: &ImpuritySet<T>,
    h: T,
    j: T,
) -> Result<Vec<T>, GreensError> {
    let band_lo = h - real::<T>(2.0) * j;
    // The nominal 1e-9 floor widens to the scalar's own resolution so that
    // band_lo - depth stays representably outside the band (matters for f32).
    let depth_min = real::<T>(1e-9)
        .max(T::default_epsilon() * real::<T>(64.0) * (T::one() + h.abs() + band_lo.abs()));
    let depth_max = real::<T>(10.0) * (j + imp.max_strength());
    let npts = 4000usize;
    let ratio = (depth_max / depth_min).ln() / real::<T>((npts - 1) as f64);
    // Grid ascending in z: deepest point first.
    let zs: Vec<T> = (0..npts)
        .map(|i| {
            let k = npts - 1 - i;
            band_lo - depth_min * (ratio * real::<T>(k as f64)).exp()
        })
        .collect();
    let mut ps = Vec::with_capacity(npts);
    for &z in &zs {
        ps.push(scattering_determinant(z, imp, h, j)?);
    }
    let tol = real::<T>(1e-12).max(T::default_epsilon() * real::<T>(8.0) * (T::one() + band_lo.abs()));
    let mut roots: Vec<T> = Vec::new();
    let push = |r: T, roots: &mut Vec<T>| {
        if roots.last().map_or(true, |&p| (r - p).abs() > tol * real::<T>(4.0)) {
            roots.push(r);
        }
    };
    for i in 0..npts - 1 {
        if ps[i] == T::zero() {
            push(zs[i], &mut roots);
            continue;
        }
        if ps[i + 1] == T::zero() || (ps[i] > T::zero()) == (ps[i + 1] > T::zero()) {
            continue;
        }
        let (mut lo, mut hi) = (zs[i], zs[i + 1]);
        let mut plo = ps[i];
        while hi - lo > tol {
            let mid = (lo + hi) * real::<T>(0.5);
            let pmid = scattering_determinant(mid, imp, h, j)?;
            if pmid == T::zero() {
                lo = mid;
                hi = mid;
                break;
            }
            if (pmid > T::zero()) == (plo > T::zero()) {
                lo = mid;
                plo = pmid;
            } else {
                hi = mid;
            }
        }
        push((lo + hi) * real::<T>(0.5), &mut roots);
    }
    Ok(roots)
}

/// Number-of-levels region in the defect-strength plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStateRegion {
    One,
    Two,
    Three,
}

impl BoundStateRegion {
    pub fn count(self) -> usize {
        match self {
            BoundStateRegion::One => 1,
            BoundStateRegion::Two => 2,
            BoundStateRegion::Three => 3,
        }
    }
}

impl std::fmt::Display for BoundStateRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.count())
    }
}

/// Classifies `(epsilon, d)` with `epsilon > 0` by the exact lattice
/// thresholds: one level for `epsilon d < 1`, two for `1 < epsilon d < 3`,
/// three beyond. A product within `1e-12` of a threshold counts as the lower
/// region.
pub fn region_classify<T: Real>(epsilon: T, d: usize) -> BoundStateRegion {
    let x = epsilon * real::<T>(d as f64);
    let tie = real::<T>(1e-12);
    if (x - T::one()).abs() <= tie {
        BoundStateRegion::One
    } else if (x - real::<T>(3.0)).abs() <= tie {
        BoundStateRegion::Two
    } else if x < T::one() {
        BoundStateRegion::One
    } else if x < real::<T>(3.0) {
        BoundStateRegion::Two
    } else {
        BoundStateRegion::Three
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChainSpec;
    use crate::spectrum::diagonalize;

    fn close(a: f64, b: f64, tol: f64, what: &str) {
        assert!((a - b).abs() < tol, "{what}: {a} vs {b}");
    }

    /// Finite antiperiodic ring resolvent by direct momentum sum.
    fn g0_ring(n: usize, r: i64, s: i64, z: f64, h: f64, j: f64) -> f64 {
        let mut acc = 0.0;
        for q in 0..n {
            let kappa = 2.0 * std::f64::consts::PI * (q as f64 + 0.5) / n as f64;
            acc += (kappa * (r - s) as f64).cos() / (z - h + 2.0 * j * kappa.cos());
        }
        acc / n as f64
    }

    #[test]
    fn g0_matches_finite_ring_spectral_sum() {
        let (h, j) = (2.0, 1.0);
        for z in [h - 2.0 * j - 0.5, h - 2.0 * j - 2.0, h + 2.0 * j + 1.0] {
            for dist in [0i64, 1, 2, 5] {
                let exact = g0_element(7, 7 - dist, z, h, j).unwrap();
                let oracle = g0_ring(4096, 7, 7 - dist, z, h, j);
                close(exact, oracle, 1e-8, &format!("G0 at z={z}, |r-s|={dist}"));
            }
        }
    }

    #[test]
    fn g0_is_symmetric_and_decays() {
        let (h, j) = (1.5f64, 0.8f64);
        let z = h - 2.0 * j - 0.3;
        let mut prev = f64::INFINITY;
        for dist in 0i64..12 {
            let a = g0_element(0, dist, z, h, j).unwrap();
            let b = g0_element(dist, 0, z, h, j).unwrap();
            assert_eq!(a, b, "symmetry at distance {dist}");
            assert!(a.abs() < prev, "no decay at distance {dist}");
            prev = a.abs();
        }
    }

    #[test]
    fn g0_has_resolvent_asymptotics() {
        let (h, j) = (2.0, 1.0);
        for z in [-1e6, 1e6] {
            let g = g0_element(3, 3, z, h, j).unwrap();
            close(g * z, 1.0, 1e-5, "1/z tail");
        }
    }

    #[test]
    fn g0_rejects_in_band_energy() {
        assert!(matches!(
            g0_element::<f64>(0, 0, 2.0, 2.0, 1.0),
            Err(GreensError::InsideBand { .. })
        ));
        // Band edges are excluded too: the closed form diverges there.
        assert!(matches!(
            g0_element::<f64>(0, 0, 0.0, 2.0, 1.0),
            Err(GreensError::InsideBand { .. })
        ));
    }

    #[test]
    fn t_factor_vanishes_without_impurity_and_tends_to_strength() {
        let imp = ImpuritySet::new([-2, 0, 2], [0.0, -0.7, -0.7]).unwrap();
        let t = t_factor(-2, -5.0, &imp, 2.0, 1.0).unwrap();
        assert_eq!(t, 0.0);
        let t = t_factor(0, -1e9, &imp, 2.0, 1.0).unwrap();
        close(t, -0.7, 1e-6, "deep-z limit");
    }

    #[test]
    fn t_factor_pole_sits_at_single_impurity_bound_state() {
        let (h, j, eps) = (2.0f64, 1.0f64, 1.0f64);
        let imp = ImpuritySet::symmetric_attractive(eps, 3).unwrap();
        // Bisect the denominator sign change and compare with the closed form
        // z* = h - sqrt(4 J^2 + eps^2).
        let den = |z: f64| 1.0 - (-eps) * g0_element(0, 0, z, h, j).unwrap();
        let (mut lo, mut hi) = (h - 2.0 * j - 3.0, h - 2.0 * j - 1e-9);
        assert!(den(lo) > 0.0 && den(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if den(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z_star = 0.5 * (lo + hi);
        close(z_star, h - (4.0 * j * j + eps * eps).sqrt(), 1e-10, "pole location");
        assert!(matches!(
            t_factor(0, z_star, &imp, h, j),
            Err(GreensError::TFactorPole { site: 0, .. })
        ));
        // Away from the pole the factor is finite.
        assert!(t_factor(0, z_star - 0.1, &imp, h, j).is_ok());
    }

    #[test]
    fn f_lmn_is_one_without_impurities() {
        let imp = ImpuritySet::new([-1, 0, 1], [0.0; 3]).unwrap();
        for z in [-0.5, -2.0, -7.0] {
            close(f_lmn_inverse(z, &imp, 2.0, 1.0).unwrap(), 1.0, 1e-15, "empty f");
        }
    }

    #[test]
    fn f_lmn_times_denominators_equals_determinant() {
        let (h, j) = (2.0, 1.0);
        for (eps, d) in [(0.3, 1i64), (0.9, 2), (1.7, 3)] {
            let imp = ImpuritySet::symmetric_attractive(eps, d).unwrap();
            for k in 0..40 {
                let z = h - 2.0 * j - 1e-6 * 1.6f64.powi(k);
                let f = match f_lmn_inverse(z, &imp, h, j) {
                    Ok(f) => f,
                    // Skip points that collide with a t-factor pole.
                    Err(GreensError::TFactorPole { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let mut prod = f;
                for &s in &imp.sites {
                    prod *= 1.0 - imp.strength_at(s).unwrap() * g0_element(s, s, z, h, j).unwrap();
                }
                let det = scattering_determinant(z, &imp, h, j).unwrap();
                close(prod, det, 1e-10 * det.abs().max(1.0), "factorization");
            }
        }
    }

    #[test]
    fn root_count_matches_region_classification() {
        let (h, j) = (2.0, 1.0);
        for d in [1i64, 2, 5] {
            for ed in [0.5, 1.5, 2.9, 3.5, 5.9] {
                let eps = ed / d as f64;
                let imp = ImpuritySet::symmetric_attractive(eps, d).unwrap();
                let roots = bound_state_energies(&imp, h, j).unwrap();
                let want = region_classify(eps, d as usize).count();
                assert_eq!(roots.len(), want, "root count at d={d}, eps*d={ed}");
                for r in roots.windows(2) {
                    assert!(r[0] < r[1], "roots not ascending");
                }
            }
        }
    }

    #[test]
    fn roots_agree_with_large_ring_levels() {
        let (h, j) = (2.0, 1.0);
        let n = 1024;
        for d in [1usize, 3] {
            for ed in [0.6, 2.5, 5.0] {
                let eps = ed / d as f64;
                let imp = ImpuritySet::symmetric_attractive(eps, d as i64).unwrap();
                let roots = bound_state_energies(&imp, h, j).unwrap();
                let spec = ChainSpec::<f64>::new(n, h, eps, d);
                let s = diagonalize(&spec).unwrap();
                let levels = s.discrete_energies_below();
                assert_eq!(roots.len(), levels.len(), "count at d={d}, eps*d={ed}");
                for (r, l) in roots.iter().zip(&levels) {
                    close(*r, *l, 1e-4, &format!("level at d={d}, eps*d={ed}"));
                }
            }
        }
    }

    #[test]
    fn weak_coupling_root_approaches_band_bottom() {
        let (h, j) = (2.0, 1.0);
        let band_lo = h - 2.0 * j;
        let mut prev_gap = f64::INFINITY;
        for eps in [0.2, 0.1, 0.05] {
            let imp = ImpuritySet::symmetric_attractive(eps, 1).unwrap();
            let roots = bound_state_energies(&imp, h, j).unwrap();
            assert_eq!(roots.len(), 1);
            let gap = band_lo - roots[0];
            assert!(gap > 0.0 && gap < prev_gap, "gap {gap} at eps={eps}");
            prev_gap = gap;
        }
    }

    #[test]
    fn empty_impurities_have_no_roots() {
        let imp = ImpuritySet::new([-1, 0, 1], [0.0; 3]).unwrap();
        assert!(bound_state_energies(&imp, 2.0, 1.0).unwrap().is_empty());
    }

    #[test]
    fn region_boundaries_go_to_lower_region() {
        assert_eq!(region_classify(0.9, 1), BoundStateRegion::One);
        assert_eq!(region_classify(1.0, 1), BoundStateRegion::One);
        assert_eq!(region_classify(0.5, 5), BoundStateRegion::Two);
        assert_eq!(region_classify(1.0, 3), BoundStateRegion::Two);
        assert_eq!(region_classify(3.5, 1), BoundStateRegion::Three);
        assert_eq!(region_classify(1e-9, 9), BoundStateRegion::One);
    }

    #[test]
    fn impurity_set_rejects_bad_geometry() {
        assert!(ImpuritySet::new([0, 0, 1], [-1.0; 3]).is_err());
        assert!(ImpuritySet::new([0, 1, 3], [-1.0; 3]).is_err());
        assert!(ImpuritySet::<f64>::symmetric_attractive(-0.5, 1).is_err());
        assert!(ImpuritySet::<f64>::symmetric_attractive(1.0, 0).is_err());
    }

    #[test]
    fn f32_roots_match_f64_counts() {
        let imp32 = ImpuritySet::<f32>::symmetric_attractive(2.0, 2).unwrap();
        let roots32 = bound_state_energies(&imp32, 2.0f32, 1.0f32).unwrap();
        let imp64 = ImpuritySet::<f64>::symmetric_attractive(2.0, 2).unwrap();
        let roots64 = bound_state_energies(&imp64, 2.0f64, 1.0f64).unwrap();
        assert_eq!(roots32.len(), roots64.len());
        for (a, b) in roots32.iter().zip(&roots64) {
            close(*a as f64, *b, 5e-4, "f32 root");
        }
    }
}
