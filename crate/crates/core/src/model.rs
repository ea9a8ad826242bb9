//! Chain geometry and the single-particle hopping matrix.
//!
//! The physical system is a spin-1/2 XX chain of even length N in a uniform
//! transverse field h, with three on-site magnetic defects of equal strength
//! epsilon placed symmetrically at sites k-d, k, k+d. A Jordan-Wigner
//! transformation maps it to free spinless fermions, so everything observable
//! about the ground state is encoded in one real symmetric N x N matrix:
//!
//! * diagonal: h on clean sites, h - epsilon on defect sites,
//! * off-diagonal: -J on nearest-neighbour bonds,
//! * corner (1,N): +J in the antiperiodic sector, -J in the periodic one.
//!
//! With this sign convention the clean dispersion is h - 2J cos(2 pi q / N),
//! the band occupies [h - 2J, h + 2J], and attractive defects split discrete
//! levels off BELOW the band. The antiperiodic sector corresponds to even
//! fermion parity of the periodic spin chain and is the default.

use crate::scalar::{real, Real};
use nalgebra::DMatrix;
use thiserror::Error;

/// Fermionic boundary sector of the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Corner bond +J; momenta are half-integer. Even-parity sector.
    #[default]
    Antiperiodic,
    /// Corner bond -J; momenta are integer. Odd-parity sector.
    Periodic,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Antiperiodic => write!(f, "antiperiodic"),
            Boundary::Periodic => write!(f, "periodic"),
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "antiperiodic" | "apbc" => Ok(Boundary::Antiperiodic),
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            other => Err(ModelError::Config(format!("unknown boundary '{other}'"))),
        }
    }
}

/// Validation and configuration errors for chain parameters.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("chain length must be even, got n = {0}")]
    OddLength(usize),
    #[error("chain length must be at least 4, got n = {0}")]
    TooShort(usize),
    #[error("defect spacing must satisfy d >= 1, got d = {0}")]
    SpacingTooSmall(usize),
    #[error("defect window [{lo}, {hi}] exceeds chain sites 1..={n}")]
    WindowExceedsChain { lo: isize, hi: usize, n: usize },
    #[error("defect strength must be non-negative, got epsilon = {0}")]
    NegativeDefect(f64),
    #[error("hopping amplitude must be positive, got j = {0}")]
    NonPositiveHopping(f64),
    #[error("parameter {0} must be finite")]
    NonFinite(&'static str),
    #[error("config error: {0}")]
    Config(String),
}

/// Parameters of a defect chain.
///
/// Sites are numbered 1..=n. The defect triple sits at `center - d`, `center`,
/// `center + d`. Defaults: `center = n / 2`, antiperiodic boundary, `j = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec<T: Real = f64> {
    /// Number of sites; must be even.
    pub n: usize,
    /// Hopping amplitude J > 0.
    pub j: T,
    /// Uniform transverse field h.
    pub h: T,
    /// Defect strength epsilon >= 0. Positive values attract fermions.
    pub epsilon: T,
    /// Defect spacing d >= 1.
    pub d: usize,
    /// Central defect site (1-based).
    pub center: usize,
    /// Boundary sector.
    pub boundary: Boundary,
}

impl<T: Real> ChainSpec<T> {
    /// Chain with defaults `j = 1`, `center = n / 2`, antiperiodic boundary.
    pub fn new(n: usize, h: T, epsilon: T, d: usize) -> Self {
        Self {
            n,
            j: T::one(),
            h,
            epsilon,
            d,
            center: n / 2,
            boundary: Boundary::Antiperiodic,
        }
    }

    pub fn with_j(mut self, j: T) -> Self {
        self.j = j;
        self
    }

    pub fn with_center(mut self, center: usize) -> Self {
        self.center = center;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Checks every structural constraint on the parameters.
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [("j", self.j), ("h", self.h), ("epsilon", self.epsilon)] {
            if !v.is_finite() {
                return Err(ModelError::NonFinite(name));
            }
        }
        if self.n < 4 {
            return Err(ModelError::TooShort(self.n));
        }
        if self.n % 2 != 0 {
            return Err(ModelError::OddLength(self.n));
        }
        if self.d < 1 {
            return Err(ModelError::SpacingTooSmall(self.d));
        }
        let lo = self.center as isize - self.d as isize;
        let hi = self.center + self.d;
        if lo < 1 || hi > self.n {
            return Err(ModelError::WindowExceedsChain { lo, hi, n: self.n });
        }
        if self.epsilon < T::zero() {
            return Err(ModelError::NegativeDefect(
                self.epsilon.to_f64().unwrap_or(f64::NAN),
            ));
        }
        if self.j <= T::zero() {
            return Err(ModelError::NonPositiveHopping(
                self.j.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(())
    }

    /// The three defect sites `[center - d, center, center + d]` (1-based).
    pub fn defect_sites(&self) -> [usize; 3] {
        [self.center - self.d, self.center, self.center + self.d]
    }

    /// Sites of the defect window `center - d ..= center + d` (1-based).
    pub fn window_sites(&self) -> std::ops::RangeInclusive<usize> {
        (self.center - self.d)..=(self.center + self.d)
    }

    /// Number of sites in the defect window, `2d + 1`.
    pub fn window_len(&self) -> usize {
        2 * self.d + 1
    }

    /// Band interval `[h - 2J, h + 2J]` of the clean chain.
    pub fn band(&self) -> (T, T) {
        let two = real::<T>(2.0);
        (self.h - two * self.j, self.h + two * self.j)
    }

    /// Warning for windows so wide that boundary effects pollute the defect
    /// region. Production parameters keep `2d + 1 <= n / 4`.
    pub fn regime_warning(&self) -> Option<String> {
        if self.window_len() * 4 > self.n {
            Some(format!(
                "defect window 2d+1 = {} exceeds n/4 = {}; boundary effects may be visible",
                self.window_len(),
                self.n / 4
            ))
        } else {
            None
        }
    }

    /// Builds the real symmetric single-particle matrix described in the
    /// module documentation.
    pub fn single_particle_matrix(&self) -> Result<DMatrix<T>, ModelError> {
        self.validate()?;
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.h;
        }
        for site in self.defect_sites() {
            let i = site - 1;
            m[(i, i)] -= self.epsilon;
        }
        for i in 0..n - 1 {
            m[(i, i + 1)] = -self.j;
            m[(i + 1, i)] = -self.j;
        }
        let corner = match self.boundary {
            Boundary::Antiperiodic => self.j,
            Boundary::Periodic => -self.j,
        };
        m[(0, n - 1)] = corner;
        m[(n - 1, 0)] = corner;
        Ok(m)
    }

    /// Serializes to a flat `key = value` config string.
    pub fn to_config_string(&self) -> String {
        format!(
            "n = {}\nj = {:e}\nh = {:e}\nepsilon = {:e}\nd = {}\ncenter = {}\nboundary = {}\n",
            self.n, self.j, self.h, self.epsilon, self.d, self.center, self.boundary
        )
    }

    /// Parses the `key = value` format produced by [`Self::to_config_string`].
    /// Unknown keys are rejected; `j`, `center`, and `boundary` are optional.
    pub fn from_config_str(text: &str) -> Result<Self, ModelError> {
        let mut n: Option<usize> = None;
        let mut j: Option<T> = None;
        let mut h: Option<T> = None;
        let mut epsilon: Option<T> = None;
        let mut d: Option<usize> = None;
        let mut center: Option<usize> = None;
        let mut boundary: Option<Boundary> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ModelError::Config(format!("line {}: missing '='", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let parse_usize = |v: &str| {
                v.parse::<usize>()
                    .map_err(|e| ModelError::Config(format!("{key}: {e}")))
            };
            let parse_real = |v: &str| {
                v.parse::<f64>()
                    .map(real::<T>)
                    .map_err(|e| ModelError::Config(format!("{key}: {e}")))
            };
            match key {
                "n" => n = Some(parse_usize(value)?),
                "j" => j = Some(parse_real(value)?),
                "h" => h = Some(parse_real(value)?),
                "epsilon" => epsilon = Some(parse_real(value)?),
                "d" => d = Some(parse_usize(value)?),
                "center" => center = Some(parse_usize(value)?),
                "boundary" => boundary = Some(value.parse()?),
                other => {
                    return Err(ModelError::Config(format!("unknown key '{other}'")));
                }
            }
        }
        let require = |name: &str| ModelError::Config(format!("missing key '{name}'"));
        let n = n.ok_or_else(|| require("n"))?;
        let mut spec = ChainSpec::new(
            n,
            h.ok_or_else(|| require("h"))?,
            epsilon.ok_or_else(|| require("epsilon"))?,
            d.ok_or_else(|| require("d"))?,
        );
        if let Some(j) = j {
            spec.j = j;
        }
        if let Some(center) = center {
            spec.center = center;
        }
        if let Some(boundary) = boundary {
            spec.boundary = boundary;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;

    #[test]
    fn validate_accepts_production_shape() {
        let spec = ChainSpec::<f64>::new(1024, 2.0, 0.5, 3);
        assert!(spec.validate().is_ok());
        assert_eq!(spec.defect_sites(), [509, 512, 515]);
        assert!(spec.regime_warning().is_none());
    }

    #[test]
    fn validate_rejects_odd_length() {
        let spec = ChainSpec::<f64>::new(1023, 2.0, 0.5, 3);
        assert!(matches!(spec.validate(), Err(ModelError::OddLength(1023))));
    }

    #[test]
    fn validate_rejects_wide_window() {
        // d = 5 around center 8 of a 16-site chain: window [3, 13] fits, but
        // center 4 pushes it off the left edge.
        let spec = ChainSpec::<f64>::new(16, 2.0, 0.5, 5).with_center(4);
        assert!(matches!(
            spec.validate(),
            Err(ModelError::WindowExceedsChain { .. })
        ));
    }

    #[test]
    fn validate_rejects_negative_defect() {
        let spec = ChainSpec::<f64>::new(64, 2.0, -0.25, 1);
        assert!(matches!(spec.validate(), Err(ModelError::NegativeDefect(_))));
    }

    #[test]
    fn regime_warning_fires_for_wide_windows() {
        let spec = ChainSpec::<f64>::new(64, 2.0, 0.5, 9);
        assert!(spec.regime_warning().is_some());
    }

    #[test]
    fn matrix_matches_hand_built_four_site_ring() {
        // n = 4, J = 1, h = 0, epsilon = 0, antiperiodic corner +1.
        let spec = ChainSpec::<f64>::new(4, 0.0, 0.0, 1);
        let m = spec.single_particle_matrix().unwrap();
        let hand = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, -1.0, 0.0, 1.0, //
                -1.0, 0.0, -1.0, 0.0, //
                0.0, -1.0, 0.0, -1.0, //
                1.0, 0.0, -1.0, 0.0,
            ],
        );
        assert_eq!(m, hand);
        // Brute-force eigenvalues of the 4x4: two at -sqrt(2), two at +sqrt(2).
        let mut ev: Vec<f64> = hand.symmetric_eigen().eigenvalues.iter().cloned().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let s = 2.0f64.sqrt();
        for (got, want) in ev.iter().zip([-s, -s, s, s]) {
            assert!((got - want).abs() < 1e-12, "eigenvalue {got} != {want}");
        }
    }

    #[test]
    fn matrix_diagonal_carries_defects() {
        let spec = ChainSpec::<f64>::new(16, 2.0, 2.0, 2);
        let m = spec.single_particle_matrix().unwrap();
        for i in 0..16 {
            let expected = if [6usize, 8, 10].contains(&(i + 1)) { 0.0 } else { 2.0 };
            assert_eq!(m[(i, i)], expected, "diagonal at site {}", i + 1);
        }
    }

    #[test]
    fn matrix_is_symmetric_for_random_parameters() {
        // Seeded sweep over parameter space; symmetry and sparsity pattern.
        let params = [
            (8usize, 1.0, 0.0, 1, Boundary::Antiperiodic),
            (12, 2.0, 0.7, 2, Boundary::Periodic),
            (20, 0.5, 3.0, 4, Boundary::Antiperiodic),
            (30, 1.5, 1.2, 7, Boundary::Periodic),
        ];
        for (n, h, eps, d, boundary) in params {
            let spec = ChainSpec::<f64>::new(n, h, eps, d).with_boundary(boundary);
            let m = spec.single_particle_matrix().unwrap();
            for i in 0..n {
                for jj in 0..n {
                    assert_eq!(m[(i, jj)], m[(jj, i)], "symmetry at ({i},{jj})");
                    let adjacent = i.abs_diff(jj) == 1 || i.abs_diff(jj) == n - 1;
                    if i != jj && !adjacent {
                        assert_eq!(m[(i, jj)], 0.0, "unexpected coupling at ({i},{jj})");
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_sign_flips_corner_only() {
        let apbc = ChainSpec::<f64>::new(10, 1.0, 0.3, 1);
        let pbc = apbc.clone().with_boundary(Boundary::Periodic);
        let ma = apbc.single_particle_matrix().unwrap();
        let mp = pbc.single_particle_matrix().unwrap();
        assert_eq!(ma[(0, 9)], 1.0);
        assert_eq!(mp[(0, 9)], -1.0);
        let mut diff = ma - mp;
        diff[(0, 9)] = 0.0;
        diff[(9, 0)] = 0.0;
        assert_eq!(diff.abs().max(), 0.0);
    }

    #[test]
    fn defect_shift_obeys_weyl_bound() {
        // Adding the rank-3 defect perturbation moves no eigenvalue by more
        // than epsilon.
        let n = 32;
        let eps = 0.8;
        let clean = ChainSpec::<f64>::new(n, 1.0, 0.0, 3);
        let dirty = ChainSpec::<f64>::new(n, 1.0, eps, 3);
        let sort = |m: DMatrix<f64>| {
            let mut v: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().cloned().collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        let e0 = sort(clean.single_particle_matrix().unwrap());
        let e1 = sort(dirty.single_particle_matrix().unwrap());
        for q in 0..n {
            assert!(
                e1[q] <= e0[q] + 1e-12 && e1[q] >= e0[q] - eps - 1e-12,
                "eigenvalue {q}: {} vs clean {}",
                e1[q],
                e0[q]
            );
        }
    }

    #[test]
    fn config_round_trip_preserves_spec() {
        let spec = ChainSpec::<f64>::new(128, 1.75, 0.4, 2)
            .with_center(60)
            .with_boundary(Boundary::Periodic)
            .with_j(1.25);
        let text = spec.to_config_string();
        let back = ChainSpec::<f64>::from_config_str(&text).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn config_parse_reports_unknown_key() {
        let err = ChainSpec::<f64>::from_config_str("n = 8\nh = 1\nepsilon = 0\nd = 1\nzz = 3\n");
        assert!(matches!(err, Err(ModelError::Config(_))));
    }

    #[test]
    fn config_defaults_apply() {
        let spec =
            ChainSpec::<f64>::from_config_str("n = 64\nh = 2.0\nepsilon = 0.5\nd = 1\n").unwrap();
        assert_eq!(spec.center, 32);
        assert_eq!(spec.boundary, Boundary::Antiperiodic);
        assert_eq!(spec.j, 1.0);
    }

    #[test]
    fn f32_matrix_builds() {
        let spec = ChainSpec::<f32>::new(8, real(1.5), real(0.25), 1);
        let m = spec.single_particle_matrix().unwrap();
        assert_eq!(m[(3, 3)], 1.25f32);
        assert_eq!(m[(0, 7)], 1.0f32);
    }
}
