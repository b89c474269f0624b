//! Node placement: deterministic distance computations and every
//! position-randomness distribution of the system.
//!
//! The relay R hovers at altitude H1 over the center of a ground disk of
//! radius L holding the receivers (a Poisson point process); interferers
//! live on a larger disk of radius T_I. The satellite S is uniform over a
//! spherical-cone shell of apex half-angle Psi/2 about the relay zenith,
//! radii between U2 and U1 measured from the Earth center. All lengths in
//! kilometers.

use crate::error::{Error, Result};
use rand::Rng;
use serde::Serialize;

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Deterministic placement constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryParams {
    /// Relay altitude above ground (km).
    pub h1_km: f64,
    /// Radius of the receiver disk (km).
    pub l_km: f64,
    /// Radius of the interferer disk (km); must exceed `l_km`.
    pub t_i_km: f64,
    /// Earth radius (km).
    pub r_e_km: f64,
    /// Outer shell radius of the satellite support, from Earth center (km).
    pub u1_km: f64,
    /// Inner shell radius of the satellite support, from Earth center (km).
    pub u2_km: f64,
    /// Apex angle of the satellite cone (radians), in (0, pi].
    pub psi_rad: f64,
    /// Receiver density of the ground process (nodes per km^2).
    pub density_per_km2: f64,
}

/// Support and normalization of the squared satellite-relay distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct D0SquaredSupport {
    /// Smallest attainable d0^2 = (U2 - H_R)^2 (km^2).
    pub d0_min_sq_km2: f64,
    /// Largest attainable d0^2 = U1^2 + H_R^2 - 2 U1 H_R cos(Psi/2) (km^2).
    pub d0_max_sq_km2: f64,
    /// Density normalization tau = 3 / (4 H_R (1 - cos(Psi/2)) (U1^3 - U2^3)),
    /// in km^-4.
    pub tau: f64,
}

impl GeometryParams {
    /// Validate and build the parameter set.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        h1_km: f64,
        l_km: f64,
        t_i_km: f64,
        r_e_km: f64,
        u1_km: f64,
        u2_km: f64,
        psi_rad: f64,
        density_per_km2: f64,
    ) -> Result<Self> {
        let p = GeometryParams {
            h1_km,
            l_km,
            t_i_km,
            r_e_km,
            u1_km,
            u2_km,
            psi_rad,
            density_per_km2,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let all = [
            self.h1_km,
            self.l_km,
            self.t_i_km,
            self.r_e_km,
            self.u1_km,
            self.u2_km,
            self.psi_rad,
            self.density_per_km2,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(
                "geometry: every parameter must be finite".into(),
            ));
        }
        if self.h1_km <= 0.0 {
            return Err(Error::Domain(format!(
                "geometry: relay altitude must be positive, got {} km",
                self.h1_km
            )));
        }
        if self.l_km <= 0.0 || self.t_i_km <= self.l_km {
            return Err(Error::Domain(format!(
                "geometry: need 0 < L < T_I, got L = {} km, T_I = {} km",
                self.l_km, self.t_i_km
            )));
        }
        if self.u2_km >= self.u1_km {
            return Err(Error::Domain(format!(
                "geometry: need U2 < U1, got U2 = {} km, U1 = {} km",
                self.u2_km, self.u1_km
            )));
        }
        if !(self.psi_rad > 0.0 && self.psi_rad <= std::f64::consts::PI) {
            return Err(Error::Domain(format!(
                "geometry: apex angle must lie in (0, pi], got {} rad",
                self.psi_rad
            )));
        }
        if self.u2_km < self.h_r_km() {
            return Err(Error::Domain(format!(
                "geometry: inner shell radius U2 = {} km must not fall below \
                 the relay center distance H_R = {} km",
                self.u2_km,
                self.h_r_km()
            )));
        }
        if self.density_per_km2 < 0.0 {
            return Err(Error::Domain(format!(
                "geometry: receiver density must be nonnegative, got {}",
                self.density_per_km2
            )));
        }
        Ok(())
    }

    /// Distance of the relay from the Earth center, H_R = H1 + R_E (km).
    pub fn h_r_km(&self) -> f64 {
        self.h1_km + self.r_e_km
    }

    /// Support and normalization constant of the d0^2 density.
    pub fn d0_support(&self) -> D0SquaredSupport {
        let hr = self.h_r_km();
        let half = 0.5 * self.psi_rad;
        let d0_min = self.u2_km - hr;
        let d0_max_sq =
            self.u1_km * self.u1_km + hr * hr - 2.0 * self.u1_km * hr * half.cos();
        let tau = 3.0
            / (4.0
                * hr
                * (1.0 - half.cos())
                * (self.u1_km.powi(3) - self.u2_km.powi(3)));
        D0SquaredSupport {
            d0_min_sq_km2: d0_min * d0_min,
            d0_max_sq_km2: d0_max_sq,
            tau,
        }
    }
}

// ---------------------------------------------------------------------------
// Deterministic distances and counts
// ---------------------------------------------------------------------------

/// Expected number of receivers in the coverage disk: pi L^2 density.
///
/// Takes raw scalars so degenerate geometries (L = 0) remain expressible.
pub fn expected_node_count(l_km: f64, density_per_km2: f64) -> f64 {
    std::f64::consts::PI * l_km * l_km * density_per_km2
}

/// Poisson pmf P{N = k} for mean `mu`, evaluated stably in log space.
pub fn poisson_pmf(k: u32, mu: f64) -> f64 {
    if mu == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let kf = k as f64;
    let ln_k_fact: f64 = (1..=k).map(|j| (j as f64).ln()).sum();
    (kf * mu.ln() - mu - ln_k_fact).exp()
}

/// Density of the relay-to-receiver distance d_i: 2x/L^2 on
/// [H1, sqrt(H1^2 + L^2)], zero outside.
pub fn receiver_distance_pdf(x_km: f64, p: &GeometryParams) -> f64 {
    let lo = p.h1_km;
    let hi = (p.h1_km * p.h1_km + p.l_km * p.l_km).sqrt();
    if x_km < lo || x_km > hi {
        return 0.0;
    }
    2.0 * x_km / (p.l_km * p.l_km)
}

/// Ground distance between a receiver at radius `r_i_km` and an interferer
/// at radius `r_int_km`, separated by azimuth `theta_rad` (law of cosines).
pub fn interferer_distance(r_i_km: f64, r_int_km: f64, theta_rad: f64) -> f64 {
    let sq = r_i_km * r_i_km + r_int_km * r_int_km
        - 2.0 * r_i_km * r_int_km * theta_rad.cos();
    sq.max(0.0).sqrt()
}

/// Distance between the satellite (shell radius `r_s_km`, polar angle
/// `theta_rad` off the relay zenith) and the relay.
pub fn satellite_distance(r_s_km: f64, theta_rad: f64, p: &GeometryParams) -> Result<f64> {
    if r_s_km < p.u2_km || r_s_km > p.u1_km {
        return Err(Error::Domain(format!(
            "satellite_distance: shell radius {} km outside [{}, {}]",
            r_s_km, p.u2_km, p.u1_km
        )));
    }
    let half = 0.5 * p.psi_rad;
    if !(0.0..=half).contains(&theta_rad) {
        return Err(Error::Domain(format!(
            "satellite_distance: polar angle {} rad outside [0, {}]",
            theta_rad, half
        )));
    }
    let hr = p.h_r_km();
    let sq = r_s_km * r_s_km + hr * hr - 2.0 * r_s_km * hr * theta_rad.cos();
    Ok(sq.max(0.0).sqrt())
}

/// Volume of a spherical-cone shell with apex angle `psi_rad`, radii
/// `u2_km..u1_km`: (2 pi / 3)(1 - cos(psi/2))(U1^3 - U2^3).
///
/// Raw arguments on purpose: the helper is also meaningful for full
/// spheres (psi = 2 pi), outside the satellite-support validation range.
pub fn cone_shell_volume(psi_rad: f64, u1_km: f64, u2_km: f64) -> f64 {
    2.0 * std::f64::consts::PI / 3.0
        * (1.0 - (0.5 * psi_rad).cos())
        * (u1_km.powi(3) - u2_km.powi(3))
}

// ---------------------------------------------------------------------------
// The d0^2 density
// ---------------------------------------------------------------------------

/// Density of the squared satellite-relay distance for S uniform over the
/// cone shell:
///
/// ```text
/// f(x) = tau * [ omega(x)^2 - rho(x)^2 ]
/// omega(x) = min(U1, H_R + sqrt(x))
/// rho(x)   = max(U2, H_R cos(Psi/2) + sqrt(max(0, x - H_R^2 sin^2(Psi/2))))
/// ```
///
/// The inner square root is clamped to zero where its argument is negative
/// (there the polar-angle constraint is vacuous and the U2 branch rules),
/// and the whole bracket is clamped at zero where rho exceeds omega.
/// Returns 0 outside the support; never errors.
pub fn d0_squared_pdf(x_km2: f64, p: &GeometryParams) -> f64 {
    let s = p.d0_support();
    if !(x_km2 >= s.d0_min_sq_km2 && x_km2 <= s.d0_max_sq_km2) {
        return 0.0;
    }
    let hr = p.h_r_km();
    let half = 0.5 * p.psi_rad;
    let omega = p.u1_km.min(hr + x_km2.sqrt());
    let sin_half = half.sin();
    let inner = (x_km2 - hr * hr * sin_half * sin_half).max(0.0);
    let rho = p.u2_km.max(hr * half.cos() + inner.sqrt());
    (s.tau * (omega * omega - rho * rho)).max(0.0)
}

// ---------------------------------------------------------------------------
// Inverse-CDF transforms
// ---------------------------------------------------------------------------

/// Receiver radius from a uniform draw: r = L sqrt(u) (CDF x^2/L^2).
pub fn receiver_radius_from_uniform(u: f64, l_km: f64) -> f64 {
    l_km * u.sqrt()
}

/// Shell radius from a uniform draw, inverting the CDF of the density
/// 3x^2/(U1^3 - U2^3) on [U2, U1].
pub fn shell_radius_from_uniform(u: f64, u1_km: f64, u2_km: f64) -> f64 {
    (u2_km.powi(3) + u * (u1_km.powi(3) - u2_km.powi(3))).cbrt()
}

/// Polar cosine from a uniform draw: uniform over [cos(Psi/2), 1].
pub fn cos_polar_from_uniform(u: f64, psi_rad: f64) -> f64 {
    1.0 - u * (1.0 - (0.5 * psi_rad).cos())
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Draw a receiver position: returns (ground radius r_i, slant distance
/// d_i = sqrt(H1^2 + r_i^2)). Consumes one uniform.
pub fn sample_receiver<R: Rng + ?Sized>(rng: &mut R, p: &GeometryParams) -> (f64, f64) {
    let r = receiver_radius_from_uniform(rng.gen::<f64>(), p.l_km);
    (r, (p.h1_km * p.h1_km + r * r).sqrt())
}

/// Draw an interferer position: returns (ground radius r_I uniform over
/// the T_I disk, azimuth theta uniform on [0, 2 pi)). Consumes two
/// uniforms, radius first.
pub fn sample_interferer<R: Rng + ?Sized>(rng: &mut R, p: &GeometryParams) -> (f64, f64) {
    let r = p.t_i_km * rng.gen::<f64>().sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    (r, theta)
}

/// Draw a satellite position uniform over the cone shell: returns
/// (shell radius r_S, polar angle theta, distance d0 to the relay).
/// Consumes two uniforms, radius first then polar cosine; the azimuth is
/// irrelevant to d0 and is not drawn.
pub fn sample_satellite<R: Rng + ?Sized>(
    rng: &mut R,
    p: &GeometryParams,
) -> (f64, f64, f64) {
    let r_s = shell_radius_from_uniform(rng.gen::<f64>(), p.u1_km, p.u2_km);
    let cos_theta = cos_polar_from_uniform(rng.gen::<f64>(), p.psi_rad);
    let theta = cos_theta.clamp(-1.0, 1.0).acos();
    let hr = p.h_r_km();
    let d0 = (r_s * r_s + hr * hr - 2.0 * r_s * hr * cos_theta)
        .max(0.0)
        .sqrt();
    (r_s, theta, d0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, regularized_gamma_q};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn default_params() -> GeometryParams {
        GeometryParams::new(
            5.0,
            20.0,
            30.0,
            6371.0,
            8371.0,
            6531.0,
            std::f64::consts::FRAC_PI_3,
            0.01,
        )
        .unwrap()
    }

    #[test]
    fn validation_rejects_broken_geometries() {
        let ok = default_params();
        assert!(GeometryParams::new(0.0, 20.0, 30.0, 6371.0, 8371.0, 6531.0, 1.0, 0.01).is_err());
        assert!(GeometryParams::new(5.0, 30.0, 30.0, 6371.0, 8371.0, 6531.0, 1.0, 0.01).is_err());
        assert!(GeometryParams::new(5.0, 20.0, 30.0, 6371.0, 6531.0, 8371.0, 1.0, 0.01).is_err());
        assert!(GeometryParams::new(5.0, 20.0, 30.0, 6371.0, 8371.0, 6531.0, 0.0, 0.01).is_err());
        assert!(GeometryParams::new(5.0, 20.0, 30.0, 6371.0, 8371.0, 6531.0, 4.0, 0.01).is_err());
        // Inner shell below the relay sphere.
        assert!(GeometryParams::new(5.0, 20.0, 30.0, 6371.0, 8371.0, 6000.0, 1.0, 0.01).is_err());
        assert!((ok.h_r_km() - 6376.0).abs() < 1e-12);
    }

    #[test]
    fn node_count_formula() {
        let got = expected_node_count(20.0, 0.01);
        assert!(
            (got - 4.0 * std::f64::consts::PI).abs() < 1e-12,
            "pi * 400 * 0.01 = 4 pi, got {got}"
        );
        assert_eq!(expected_node_count(0.0, 7.0), 0.0);
    }

    #[test]
    fn poisson_pmf_sums_to_one() {
        let mu = 12.566_370_614_359_172; // 4 pi
        let total: f64 = (0..=200).map(|k| poisson_pmf(k, mu)).sum();
        assert!(
            (total - 1.0).abs() < 1e-12,
            "pmf over k = 0..200 should exhaust the mass, got {total}"
        );
        assert_eq!(poisson_pmf(0, 0.0), 1.0);
    }

    #[test]
    fn receiver_pdf_support_and_mass() {
        let p = default_params();
        assert_eq!(receiver_distance_pdf(p.h1_km - 1e-9, &p), 0.0);
        assert_eq!(receiver_distance_pdf(25.0, &p), 0.0); // beyond sqrt(425)
        let hi = (p.h1_km * p.h1_km + p.l_km * p.l_km).sqrt();
        let mass = integrate(|x| receiver_distance_pdf(x, &p), p.h1_km, hi, 1e-12);
        assert!((mass - 1.0).abs() < 1e-10, "pdf mass should be 1, got {mass}");
    }

    #[test]
    fn interferer_distance_right_triangle() {
        let got = interferer_distance(3.0, 4.0, std::f64::consts::FRAC_PI_2);
        assert!((got - 5.0).abs() < 1e-12, "3-4-right angle gives 5, got {got}");
        assert_eq!(interferer_distance(2.5, 2.5, 0.0), 0.0);
    }

    #[test]
    fn interferer_distance_vector_oracle() {
        // Independent 2-D coordinate computation.
        let (r_i, r_int, th): (f64, f64, f64) = (2.0, 7.0, 1.1);
        let (x1, y1) = (r_i, 0.0);
        let (x2, y2) = (r_int * th.cos(), r_int * th.sin());
        let want = ((x1 - x2) * (x1 - x2) + (y1 - y2) * (y1 - y2)).sqrt();
        let got = interferer_distance(r_i, r_int, th);
        assert!((got - want).abs() < 1e-12, "got {got}, oracle {want}");
    }

    #[test]
    fn satellite_distance_edges_and_oracle() {
        let p = default_params();
        let hr = p.h_r_km();
        let got = satellite_distance(p.u2_km, 0.0, &p).unwrap();
        assert!((got - (p.u2_km - hr)).abs() < 1e-9, "collinear minimum");
        let s = p.d0_support();
        let got = satellite_distance(p.u1_km, 0.5 * p.psi_rad, &p).unwrap();
        assert!((got - s.d0_max_sq_km2.sqrt()).abs() < 1e-9, "support edge");
        // 3-D Cartesian placement oracle.
        let (r_s, th): (f64, f64) = (7000.0, 0.3);
        let want = ((r_s * th.sin()).powi(2) + (r_s * th.cos() - hr).powi(2)).sqrt();
        let got = satellite_distance(r_s, th, &p).unwrap();
        assert!((got - want).abs() < 1e-9, "got {got}, Cartesian oracle {want}");
        assert!(satellite_distance(6000.0, 0.1, &p).is_err());
        assert!(satellite_distance(7000.0, 2.0, &p).is_err());
    }

    #[test]
    fn cone_shell_volume_degenerate_cases() {
        let (u1, u2) = (8371.0, 6531.0);
        let full = cone_shell_volume(2.0 * std::f64::consts::PI, u1, u2);
        let want = 4.0 * std::f64::consts::PI / 3.0 * (u1.powi(3) - u2.powi(3));
        assert!((full / want - 1.0).abs() < 1e-12, "psi = 2 pi is a full shell");
        assert_eq!(cone_shell_volume(1.0, 7000.0, 7000.0), 0.0);
    }

    #[test]
    fn cone_shell_volume_hit_or_miss_oracle() {
        // Rejection sampling in a bounding box around the cone shell.
        let (psi, u1, u2) = (std::f64::consts::FRAC_PI_3, 8371.0, 6531.0);
        let half = 0.5 * psi;
        let (sin_h, cos_h) = (half.sin(), half.cos());
        let (xy_max, z_min, z_max) = (u1 * sin_h, u2 * cos_h, u1);
        let mut rng = ChaCha8Rng::seed_from_u64(801);
        let n = 1_000_000u64;
        let mut hits = 0u64;
        for _ in 0..n {
            let x = xy_max * (2.0 * rng.gen::<f64>() - 1.0);
            let y = xy_max * (2.0 * rng.gen::<f64>() - 1.0);
            let z = z_min + (z_max - z_min) * rng.gen::<f64>();
            let r = (x * x + y * y + z * z).sqrt();
            if r >= u2 && r <= u1 && z >= r * cos_h {
                hits += 1;
            }
        }
        let box_vol = (2.0 * xy_max) * (2.0 * xy_max) * (z_max - z_min);
        let estimate = hits as f64 / n as f64 * box_vol;
        let want = cone_shell_volume(psi, u1, u2);
        assert!(
            (estimate / want - 1.0).abs() < 0.005,
            "hit-or-miss volume {estimate} vs formula {want}"
        );
    }

    #[test]
    fn d0_squared_pdf_zero_outside_support() {
        let p = default_params();
        let s = p.d0_support();
        assert_eq!(d0_squared_pdf(s.d0_min_sq_km2 - 1.0, &p), 0.0);
        assert_eq!(d0_squared_pdf(s.d0_max_sq_km2 + 1.0, &p), 0.0);
    }

    #[test]
    fn d0_squared_pdf_normalizes_across_altitudes() {
        for h1 in [5.0, 10.0, 20.0] {
            let p = GeometryParams::new(
                h1,
                20.0,
                30.0,
                6371.0,
                8371.0,
                6531.0,
                std::f64::consts::FRAC_PI_3,
                0.01,
            )
            .unwrap();
            let s = p.d0_support();
            let mass = integrate(
                |x| d0_squared_pdf(x, &p),
                s.d0_min_sq_km2,
                s.d0_max_sq_km2,
                1e-9,
            );
            assert!(
                (mass - 1.0).abs() < 1e-6,
                "d0^2 density mass at H1 = {h1}: got {mass}"
            );
            // Nonnegative across the support.
            for i in 0..=400 {
                let x = s.d0_min_sq_km2
                    + (s.d0_max_sq_km2 - s.d0_min_sq_km2) * i as f64 / 400.0;
                assert!(d0_squared_pdf(x, &p) >= 0.0, "negative density at {x}");
            }
        }
    }

    #[test]
    fn inverse_cdf_endpoints() {
        let p = default_params();
        assert_eq!(receiver_radius_from_uniform(0.0, p.l_km), 0.0);
        assert_eq!(receiver_radius_from_uniform(1.0, p.l_km), p.l_km);
        assert!((shell_radius_from_uniform(0.0, p.u1_km, p.u2_km) - p.u2_km).abs() < 1e-9);
        assert!((shell_radius_from_uniform(1.0, p.u1_km, p.u2_km) - p.u1_km).abs() < 1e-9);
        assert_eq!(cos_polar_from_uniform(0.0, p.psi_rad), 1.0);
        let lo = cos_polar_from_uniform(1.0, p.psi_rad);
        assert!((lo - (0.5 * p.psi_rad).cos()).abs() < 1e-15);
    }

    #[test]
    fn receiver_sampler_moment_and_support() {
        let p = default_params();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        for _ in 0..n {
            let (r, d) = sample_receiver(&mut rng, &p);
            assert!((0.0..=p.l_km).contains(&r), "radius off support: {r}");
            assert!(d >= p.h1_km && d * d <= p.h1_km * p.h1_km + p.l_km * p.l_km + 1e-9);
            sum += r;
        }
        let mean = sum / n as f64;
        // E r = 2L/3; Var r = L^2/18 under the disk density.
        let se = (p.l_km * p.l_km / 18.0 / n as f64).sqrt();
        assert!(
            (mean - 2.0 * p.l_km / 3.0).abs() < 3.0 * se,
            "mean radius {mean} strays from 2L/3 by more than 3 SE"
        );
    }

    #[test]
    fn receiver_sampler_chi_square_against_pdf() {
        // 20 equal-probability bins via the quantile r_j = L sqrt(j/20).
        let p = default_params();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 100_000usize;
        let bins = 20usize;
        let mut counts = vec![0u64; bins];
        for _ in 0..n {
            let (r, _) = sample_receiver(&mut rng, &p);
            let q = (r / p.l_km).powi(2); // uniform by construction of the CDF
            let idx = ((q * bins as f64) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let expect = n as f64 / bins as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expect) * (c as f64 - expect) / expect)
            .sum();
        // p-value from the chi-square survival with 19 degrees of freedom.
        let pval = regularized_gamma_q((bins as f64 - 1.0) / 2.0, chi2 / 2.0).unwrap();
        assert!(pval > 0.01, "chi-square p-value {pval} too small (chi2 {chi2})");
    }

    #[test]
    fn interferer_sampler_moments() {
        let p = default_params();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 1_000_000usize;
        let (mut sum_r, mut theta_counts) = (0.0, vec![0u64; 16]);
        for _ in 0..n {
            let (r, th) = sample_interferer(&mut rng, &p);
            assert!((0.0..=p.t_i_km).contains(&r));
            assert!((0.0..2.0 * std::f64::consts::PI).contains(&th));
            sum_r += r;
            let idx = ((th / (2.0 * std::f64::consts::PI) * 16.0) as usize).min(15);
            theta_counts[idx] += 1;
        }
        let se = (p.t_i_km * p.t_i_km / 18.0 / n as f64).sqrt();
        assert!((sum_r / n as f64 - 2.0 * p.t_i_km / 3.0).abs() < 3.0 * se);
        // Azimuth uniformity by chi-square over 16 bins.
        let expect = n as f64 / 16.0;
        let chi2: f64 = theta_counts
            .iter()
            .map(|&c| (c as f64 - expect) * (c as f64 - expect) / expect)
            .sum();
        let pval = regularized_gamma_q(7.5, chi2 / 2.0).unwrap();
        assert!(pval > 0.01, "azimuth chi-square p-value {pval}");
    }

    #[test]
    fn satellite_sampler_support_and_polar_cdf() {
        let p = default_params();
        let s = p.d0_support();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 1_000_000usize;
        let mut thetas = Vec::with_capacity(n);
        for _ in 0..n {
            let (r_s, th, d0) = sample_satellite(&mut rng, &p);
            assert!(r_s >= p.u2_km && r_s <= p.u1_km, "shell radius off support");
            assert!(th >= 0.0 && th <= 0.5 * p.psi_rad + 1e-12);
            let d0sq = d0 * d0;
            assert!(
                d0sq >= s.d0_min_sq_km2 - 1e-6 && d0sq <= s.d0_max_sq_km2 + 1e-6,
                "d0 off its support: {d0}"
            );
            thetas.push(th);
        }
        thetas.sort_by(f64::total_cmp);
        // KS against F(theta) = (1 - cos theta) / (1 - cos(Psi/2)).
        let denom = 1.0 - (0.5 * p.psi_rad).cos();
        let mut ks = 0.0f64;
        for (i, &t) in thetas.iter().enumerate() {
            let f = (1.0 - t.cos()) / denom;
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            ks = ks.max((f - lo).abs()).max((f - hi).abs());
        }
        assert!(ks < 0.01, "polar-angle KS statistic {ks} at 1e6 draws");
    }

    #[test]
    fn shrinking_apex_concentrates_d0() {
        let mut spreads = Vec::new();
        for psi in [
            std::f64::consts::FRAC_PI_3,
            std::f64::consts::FRAC_PI_6,
            std::f64::consts::PI / 12.0,
        ] {
            let p =
                GeometryParams::new(5.0, 20.0, 30.0, 6371.0, 8371.0, 6531.0, psi, 0.01).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(15);
            let n = 100_000usize;
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let (_, _, d0) = sample_satellite(&mut rng, &p);
                s1 += d0;
                s2 += d0 * d0;
            }
            let mean = s1 / n as f64;
            spreads.push((s2 / n as f64 - mean * mean).sqrt());
        }
        assert!(
            spreads[0] > spreads[1] && spreads[1] > spreads[2],
            "d0 spread should shrink with the apex angle: {spreads:?}"
        );
    }

    proptest! {
        #[test]
        fn interferer_distance_triangle_inequality(
            r_i in 0.0f64..1e4, r_int in 0.0f64..1e4,
            theta in 0.0f64..(2.0 * std::f64::consts::PI),
        ) {
            let u = interferer_distance(r_i, r_int, theta);
            let scale = 1e-9 * (1.0 + r_i + r_int);
            prop_assert!(u >= (r_i - r_int).abs() - scale);
            prop_assert!(u <= r_i + r_int + scale);
        }

        #[test]
        fn d0_pdf_nonnegative_everywhere(
            x in 0.0f64..4e7,
            h1 in 1.0f64..50.0,
            psi in 0.01f64..std::f64::consts::PI,
        ) {
            let p = GeometryParams::new(h1, 20.0, 30.0, 6371.0, 8371.0, 6531.0, psi, 0.01).unwrap();
            prop_assert!(d0_squared_pdf(x, &p) >= 0.0);
        }
    }
}
