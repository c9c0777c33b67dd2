//! Hexagonal-lattice geometry: site layouts, wraparound images, sector
//! wedges, and the 3-sector antenna pattern.

use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn angle_deg(self) -> f64 {
        self.y.atan2(self.x).to_degrees()
    }
}

fn axial_to_cartesian(q: i32, r: i32, isd: f64) -> Vec2 {
    Vec2::new(isd * (q as f64 + r as f64 / 2.0), isd * 3f64.sqrt() / 2.0 * r as f64)
}

/// Hexagonal layout of `1 + 3 rings (rings+1) rings` sites: the center plus
/// full rings at increasing distance. Ring 1 holds the 6 nearest sites.
pub fn hex_sites(rings: usize, isd: f64) -> Vec<Vec2> {
    let mut out = vec![Vec2::new(0.0, 0.0)];
    // walk each ring counterclockwise starting from its +x corner
    let walk = [(-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)];
    for ring in 1..=rings as i32 {
        let (mut q, mut r) = (ring, 0);
        for (dq, dr) in walk {
            for _ in 0..ring {
                out.push(axial_to_cartesian(q, r, isd));
                q += dq;
                r += dr;
            }
        }
    }
    out
}

/// The seven wraparound displacement images (origin first) for a layout of
/// `n = i^2 + i j + j^2` cells.
pub fn wrap_offsets(i: i32, j: i32, isd: f64) -> Vec<Vec2> {
    let mut out = vec![Vec2::new(0.0, 0.0)];
    let (mut q, mut r) = (i, j);
    for _ in 0..6 {
        out.push(axial_to_cartesian(q, r, isd));
        // rotate the axial vector by 60 degrees
        let (nq, nr) = (-r, q + r);
        q = nq;
        r = nr;
    }
    out
}

/// Point-in-hexagon test for the Voronoi cell of a site (flat edges facing
/// the six neighbors, inradius isd/2).
pub fn in_hex_cell(p: Vec2, isd: f64) -> bool {
    let inradius = isd / 2.0 + 1e-9;
    let axes = [0f64, 60.0, 120.0];
    axes.iter().all(|a| {
        let rad = a.to_radians();
        (p.x * rad.cos() + p.y * rad.sin()).abs() <= inradius
    })
}

pub fn wrap_angle_deg(a: f64) -> f64 {
    let mut x = a % 360.0;
    if x > 180.0 {
        x -= 360.0;
    }
    if x < -180.0 {
        x += 360.0;
    }
    x
}

/// 3-sector parabolic antenna pattern: attenuation relative to boresight in
/// dB (nonpositive), with a 70 degree 3 dB beamwidth and a 20 dB backlobe
/// floor.
pub fn sector_pattern_db(offset_deg: f64) -> f64 {
    let theta = wrap_angle_deg(offset_deg);
    -(12.0 * (theta / 70.0) * (theta / 70.0)).min(20.0)
}

/// Uniform sample over the intersection of the site's hex cell with the
/// 120-degree wedge of the given boresight (position relative to the site).
pub fn sample_in_sector<R: Rng>(rng: &mut R, boresight_deg: f64, isd: f64) -> Vec2 {
    let circum = isd / 3f64.sqrt();
    loop {
        let p = Vec2::new(
            (rng.gen::<f64>() * 2.0 - 1.0) * circum,
            (rng.gen::<f64>() * 2.0 - 1.0) * circum,
        );
        if !in_hex_cell(p, isd) {
            continue;
        }
        if wrap_angle_deg(p.angle_deg() - boresight_deg).abs() <= 60.0 && p.norm() > 0.0 {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hex_layout_counts() {
        assert_eq!(hex_sites(1, 500.0).len(), 7);
        assert_eq!(hex_sites(2, 500.0).len(), 19);
        // ring 1 sits at the inter-site distance
        for site in &hex_sites(1, 500.0)[1..] {
            assert_relative_eq!(site.norm(), 500.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn wrap_offsets_have_cluster_magnitude() {
        for (i, j, n) in [(3, 2, 19.0f64), (2, 1, 7.0)] {
            let offs = wrap_offsets(i, j, 500.0);
            assert_eq!(offs.len(), 7);
            assert_relative_eq!(offs[0].norm(), 0.0);
            for o in &offs[1..] {
                assert_relative_eq!(o.norm(), 500.0 * n.sqrt(), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn pattern_values() {
        assert_relative_eq!(sector_pattern_db(0.0), 0.0);
        assert_relative_eq!(sector_pattern_db(70.0), -12.0);
        assert_relative_eq!(sector_pattern_db(180.0), -20.0);
        assert_relative_eq!(sector_pattern_db(-35.0), -3.0);
    }

    #[test]
    fn sector_samples_stay_in_wedge_and_cell() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &bore in &[0.0, 120.0, 240.0] {
            for _ in 0..200 {
                let p = sample_in_sector(&mut rng, bore, 500.0);
                assert!(in_hex_cell(p, 500.0));
                assert!(wrap_angle_deg(p.angle_deg() - bore).abs() <= 60.0);
                assert!(p.norm() <= 500.0 / 3f64.sqrt() + 1e-9);
            }
        }
    }
}
