//! One channel realization: user placement, large-scale link gains with
//! correlated shadowing and wraparound, per-link phases, strongest-gain
//! association, and the proportional-fair averaging state.

use crate::config::{db_to_linear, SimConfig};
use crate::geometry::{sample_in_sector, sector_pattern_db, wrap_angle_deg, Vec2};
use crate::rng::{stream, TAG_PHASES, TAG_SHADOWING, TAG_USER_POS};
use crate::topology::{NetworkTopology, SECTOR_BORESIGHTS_DEG};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::TAU;

#[derive(Debug, Clone)]
pub struct Drop {
    pub user_pos: Vec<Vec2>,
    /// Geometric sector each user was dropped in (global BS id).
    pub user_home_sector: Vec<usize>,
    /// Linear power gain, user-major: `gains[u * num_bs + b]`.
    pub gains: Vec<f64>,
    /// Per-link phase in radians, same indexing.
    pub phases: Vec<f64>,
    /// Serving BS of each user (strongest gain).
    pub association: Vec<usize>,
    /// Users served by each BS, ascending user index.
    pub served_users: Vec<Vec<usize>>,
    /// Exponentially averaged long-term rate per user (Mbps).
    pub pf_avg_mbps: Vec<f64>,
    num_bs: usize,
}

impl Drop {
    pub fn num_users(&self) -> usize {
        self.user_pos.len()
    }

    #[inline]
    pub fn gain(&self, user: usize, bs: usize) -> f64 {
        self.gains[user * self.num_bs + bs]
    }

    #[inline]
    pub fn phase(&self, user: usize, bs: usize) -> f64 {
        self.phases[user * self.num_bs + bs]
    }

    /// Proportional-fair weight: reciprocal of the floored average rate.
    pub fn pf_weight(&self, user: usize, floor_mbps: f64) -> f64 {
        1.0 / self.pf_avg_mbps[user].max(floor_mbps)
    }

    /// Users associated with a cluster BS; these are the users the central
    /// processor decodes and reports on.
    pub fn cluster_users(&self, topo: &NetworkTopology) -> Vec<usize> {
        let mut in_cluster = vec![false; topo.num_bs()];
        for &b in &topo.cluster_bs {
            in_cluster[b] = true;
        }
        (0..self.num_users()).filter(|&u| in_cluster[self.association[u]]).collect()
    }
}

/// Correlated log-normal shadowing in dB, user-major over shadow sites:
/// every pair of links of one user has the configured correlation.
fn shadow_matrix<R: Rng>(
    rng: &mut R,
    n_users: usize,
    n_sites: usize,
    rho: f64,
) -> Vec<f64> {
    let mut out = vec![0.0; n_users * n_sites];
    let common_w = rho.sqrt();
    let indep_w = (1.0 - rho).sqrt();
    for u in 0..n_users {
        let common: f64 = StandardNormal.sample(rng);
        for s in 0..n_sites {
            let indep: f64 = StandardNormal.sample(rng);
            out[u * n_sites + s] = common_w * common + indep_w * indep;
        }
    }
    out
}

fn path_loss_db(config: &SimConfig, pico: bool, distance_m: f64) -> f64 {
    let d_km = distance_m.max(config.min_link_distance_m) / 1000.0;
    if pico {
        config.pl_pico_const_db + config.pl_pico_slope_db * d_km.log10()
    } else {
        config.pl_macro_const_db + config.pl_macro_slope_db * d_km.log10()
    }
}

/// Best geometric gain over the wraparound images of a BS: path loss plus
/// the sector pattern for macro sectors, omnidirectional for picos.
fn geometric_gain_db(
    config: &SimConfig,
    topo: &NetworkTopology,
    user: Vec2,
    bs: usize,
) -> f64 {
    let base = topo.bs_position(bs);
    let pico = topo.is_pico(bs);
    let mut best = f64::NEG_INFINITY;
    for &off in &topo.wrap_offsets {
        let pos = base.add(off);
        let rel = user.sub(pos);
        let mut g = -path_loss_db(config, pico, rel.norm());
        if !pico {
            let off_bore = wrap_angle_deg(rel.angle_deg() - topo.sectors[bs].boresight_deg);
            g += sector_pattern_db(off_bore);
        }
        if g > best {
            best = g;
        }
    }
    best + config.antenna_gain_dbi
}

/// Drops users uniformly in every macro sector, draws shadowing and phases,
/// and associates each user with the strongest link.
pub fn realize_drop(topo: &NetworkTopology, config: &SimConfig, drop_seed: u64) -> Drop {
    let mut pos_rng = stream(config.seed, &[TAG_USER_POS, drop_seed]);
    let mut user_pos = Vec::new();
    let mut user_home_sector = Vec::new();
    for (b, sector) in topo.sectors.iter().enumerate() {
        let site = topo.sites[sector.site];
        for _ in 0..config.users_per_sector {
            let local = sample_in_sector(&mut pos_rng, sector.boresight_deg, topo.isd_m);
            user_pos.push(site.add(local));
            user_home_sector.push(b);
        }
    }
    debug_assert_eq!(
        SECTOR_BORESIGHTS_DEG.len() * topo.sites.len() * config.users_per_sector,
        user_pos.len()
    );

    let n_users = user_pos.len();
    let num_bs = topo.num_bs();
    let mut shadow_rng = stream(config.seed, &[TAG_SHADOWING, drop_seed]);
    let shadows = shadow_matrix(
        &mut shadow_rng,
        n_users,
        topo.num_shadow_sites(),
        config.shadow_correlation,
    );
    let mut phase_rng = stream(config.seed, &[TAG_PHASES, drop_seed]);

    let mut gains = vec![0.0; n_users * num_bs];
    let mut phases = vec![0.0; n_users * num_bs];
    for u in 0..n_users {
        for b in 0..num_bs {
            let sigma = if topo.is_pico(b) {
                config.shadow_sigma_pico_db
            } else {
                config.shadow_sigma_macro_db
            };
            let shadow_db = sigma * shadows[u * topo.num_shadow_sites() + topo.shadow_site(b)];
            let g_db = geometric_gain_db(config, topo, user_pos[u], b) - shadow_db;
            gains[u * num_bs + b] = db_to_linear(g_db);
            phases[u * num_bs + b] = phase_rng.gen::<f64>() * TAU;
        }
    }

    let mut association = vec![0usize; n_users];
    let mut served_users = vec![Vec::new(); num_bs];
    for u in 0..n_users {
        let mut best = 0;
        for b in 1..num_bs {
            if gains[u * num_bs + b] > gains[u * num_bs + best] {
                best = b;
            }
        }
        association[u] = best;
        served_users[best].push(u);
    }

    Drop {
        user_pos,
        user_home_sector,
        gains,
        phases,
        association,
        served_users,
        pf_avg_mbps: vec![0.0; n_users],
        num_bs,
    }
}

/// Exponential update of the long-term average rates: scheduled users move
/// toward their slot rate, everyone else decays toward zero.
pub fn update_pf_state(drop: &mut Drop, slot_rates_mbps: &[(usize, f64)], epsilon: f64) {
    debug_assert!(epsilon > 0.0 && epsilon < 1.0);
    for avg in &mut drop.pf_avg_mbps {
        *avg *= 1.0 - epsilon;
    }
    for &(user, rate) in slot_rates_mbps {
        drop.pf_avg_mbps[user] += epsilon * rate;
    }
}
