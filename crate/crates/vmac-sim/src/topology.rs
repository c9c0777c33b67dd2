//! Network layout: macro sites with 3 sectors each, optional picos, the
//! wraparound images, and the C-RAN cluster membership.

use crate::config::{Mode, SimConfig};
use crate::geometry::{hex_sites, sample_in_sector, wrap_offsets, Vec2};
use crate::rng::{stream, TAG_TOPOLOGY};
use rand::Rng;

pub const SECTOR_BORESIGHTS_DEG: [f64; 3] = [0.0, 120.0, 240.0];

#[derive(Debug, Clone)]
pub struct Sector {
    pub site: usize,
    pub boresight_deg: f64,
}

/// Base stations are indexed globally: all macro sectors first (site-major),
/// then all picos.
#[derive(Debug, Clone)]
pub struct NetworkTopology {
    pub mode: Mode,
    pub sites: Vec<Vec2>,
    pub sectors: Vec<Sector>,
    pub picos: Vec<Vec2>,
    /// Home (site, sector-of-site) of each pico.
    pub pico_home: Vec<(usize, usize)>,
    pub wrap_offsets: Vec<Vec2>,
    /// Global BS ids in the C-RAN cluster (macro sectors then picos).
    pub cluster_bs: Vec<usize>,
    pub cluster_macro_bs: Vec<usize>,
    pub cluster_pico_bs: Vec<usize>,
    /// Macro cells whose users the cluster serves.
    pub cluster_cells: usize,
    pub isd_m: f64,
}

impl NetworkTopology {
    pub fn num_bs(&self) -> usize {
        self.sectors.len() + self.picos.len()
    }

    pub fn bs_position(&self, bs: usize) -> Vec2 {
        if bs < self.sectors.len() {
            self.sites[self.sectors[bs].site]
        } else {
            self.picos[bs - self.sectors.len()]
        }
    }

    pub fn is_pico(&self, bs: usize) -> bool {
        bs >= self.sectors.len()
    }

    /// Site index used for shadowing correlation (picos count as their own
    /// sites).
    pub fn shadow_site(&self, bs: usize) -> usize {
        if bs < self.sectors.len() {
            self.sectors[bs].site
        } else {
            self.sites.len() + (bs - self.sectors.len())
        }
    }

    pub fn num_shadow_sites(&self) -> usize {
        self.sites.len() + self.picos.len()
    }
}

/// Builds the hexagonal layout with wraparound: 19 sites with the central
/// 7 cells as the cluster in multicell mode; 7 sites with picos and the
/// central cell as the cluster in hetnet mode. Deterministic in the seed.
pub fn generate_topology(config: &SimConfig) -> NetworkTopology {
    let isd = config.isd_m;
    let (rings, wrap_ij) = match config.mode {
        Mode::Multicell => (2, (3, 2)),
        Mode::Hetnet => (1, (2, 1)),
    };
    let sites = hex_sites(rings, isd);
    let sectors: Vec<Sector> = sites
        .iter()
        .enumerate()
        .flat_map(|(s, _)| {
            SECTOR_BORESIGHTS_DEG.iter().map(move |&b| Sector { site: s, boresight_deg: b })
        })
        .collect();

    let mut picos = Vec::new();
    let mut pico_home = Vec::new();
    if config.mode == Mode::Hetnet {
        let mut rng = stream(config.seed, &[TAG_TOPOLOGY]);
        for (s, &site) in sites.iter().enumerate() {
            for (k, &bore) in SECTOR_BORESIGHTS_DEG.iter().enumerate() {
                for _ in 0..config.picos_per_sector {
                    let pos = place_pico(&mut rng, site, bore, isd, config.min_bs_separation_m, &sites, &picos);
                    picos.push(pos);
                    pico_home.push((s, k));
                }
            }
        }
    }

    let n_sectors = sectors.len();
    let (cluster_macro_bs, cluster_pico_bs, cluster_cells) = match config.mode {
        Mode::Multicell => {
            // central cell plus the first ring
            let macro_bs: Vec<usize> = (0..7).flat_map(|s| (0..3).map(move |k| s * 3 + k)).collect();
            (macro_bs, Vec::new(), 7)
        }
        Mode::Hetnet => {
            let macro_bs: Vec<usize> = (0..3).collect();
            let pico_bs: Vec<usize> = pico_home
                .iter()
                .enumerate()
                .filter(|(_, (s, _))| *s == 0)
                .map(|(p, _)| n_sectors + p)
                .collect();
            (macro_bs, pico_bs, 1)
        }
    };
    let mut cluster_bs = cluster_macro_bs.clone();
    cluster_bs.extend(&cluster_pico_bs);

    NetworkTopology {
        mode: config.mode,
        sites,
        sectors,
        picos,
        pico_home,
        wrap_offsets: wrap_offsets(wrap_ij.0, wrap_ij.1, isd),
        cluster_bs,
        cluster_macro_bs,
        cluster_pico_bs,
        cluster_cells,
        isd_m: isd,
    }
}

fn place_pico<R: Rng>(
    rng: &mut R,
    site: Vec2,
    boresight: f64,
    isd: f64,
    min_sep: f64,
    sites: &[Vec2],
    picos: &[Vec2],
) -> Vec2 {
    for _ in 0..100_000 {
        let pos = site.add(sample_in_sector(rng, boresight, isd));
        let clear_sites = sites.iter().all(|&s| pos.sub(s).norm() >= min_sep);
        let clear_picos = picos.iter().all(|&p| pos.sub(p).norm() >= min_sep);
        if clear_sites && clear_picos {
            return pos;
        }
    }
    panic!("could not place a pico respecting the minimum BS separation");
}
