//! User drops, ETU frequency-selective Rayleigh fading, multi-cell
//! interference and the per-PRB SINR and bits matrices.
//!
//! Everything here is a pure function of a seed and parameters. The serving
//! site sits at the origin; 18 interferers occupy the first two rings of a
//! hexagonal lattice with inter-site distance `sqrt(3) * R`. Neighbour cells
//! transmit on every PRB at all times, so SINR does not depend on their
//! scheduling decisions.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ratemap::{bits_per_prb, cqi_from_finite_sinr, CqiIndex};
use crate::Error;

/// Subcarriers per PRB.
pub const SUBCARRIERS_PER_PRB: usize = 12;
/// OFDM subcarrier spacing in Hz.
pub const SUBCARRIER_SPACING_HZ: f64 = 15_000.0;
/// Number of interfering sites (hex rings 1 and 2).
pub const NUM_INTERFERERS: usize = 18;
/// Cell radius used throughout the evaluation.
pub const DEFAULT_CELL_RADIUS_M: f64 = 288.0;
pub const DEFAULT_PATHLOSS_EXPONENT: f64 = 3.8;
/// Distances are floored here so a user on top of a site stays finite.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// SplitMix64 finaliser.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a root seed and a path of indices.
///
/// Each component is folded in with one SplitMix64 round, so
/// `mix_seed(s, &[a, b])` and `mix_seed(s, &[b, a])` differ, and adjacent
/// indices give unrelated streams.
pub fn mix_seed(root: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(root), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UserKind {
    Volte,
    Data,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct User {
    pub position: Point,
    pub kind: UserKind,
}

/// Tapped-delay-line power profile. Linear powers are normalised to unit
/// sum when fading is drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    taps: Vec<(u32, f64)>,
}

/// Extended Typical Urban tap delays (ns).
pub const ETU_DELAYS_NS: [u32; 9] = [0, 50, 120, 200, 230, 500, 1600, 2300, 5000];
/// Extended Typical Urban tap powers (dB). The last tap is -7 dB.
pub const ETU_POWERS_DB: [f64; 9] = [-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0];

impl PowerDelayProfile {
    /// Taps as `(delay_ns, average_power_db)`; delays must start at 0 and
    /// increase strictly.
    pub fn new(taps: Vec<(u32, f64)>) -> Result<Self, Error> {
        let valid = !taps.is_empty()
            && taps[0].0 == 0
            && taps.windows(2).all(|w| w[0].0 < w[1].0)
            && taps.iter().all(|t| t.1.is_finite());
        if !valid {
            return Err(Error::InvalidProfile);
        }
        Ok(PowerDelayProfile { taps })
    }

    /// The 9-tap ETU profile.
    pub fn etu() -> Self {
        Self::etu_with_powers(ETU_POWERS_DB).expect("ETU constants are valid")
    }

    /// ETU delays with overridden tap powers.
    pub fn etu_with_powers(powers_db: [f64; 9]) -> Result<Self, Error> {
        Self::new(ETU_DELAYS_NS.iter().copied().zip(powers_db).collect())
    }

    /// Single tap at zero delay: frequency-flat Rayleigh fading.
    pub fn flat() -> Self {
        PowerDelayProfile { taps: vec![(0, 0.0)] }
    }

    pub fn taps(&self) -> &[(u32, f64)] {
        &self.taps
    }

    /// Tap powers in linear scale, summing to one.
    pub fn normalized_powers(&self) -> Vec<f64> {
        let lin: Vec<f64> = self.taps.iter().map(|t| libm::pow(10.0, t.1 / 10.0)).collect();
        let total: f64 = lin.iter().sum();
        lin.into_iter().map(|p| p / total).collect()
    }

    pub fn max_delay_ns(&self) -> u32 {
        self.taps.last().map_or(0, |t| t.0)
    }
}

impl Default for PowerDelayProfile {
    fn default() -> Self {
        Self::etu()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub serving_site: Point,
    pub interferer_sites: Vec<Point>,
    /// VoLTE users first, then data users.
    pub users: Vec<User>,
    pub cell_radius_m: f64,
    pub pathloss_exponent: f64,
}

impl Topology {
    pub fn num_volte(&self) -> usize {
        self.users.iter().filter(|u| u.kind == UserKind::Volte).count()
    }

    pub fn num_data(&self) -> usize {
        self.users.len() - self.num_volte()
    }
}

/// Rings 1 and 2 of a hexagonal lattice around the origin.
pub fn hex_interferer_sites(inter_site_distance: f64) -> Vec<Point> {
    let d = inter_site_distance;
    let mut sites = Vec::with_capacity(NUM_INTERFERERS);
    // Ring 1 and the ring-2 corners lie on the six lattice directions.
    for ring in 1..=2 {
        for k in 0..6 {
            let a = PI / 3.0 * k as f64 + PI / 6.0;
            sites.push(Point::new(ring as f64 * d * libm::cos(a), ring as f64 * d * libm::sin(a)));
        }
    }
    // Ring-2 edge midpoints at sqrt(3) * d, rotated by 30 degrees.
    for k in 0..6 {
        let a = PI / 3.0 * k as f64;
        let r = libm::sqrt(3.0) * d;
        sites.push(Point::new(r * libm::cos(a), r * libm::sin(a)));
    }
    sites
}

/// Drops users uniformly over the serving disk.
pub fn build_topology(
    seed: u64,
    num_volte: usize,
    num_data: usize,
    cell_radius_m: f64,
    pathloss_exponent: f64,
) -> Result<Topology, Error> {
    if !(cell_radius_m > 0.0 && cell_radius_m.is_finite()) {
        return Err(Error::InvalidParameter("cell radius must be positive"));
    }
    if !(pathloss_exponent > 2.0 && pathloss_exponent.is_finite()) {
        return Err(Error::InvalidParameter("path-loss exponent must exceed 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = (0..num_volte + num_data)
        .map(|i| {
            let r = cell_radius_m * libm::sqrt(rng.random::<f64>());
            let theta = 2.0 * PI * rng.random::<f64>();
            User {
                position: Point::new(r * libm::cos(theta), r * libm::sin(theta)),
                kind: if i < num_volte { UserKind::Volte } else { UserKind::Data },
            }
        })
        .collect();
    Ok(Topology {
        serving_site: Point::ORIGIN,
        interferer_sites: hex_interferer_sites(libm::sqrt(3.0) * cell_radius_m),
        users,
        cell_radius_m,
        pathloss_exponent,
    })
}

/// Per-link, per-PRB fading power gains. A "link" is one (receiver,
/// transmitter) pair; links are independent.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingGains {
    num_prb: usize,
    num_links: usize,
    gains: Vec<f64>,
}

impl FadingGains {
    pub fn num_prb(&self) -> usize {
        self.num_prb
    }

    pub fn num_links(&self) -> usize {
        self.num_links
    }

    /// PRB gains of one link.
    pub fn link(&self, index: usize) -> &[f64] {
        &self.gains[index * self.num_prb..(index + 1) * self.num_prb]
    }

    /// Unit gain on every PRB of every link.
    pub fn unit(num_prb: usize, num_links: usize) -> Self {
        FadingGains {
            num_prb,
            num_links,
            gains: vec![1.0; num_prb * num_links],
        }
    }

    pub fn from_vec(num_prb: usize, num_links: usize, gains: Vec<f64>) -> Result<Self, Error> {
        if gains.len() != num_prb * num_links {
            return Err(Error::DimensionMismatch);
        }
        Ok(FadingGains { num_prb, num_links, gains })
    }
}

/// Draws `num_links` independent Rayleigh channels and reduces each to
/// per-PRB power gains (mean `|H|^2` over the PRB's 12 subcarriers).
pub fn draw_fading(
    seed: u64,
    profile: &PowerDelayProfile,
    num_prb: usize,
    num_links: usize,
) -> Result<FadingGains, Error> {
    if num_prb == 0 {
        return Err(Error::InvalidParameter("at least one PRB is required"));
    }
    let powers = profile.normalized_powers();
    let taps = powers.len();
    let num_sc = num_prb * SUBCARRIERS_PER_PRB;

    // exp(-j 2 pi f tau) for every (subcarrier, tap).
    let mut phasors = Vec::with_capacity(num_sc * taps);
    for sc in 0..num_sc {
        let f = sc as f64 * SUBCARRIER_SPACING_HZ;
        for &(delay_ns, _) in profile.taps() {
            let phase = -2.0 * PI * f * delay_ns as f64 * 1e-9;
            phasors.push((libm::cos(phase), libm::sin(phase)));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tap_gains = vec![(0.0, 0.0); taps];
    let mut gains = Vec::with_capacity(num_links * num_prb);
    for _ in 0..num_links {
        for (g, &p) in tap_gains.iter_mut().zip(&powers) {
            let s = libm::sqrt(p / 2.0);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *g = (s * re, s * im);
        }
        for prb in 0..num_prb {
            let mut acc = 0.0;
            for sc in prb * SUBCARRIERS_PER_PRB..(prb + 1) * SUBCARRIERS_PER_PRB {
                let row = &phasors[sc * taps..(sc + 1) * taps];
                let (mut hr, mut hi) = (0.0, 0.0);
                for (&(gr, gi), &(pr, pi)) in tap_gains.iter().zip(row) {
                    hr += gr * pr - gi * pi;
                    hi += gr * pi + gi * pr;
                }
                acc += hr * hr + hi * hi;
            }
            gains.push(acc / SUBCARRIERS_PER_PRB as f64);
        }
    }
    Ok(FadingGains { num_prb, num_links, gains })
}

/// Transmit and noise powers in consistent linear units.
///
/// Path loss is `d^-alpha` with no reference constant, so only ratios
/// matter. By default all 19 sites transmit at the same power and the noise
/// floor sits well below the cell-edge signal, so the layout is
/// interference limited with a median user SINR near 3 dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub tx_power: f64,
    /// Per-site transmit power of the 18 neighbour cells.
    pub interferer_tx_power: f64,
    pub noise_power: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            tx_power: 1.0,
            interferer_tx_power: DEFAULT_INTERFERER_TX_POWER,
            noise_power: DEFAULT_NOISE_POWER,
        }
    }
}

/// Neighbour-cell transmit power relative to the serving cell.
pub const DEFAULT_INTERFERER_TX_POWER: f64 = 1.0;
/// About 16 dB below the received signal at the 288 m cell edge with
/// alpha = 3.8.
pub const DEFAULT_NOISE_POWER: f64 = 1.0e-11;

/// Links per user in a SINR computation: serving site plus interferers.
pub fn links_per_user(topology: &Topology) -> usize {
    1 + topology.interferer_sites.len()
}

/// Per-PRB, per-user SINR in dB. Row = PRB, column = user.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrMatrix {
    num_prb: usize,
    num_users: usize,
    values_db: Vec<f64>,
}

impl SinrMatrix {
    pub fn from_vec(num_prb: usize, num_users: usize, values_db: Vec<f64>) -> Result<Self, Error> {
        if values_db.len() != num_prb * num_users {
            return Err(Error::DimensionMismatch);
        }
        if values_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSinr);
        }
        Ok(SinrMatrix { num_prb, num_users, values_db })
    }

    pub fn num_prb(&self) -> usize {
        self.num_prb
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn get(&self, prb: usize, user: usize) -> f64 {
        self.values_db[prb * self.num_users + user]
    }

    pub fn values_db(&self) -> &[f64] {
        &self.values_db
    }
}

/// Combines geometry and fading into SINR.
///
/// `fading` must hold `links_per_user(topology)` consecutive links per
/// user: link 0 is the serving site, link `1 + j` interferer `j`.
pub fn compute_sinr_matrix(
    topology: &Topology,
    fading: &FadingGains,
    radio: &RadioParams,
) -> Result<SinrMatrix, Error> {
    let links = links_per_user(topology);
    let num_users = topology.users.len();
    if fading.num_links() != num_users * links {
        return Err(Error::DimensionMismatch);
    }
    let num_prb = fading.num_prb();
    let alpha = topology.pathloss_exponent;
    let mut values_db = vec![0.0; num_prb * num_users];
    for (u, user) in topology.users.iter().enumerate() {
        let path_gain =
            |site: Point| libm::pow(user.position.distance(site).max(MIN_DISTANCE_M), -alpha);
        let signal = radio.tx_power * path_gain(topology.serving_site);
        let interferer_gain: Vec<f64> = topology
            .interferer_sites
            .iter()
            .map(|&s| radio.interferer_tx_power * path_gain(s))
            .collect();
        let serving = fading.link(u * links);
        for n in 0..num_prb {
            let interference: f64 = interferer_gain
                .iter()
                .enumerate()
                .map(|(j, g)| g * fading.link(u * links + 1 + j)[n])
                .sum();
            let mut sinr = signal * serving[n] / (interference + radio.noise_power);
            if !sinr.is_finite() {
                sinr = f64::MAX;
            }
            values_db[n * num_users + u] = 10.0 * libm::log10(sinr.max(f64::MIN_POSITIVE));
        }
    }
    Ok(SinrMatrix { num_prb, num_users, values_db })
}

/// Deliverable bits `B[n][u]` for one TTI. Row = PRB, column = user, with
/// VoLTE users in the leading columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitsMatrix {
    num_prb: usize,
    num_users: usize,
    bits: Vec<u32>,
}

impl BitsMatrix {
    pub fn from_vec(num_prb: usize, num_users: usize, bits: Vec<u32>) -> Result<Self, Error> {
        if bits.len() != num_prb * num_users {
            return Err(Error::DimensionMismatch);
        }
        Ok(BitsMatrix { num_prb, num_users, bits })
    }

    /// Builds from per-PRB rows.
    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R]) -> Result<Self, Error> {
        let num_users = rows.first().map_or(0, |r| r.as_ref().len());
        let mut bits = Vec::with_capacity(rows.len() * num_users);
        for r in rows {
            if r.as_ref().len() != num_users {
                return Err(Error::DimensionMismatch);
            }
            bits.extend_from_slice(r.as_ref());
        }
        Ok(BitsMatrix { num_prb: rows.len(), num_users, bits })
    }

    pub fn from_fn(num_prb: usize, num_users: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut bits = Vec::with_capacity(num_prb * num_users);
        for n in 0..num_prb {
            for u in 0..num_users {
                bits.push(f(n, u));
            }
        }
        BitsMatrix { num_prb, num_users, bits }
    }

    pub fn num_prb(&self) -> usize {
        self.num_prb
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    #[inline]
    pub fn get(&self, prb: usize, user: usize) -> u32 {
        self.bits[prb * self.num_users + user]
    }

    /// Bits of every user on one PRB.
    pub fn prb_row(&self, prb: usize) -> &[u32] {
        &self.bits[prb * self.num_users..(prb + 1) * self.num_users]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.bits
    }

    /// Sum of a user's bits over the whole band.
    pub fn full_band_bits(&self, user: usize) -> u64 {
        (0..self.num_prb).map(|n| self.get(n, user) as u64).sum()
    }
}

/// Elementwise SINR → CQI → bits.
pub fn bits_matrix(sinr: &SinrMatrix) -> BitsMatrix {
    BitsMatrix {
        num_prb: sinr.num_prb,
        num_users: sinr.num_users,
        bits: sinr
            .values_db
            .iter()
            .map(|&s| bits_per_prb(cqi_from_finite_sinr(s)))
            .collect(),
    }
}

/// CQI of every entry, same layout as the SINR matrix.
pub fn cqi_matrix(sinr: &SinrMatrix) -> Vec<CqiIndex> {
    sinr.values_db.iter().map(|&s| cqi_from_finite_sinr(s)).collect()
}

/// Bundle of inputs needed to turn a dropped topology into bits matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub profile: PowerDelayProfile,
    pub radio: RadioParams,
}

impl Default for ChannelModel {
    fn default() -> Self {
        ChannelModel {
            profile: PowerDelayProfile::etu(),
            radio: RadioParams::default(),
        }
    }
}

impl ChannelModel {
    /// SINR for one fading realisation of `topology`.
    pub fn sinr(&self, seed: u64, topology: &Topology, num_prb: usize) -> Result<SinrMatrix, Error> {
        let links = topology.users.len() * links_per_user(topology);
        let fading = draw_fading(seed, &self.profile, num_prb, links)?;
        compute_sinr_matrix(topology, &fading, &self.radio)
    }

    pub fn bits(&self, seed: u64, topology: &Topology, num_prb: usize) -> Result<BitsMatrix, Error> {
        Ok(bits_matrix(&self.sinr(seed, topology, num_prb)?))
    }
}
