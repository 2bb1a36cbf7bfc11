//! CQI/MCS table and the SINR → CQI → bits-per-PRB mapping.
//!
//! Every entry of a [`BitsMatrix`](crate::channel::BitsMatrix) is produced
//! by [`cqi_from_sinr`] followed by [`bits_per_prb`]. The table is the
//! 10% BLER operating point; no link-level modelling happens here.

use core::fmt;

use crate::Error;

/// Usable resource elements per PRB per TTI after reference-signal overhead.
pub const RES_PER_PRB: u32 = 120;

/// Air-interface bits of one VoLTE packet (speech plus RLC/MAC overhead).
pub const VOLTE_PACKET_BITS: u32 = 300;

/// Coded speech bits of one AMR-WB 12.65 packet, counted in VoLTE throughput.
pub const VOLTE_PAYLOAD_BITS: u32 = 253;

/// Highest CQI index.
pub const MAX_CQI: u8 = 15;

/// Channel quality indicator, `0..=15`. CQI 0 means "no transmission".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CqiIndex(u8);

impl CqiIndex {
    pub const ZERO: CqiIndex = CqiIndex(0);

    pub fn new(value: u8) -> Result<Self, Error> {
        if value <= MAX_CQI {
            Ok(CqiIndex(value))
        } else {
            Err(Error::InvalidCqi(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// All sixteen indices in increasing order.
    pub fn all() -> impl Iterator<Item = CqiIndex> {
        (0..=MAX_CQI).map(CqiIndex)
    }
}

impl fmt::Display for CqiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One transmitting row of the CQI table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsEntry {
    pub cqi: CqiIndex,
    /// Coded bits per resource element: 2 (QPSK), 4 (16QAM) or 6 (64QAM).
    pub modulation_order: u8,
    pub code_rate_x1024: u16,
    /// Carried for completeness; no scheduler uses it.
    pub beta: f64,
    /// Lowest SINR (dB) at which this entry is selected.
    pub sinr_threshold_db: f64,
}

impl McsEntry {
    /// `floor(120 * Qm * rate / 1024)`.
    pub fn bits_per_prb(&self) -> u32 {
        RES_PER_PRB * self.modulation_order as u32 * self.code_rate_x1024 as u32 / 1024
    }
}

const fn row(cqi: u8, qm: u8, rate: u16, beta: f64, thr: f64) -> McsEntry {
    McsEntry {
        cqi: CqiIndex(cqi),
        modulation_order: qm,
        code_rate_x1024: rate,
        beta,
        sinr_threshold_db: thr,
    }
}

/// Transmitting rows (CQI 1..=15) of the 10% BLER table.
pub const MCS_TABLE: [McsEntry; 15] = [
    row(1, 2, 78, 1.00, -9.478),
    row(2, 2, 120, 1.40, -6.658),
    row(3, 2, 193, 1.40, -4.098),
    row(4, 2, 308, 1.48, -1.798),
    row(5, 2, 449, 1.50, 0.399),
    row(6, 2, 602, 1.62, 2.424),
    row(7, 4, 378, 3.10, 4.489),
    row(8, 4, 490, 4.32, 6.367),
    row(9, 4, 616, 5.37, 8.456),
    row(10, 6, 466, 7.71, 10.266),
    row(11, 6, 567, 15.5, 12.218),
    row(12, 6, 666, 19.6, 14.122),
    row(13, 6, 772, 24.7, 15.849),
    row(14, 6, 873, 27.6, 17.786),
    row(15, 6, 948, 28.0, 19.809),
];

/// Table row for a transmitting CQI; `None` for CQI 0.
pub fn mcs_entry(cqi: CqiIndex) -> Option<&'static McsEntry> {
    match cqi.0 {
        0 => None,
        c => Some(&MCS_TABLE[c as usize - 1]),
    }
}

/// Largest CQI whose threshold is at or below `sinr_db`.
pub fn cqi_from_sinr(sinr_db: f64) -> Result<CqiIndex, Error> {
    if !sinr_db.is_finite() {
        return Err(Error::NonFiniteSinr);
    }
    Ok(cqi_from_finite_sinr(sinr_db))
}

/// Same as [`cqi_from_sinr`] for callers that already hold a finite value.
/// `+inf` saturates at CQI 15, anything else non-finite maps to CQI 0.
pub(crate) fn cqi_from_finite_sinr(sinr_db: f64) -> CqiIndex {
    let above = MCS_TABLE
        .iter()
        .take_while(|e| e.sinr_threshold_db <= sinr_db)
        .count();
    CqiIndex(above as u8)
}

/// Deliverable bits on one PRB for one TTI at the given CQI.
pub fn bits_per_prb(cqi: CqiIndex) -> u32 {
    BITS_PER_PRB[cqi.0 as usize]
}

/// Image of [`bits_per_prb`] over CQI 0..=15.
pub const BITS_PER_PRB: [u32; 16] = {
    let mut out = [0u32; 16];
    let mut i = 0;
    while i < MCS_TABLE.len() {
        let e = &MCS_TABLE[i];
        out[i + 1] = RES_PER_PRB * e.modulation_order as u32 * e.code_rate_x1024 as u32 / 1024;
        i += 1;
    }
    out
};

/// PRBs needed to carry one VoLTE packet on a flat channel at this CQI, or
/// `None` when the CQI cannot carry anything.
pub fn prbs_for_voice_packet(cqi: CqiIndex) -> Option<u32> {
    match bits_per_prb(cqi) {
        0 => None,
        b => Some(VOLTE_PACKET_BITS.div_ceil(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cqi(v: u8) -> CqiIndex {
        CqiIndex::new(v).unwrap()
    }

    #[test]
    fn worked_bit_counts() {
        assert_eq!(bits_per_prb(cqi(15)), 666);
        assert_eq!(bits_per_prb(cqi(7)), 177);
        assert_eq!(bits_per_prb(cqi(1)), 18);
        assert_eq!(bits_per_prb(cqi(0)), 0);
    }

    #[test]
    fn const_table_matches_entries() {
        for e in MCS_TABLE.iter() {
            assert_eq!(BITS_PER_PRB[e.cqi.value() as usize], e.bits_per_prb());
        }
    }

    #[test]
    fn sinr_lookup() {
        assert_eq!(cqi_from_sinr(-12.0).unwrap(), cqi(0));
        assert_eq!(cqi_from_sinr(-9.478).unwrap(), cqi(1));
        assert_eq!(cqi_from_sinr(0.0).unwrap(), cqi(4));
        assert_eq!(cqi_from_sinr(25.0).unwrap(), cqi(15));
        assert!(cqi_from_sinr(f64::NAN).is_err());
        assert!(cqi_from_sinr(f64::INFINITY).is_err());
    }

    #[test]
    fn threshold_boundaries() {
        for e in MCS_TABLE.iter() {
            let c = e.cqi.value();
            assert_eq!(cqi_from_sinr(e.sinr_threshold_db).unwrap().value(), c);
            assert_eq!(cqi_from_sinr(e.sinr_threshold_db - 1e-9).unwrap().value(), c - 1);
        }
    }

    #[test]
    fn voice_packet_prbs() {
        assert_eq!(prbs_for_voice_packet(cqi(15)), Some(1));
        assert_eq!(prbs_for_voice_packet(cqi(7)), Some(2));
        assert_eq!(prbs_for_voice_packet(cqi(1)), Some(17));
        assert_eq!(prbs_for_voice_packet(cqi(0)), None);
        for c in 1..=MAX_CQI {
            let b = bits_per_prb(cqi(c));
            let n = prbs_for_voice_packet(cqi(c)).unwrap();
            assert!(n * b >= VOLTE_PACKET_BITS);
            assert!((n - 1) * b < VOLTE_PACKET_BITS);
        }
    }

    #[test]
    fn table_is_monotone() {
        for w in MCS_TABLE.windows(2) {
            assert!(w[0].cqi < w[1].cqi);
            assert!(w[0].sinr_threshold_db < w[1].sinr_threshold_db);
        }
        for w in BITS_PER_PRB.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert!(CqiIndex::new(16).is_err());
    }
}
