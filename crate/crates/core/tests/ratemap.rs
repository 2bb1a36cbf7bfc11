use proptest::prelude::*;
use volte_core::ratemap::{bits_per_prb, cqi_from_sinr, prbs_for_voice_packet, CqiIndex, MCS_TABLE, VOLTE_PACKET_BITS};

#[test]
fn table_rows_follow_the_re_formula() {
    for e in &MCS_TABLE {
        let exact = 120.0 * e.modulation_order as f64 * e.code_rate_x1024 as f64 / 1024.0;
        assert_eq!(e.bits_per_prb(), exact.floor() as u32);
        assert_eq!(bits_per_prb(e.cqi), e.bits_per_prb());
    }
}

#[test]
fn reference_values() {
    let b = |c| bits_per_prb(CqiIndex::new(c).unwrap());
    assert_eq!((b(15), b(7), b(1), b(0)), (666, 177, 18, 0));
    assert_eq!(prbs_for_voice_packet(CqiIndex::new(1).unwrap()), Some(17));
    assert_eq!(prbs_for_voice_packet(CqiIndex::new(15).unwrap()), Some(1));
    assert_eq!(prbs_for_voice_packet(CqiIndex::ZERO), None);
}

proptest! {
    #[test]
    fn cqi_and_bits_are_monotone(a in -30.0f64..40.0, b in -30.0f64..40.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (cl, ch) = (cqi_from_sinr(lo).unwrap(), cqi_from_sinr(hi).unwrap());
        prop_assert!(cl <= ch);
        prop_assert!(bits_per_prb(cl) <= bits_per_prb(ch));
    }

    #[test]
    fn voice_packet_prbs_are_minimal(c in 1u8..=15) {
        let cqi = CqiIndex::new(c).unwrap();
        let m = prbs_for_voice_packet(cqi).unwrap();
        let b = bits_per_prb(cqi);
        prop_assert!(m * b >= VOLTE_PACKET_BITS);
        prop_assert!((m - 1) * b < VOLTE_PACKET_BITS);
    }
}
