//! Bundled SIC fiducials for d = 2..=5, produced by the fiducial search and
//! stored with full double precision.

use crate::error::{QplexError, Result};
use crate::io::read_sic;
use crate::reference::SicPovm;

const SIC2: &str = include_str!("../data/sic2.json");
const SIC3: &str = include_str!("../data/sic3.json");
const SIC4: &str = include_str!("../data/sic4.json");
const SIC5: &str = include_str!("../data/sic5.json");

pub fn sic_json(d: usize) -> Option<&'static str> {
    match d {
        2 => Some(SIC2),
        3 => Some(SIC3),
        4 => Some(SIC4),
        5 => Some(SIC5),
        _ => None,
    }
}

pub fn sic(d: usize) -> Result<SicPovm> {
    let text = sic_json(d).ok_or_else(|| QplexError::InvalidConfig(format!("no bundled SIC for d = {d}")))?;
    read_sic(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_sics_load() {
        for d in 2..=5 {
            let s = sic(d).unwrap();
            assert_eq!(s.dim(), d);
            assert!(s.equiangularity().deviation < 1e-8);
        }
        assert!(sic(6).is_err());
    }
}
