use super::DetectorErrorModel;
use crate::circuit::{Circuit, CzSiteId};
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::pauli::{Pauli, TwoQubitPauli};
use crate::propagate::SiteEffects;
use serde::{Deserialize, Serialize};

/// Pauli model of the depolarizing noise on every CZ; loss is excluded.
pub fn build_pauli_dem(c: &Circuit, effects: &SiteEffects, params: &NoiseParams) -> DetectorErrorModel {
    let mut dem = DetectorErrorModel::new(c.num_detectors());
    if params.p_depol == 0.0 {
        return dem;
    }
    let p = params.p_depol / 15.0;
    for s in 0..c.sites().len() {
        for pauli in TwoQubitPauli::non_identity() {
            let e = effects.pair(s, pauli);
            dem.add(p, e.detectors, e.observable).expect("effects reference circuit detectors");
        }
    }
    dem
}

/// Whether the gate partner of the lost atom was lost with it or survived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossVariant {
    /// Partner lost at the same gate (correlated or forced); it has its own model.
    Pair,
    /// Partner survived and received the remaining-atom channel.
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossLocationDem {
    /// Atom index of the heralded node; see [`Circuit::atoms`].
    pub atom: u32,
    pub node: (u32, u32),
    pub site: u32,
    pub location: CzSiteId,
    pub variant: LossVariant,
    pub dem: DetectorErrorModel,
}

/// Erasure model for `atom` lost right before site `site`: X and Z on the lost
/// atom with probability ½ each, and ½ Z on the partner of every later gate the
/// atom would have taken part in before being measured. The `Single` variant
/// adds the remaining-atom channel (X with ¼, Z with ½, independent) on the
/// partner at the loss site.
pub fn build_loss_dem(c: &Circuit, effects: &SiteEffects, atom: u32, site: u32, variant: LossVariant) -> Result<LossLocationDem> {
    let a = c.atoms().get(atom as usize).ok_or_else(|| Error::UnknownHerald(format!("atom {atom}")))?;
    let node = (a.qubit, a.round);
    let Some(pos) = a.window.iter().position(|&s| s == site) else {
        let location = c.sites().get(site as usize).map_or(format!("#{site}"), |s| s.id.to_string());
        return Err(Error::LocationOutsideWindow { node: format!("{}@{}", a.qubit, a.round), site: location });
    };
    let info = c.sites()[site as usize];
    let slot = if info.atoms[0] == Some(atom) { 0 } else { 1 };
    let mut dem = DetectorErrorModel::new(c.num_detectors());
    let mut add = |p: f64, e: crate::propagate::Effect| dem.add(p, e.detectors, e.observable).expect("circuit detectors");
    add(0.5, effects.single(site as usize, slot, false, Pauli::X));
    add(0.5, effects.single(site as usize, slot, false, Pauli::Z));
    if variant == LossVariant::Single {
        add(0.25, effects.single(site as usize, 1 - slot, true, Pauli::X));
        add(0.5, effects.single(site as usize, 1 - slot, true, Pauli::Z));
    }
    for &later in &a.window[pos + 1..] {
        let li = c.sites()[later as usize];
        let lslot = if li.atoms[0] == Some(atom) { 0 } else { 1 };
        add(0.5, effects.single(later as usize, 1 - lslot, true, Pauli::Z));
    }
    Ok(LossLocationDem { atom, node, site, location: info.id, variant, dem })
}

/// Mixture of per-location models. Exactly one location happened, so a
/// mechanism shared by several locations gets the weighted sum of its
/// probabilities rather than the XOR combination used by [`super::merge`].
pub fn mix_loss_dems(parts: &[(&LossLocationDem, f64)]) -> Result<DetectorErrorModel> {
    let count = parts.first().map_or(0, |(p, _)| p.dem.detector_count);
    let mut total = 0.0;
    for &(part, w) in parts {
        if w < 0.0 || w.is_nan() {
            return Err(Error::NegativeWeight(w));
        }
        if part.dem.detector_count != count {
            return Err(Error::DetectorCountMismatch { left: count, right: part.dem.detector_count });
        }
        total += w;
    }
    if total > 1.0 + 1e-9 {
        return Err(Error::InvalidProbability { name: "location weight sum", value: total });
    }
    if let [(part, w)] = parts {
        if *w == 1.0 {
            return Ok(part.dem.clone());
        }
    }
    let mut sums: Vec<((Vec<u32>, bool), f64)> = Vec::new();
    let mut index: std::collections::HashMap<(Vec<u32>, bool), usize> = std::collections::HashMap::new();
    for &(part, w) in parts.iter().filter(|(_, w)| *w > 0.0) {
        for m in part.dem.mechanisms() {
            let key = (m.detectors.clone(), m.flips_observable);
            match index.get(&key) {
                Some(&i) => sums[i].1 += w * m.probability,
                None => {
                    index.insert(key.clone(), sums.len());
                    sums.push((key, w * m.probability));
                }
            }
        }
    }
    let mut out = DetectorErrorModel::new(count);
    for ((dets, obs), p) in sums {
        out.add(p.min(1.0), dets, obs)?;
    }
    Ok(out)
}
