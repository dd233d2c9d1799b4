//! Firing-pattern catalog.
//!
//! Twenty named firing patterns. Eight of them carry a reference parameter
//! set and an optimized parameter set fitted to rat basolateral amygdala
//! (BLA) and hippocampus (HIP) single units; the remainder carry only an
//! eliciting protocol and a short description. Each region lists the
//! patterns its neurons were observed to follow.
//!
//! The catalog is a JSON document (`data/catalog.json`) so protocol
//! amplitudes and timings can be edited without touching code.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neuron::{NeuronParams, StimulusProtocol};

const BUILTIN_JSON: &str = include_str!("../data/catalog.json");
pub const CATALOG_VERSION: u32 = 1;

/// The closed set of firing patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PatternId {
    #[serde(rename = "tonic_spiking")]
    TonicSpiking,
    #[serde(rename = "phasic_spiking")]
    PhasicSpiking,
    #[serde(rename = "tonic_bursting")]
    TonicBursting,
    #[serde(rename = "phasic_bursting")]
    PhasicBursting,
    #[serde(rename = "mixed_mode")]
    MixedMode,
    #[serde(rename = "spike_frequency_adaptation")]
    SpikeFrequencyAdaptation,
    #[serde(rename = "class_1_excitable")]
    Class1Excitable,
    #[serde(rename = "class_2_excitable")]
    Class2Excitable,
    #[serde(rename = "spike_latency")]
    SpikeLatency,
    #[serde(rename = "subthreshold_oscillation")]
    SubthresholdOscillation,
    #[serde(rename = "resonator")]
    Resonator,
    #[serde(rename = "integrator")]
    Integrator,
    #[serde(rename = "rebound_spike")]
    ReboundSpike,
    #[serde(rename = "rebound_burst")]
    ReboundBurst,
    #[serde(rename = "threshold_variability")]
    ThresholdVariability,
    #[serde(rename = "bistability")]
    Bistability,
    #[serde(rename = "dap")]
    Dap,
    #[serde(rename = "accommodation")]
    Accommodation,
    #[serde(rename = "inhibition_induced_spiking")]
    InhibitionInducedSpiking,
    #[serde(rename = "inhibition_induced_bursting")]
    InhibitionInducedBursting,
}

impl PatternId {
    /// All patterns in column order of the region possibility matrix.
    pub const ALL: [PatternId; 20] = [
        PatternId::TonicSpiking,
        PatternId::PhasicSpiking,
        PatternId::TonicBursting,
        PatternId::PhasicBursting,
        PatternId::MixedMode,
        PatternId::SpikeFrequencyAdaptation,
        PatternId::Class1Excitable,
        PatternId::Class2Excitable,
        PatternId::SpikeLatency,
        PatternId::SubthresholdOscillation,
        PatternId::Resonator,
        PatternId::Integrator,
        PatternId::ReboundSpike,
        PatternId::ReboundBurst,
        PatternId::ThresholdVariability,
        PatternId::Bistability,
        PatternId::Dap,
        PatternId::Accommodation,
        PatternId::InhibitionInducedSpiking,
        PatternId::InhibitionInducedBursting,
    ];

    /// Stable identifier used in files and on the command line.
    pub fn as_str(self) -> &'static str {
        match self {
            PatternId::TonicSpiking => "tonic_spiking",
            PatternId::PhasicSpiking => "phasic_spiking",
            PatternId::TonicBursting => "tonic_bursting",
            PatternId::PhasicBursting => "phasic_bursting",
            PatternId::MixedMode => "mixed_mode",
            PatternId::SpikeFrequencyAdaptation => "spike_frequency_adaptation",
            PatternId::Class1Excitable => "class_1_excitable",
            PatternId::Class2Excitable => "class_2_excitable",
            PatternId::SpikeLatency => "spike_latency",
            PatternId::SubthresholdOscillation => "subthreshold_oscillation",
            PatternId::Resonator => "resonator",
            PatternId::Integrator => "integrator",
            PatternId::ReboundSpike => "rebound_spike",
            PatternId::ReboundBurst => "rebound_burst",
            PatternId::ThresholdVariability => "threshold_variability",
            PatternId::Bistability => "bistability",
            PatternId::Dap => "dap",
            PatternId::Accommodation => "accommodation",
            PatternId::InhibitionInducedSpiking => "inhibition_induced_spiking",
            PatternId::InhibitionInducedBursting => "inhibition_induced_bursting",
        }
    }

    /// Human-readable name.
    pub fn label(self) -> &'static str {
        match self {
            PatternId::TonicSpiking => "tonic spiking",
            PatternId::PhasicSpiking => "phasic spiking",
            PatternId::TonicBursting => "tonic bursting",
            PatternId::PhasicBursting => "phasic bursting",
            PatternId::MixedMode => "mixed mode",
            PatternId::SpikeFrequencyAdaptation => "spike frequency adaptation",
            PatternId::Class1Excitable => "class 1 excitable",
            PatternId::Class2Excitable => "class 2 excitable",
            PatternId::SpikeLatency => "spike latency",
            PatternId::SubthresholdOscillation => "subthreshold oscillation",
            PatternId::Resonator => "resonator",
            PatternId::Integrator => "integrator",
            PatternId::ReboundSpike => "rebound spike",
            PatternId::ReboundBurst => "rebound burst",
            PatternId::ThresholdVariability => "threshold variability",
            PatternId::Bistability => "bistability",
            PatternId::Dap => "depolarizing after-potential",
            PatternId::Accommodation => "accommodation",
            PatternId::InhibitionInducedSpiking => "inhibition-induced spiking",
            PatternId::InhibitionInducedBursting => "inhibition-induced bursting",
        }
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        PatternId::ALL
            .into_iter()
            .find(|p| p.as_str() == key)
            .ok_or_else(|| {
                let names: Vec<_> = PatternId::ALL.iter().map(|p| p.as_str()).collect();
                Error::invalid(format!("unknown pattern {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// Recording regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Basolateral amygdala.
    #[serde(rename = "BLA")]
    Bla,
    /// Hippocampus.
    #[serde(rename = "HIP", alias = "hippocampus")]
    Hip,
}

impl Region {
    pub const ALL: [Region; 2] = [Region::Bla, Region::Hip];

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Bla => "BLA",
            Region::Hip => "HIP",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "BLA" => Ok(Region::Bla),
            "HIP" | "HIPPOCAMPUS" => Ok(Region::Hip),
            _ => Err(Error::invalid(format!("unknown region {s:?}; expected BLA or HIP"))),
        }
    }
}

/// One catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternSpec {
    pub id: PatternId,
    pub original: Option<NeuronParams>,
    pub optimized: Option<NeuronParams>,
    pub protocol: StimulusProtocol,
    pub descriptor: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    original: Option<NeuronParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    optimized: Option<NeuronParams>,
    protocol: StimulusProtocol,
    descriptor: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawCatalog {
    version: u32,
    patterns: BTreeMap<PatternId, RawEntry>,
    regions: BTreeMap<Region, Vec<PatternId>>,
}

/// Immutable pattern catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    patterns: BTreeMap<PatternId, PatternSpec>,
    regions: BTreeMap<Region, BTreeSet<PatternId>>,
}

impl Catalog {
    /// The catalog shipped with the crate.
    pub fn builtin() -> &'static Catalog {
        static BUILTIN: OnceLock<Catalog> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            Catalog::from_json(BUILTIN_JSON).expect("bundled catalog.json is valid")
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawCatalog =
            serde_json::from_str(text).map_err(|e| Error::parse("catalog", e))?;
        if raw.version != CATALOG_VERSION {
            return Err(Error::parse(
                "catalog",
                format!("unsupported version {} (expected {CATALOG_VERSION})", raw.version),
            ));
        }
        let missing: Vec<_> = PatternId::ALL
            .iter()
            .filter(|id| !raw.patterns.contains_key(id))
            .map(|id| id.as_str())
            .collect();
        if !missing.is_empty() {
            return Err(Error::parse("catalog", format!("missing patterns: {}", missing.join(", "))));
        }
        let mut patterns = BTreeMap::new();
        for (id, entry) in raw.patterns {
            for p in entry.original.iter().chain(entry.optimized.iter()) {
                p.validate()
                    .map_err(|e| Error::parse("catalog", format!("{id}: {e}")))?;
            }
            if entry.optimized.is_some() && entry.original.is_none() {
                return Err(Error::parse(
                    "catalog",
                    format!("{id}: optimized parameters without original parameters"),
                ));
            }
            patterns.insert(
                id,
                PatternSpec {
                    id,
                    original: entry.original,
                    optimized: entry.optimized,
                    protocol: entry.protocol,
                    descriptor: entry.descriptor,
                },
            );
        }
        let mut regions = BTreeMap::new();
        for region in Region::ALL {
            let list = raw.regions.get(&region).cloned().unwrap_or_default();
            let set: BTreeSet<_> = list.iter().copied().collect();
            if set.len() != list.len() {
                return Err(Error::parse("catalog", format!("duplicate patterns listed for {region}")));
            }
            regions.insert(region, set);
        }
        Ok(Self { patterns, regions })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&crate::io::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let raw = RawCatalog {
            version: CATALOG_VERSION,
            patterns: self
                .patterns
                .iter()
                .map(|(id, s)| {
                    (
                        *id,
                        RawEntry {
                            original: s.original,
                            optimized: s.optimized,
                            protocol: s.protocol.clone(),
                            descriptor: s.descriptor.clone(),
                        },
                    )
                })
                .collect(),
            regions: self
                .regions
                .iter()
                .map(|(r, set)| (*r, set.iter().copied().collect()))
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("catalog serializes")
    }

    pub fn spec(&self, id: PatternId) -> &PatternSpec {
        &self.patterns[&id]
    }

    pub fn specs(&self) -> impl Iterator<Item = &PatternSpec> {
        self.patterns.values()
    }

    /// Reference parameter set, when the pattern has one.
    pub fn canonical_params(&self, id: PatternId) -> Option<NeuronParams> {
        self.spec(id).original
    }

    pub fn optimized_params(&self, id: PatternId) -> Option<NeuronParams> {
        self.spec(id).optimized
    }

    pub fn protocol_for(&self, id: PatternId) -> &StimulusProtocol {
        &self.spec(id).protocol
    }

    pub fn region_allows(&self, region: Region, id: PatternId) -> bool {
        self.regions[&region].contains(&id)
    }

    pub fn possible_patterns(&self, region: Region) -> impl Iterator<Item = PatternId> + '_ {
        self.regions[&region].iter().copied()
    }

    /// Patterns carrying both reference and optimized parameter sets.
    pub fn fitted_patterns(&self) -> Vec<PatternId> {
        self.patterns
            .values()
            .filter(|s| s.original.is_some() && s.optimized.is_some())
            .map(|s| s.id)
            .collect()
    }
}

pub fn canonical_params(id: PatternId) -> Option<NeuronParams> {
    Catalog::builtin().canonical_params(id)
}

pub fn optimized_params(id: PatternId) -> Option<NeuronParams> {
    Catalog::builtin().optimized_params(id)
}

pub fn protocol_for(id: PatternId) -> StimulusProtocol {
    Catalog::builtin().protocol_for(id).clone()
}

pub fn region_allows(region: Region, id: PatternId) -> bool {
    Catalog::builtin().region_allows(region, id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses() {
        let cat = Catalog::builtin();
        assert_eq!(cat.specs().count(), 20);
        assert_eq!(cat.fitted_patterns().len(), 8);
    }

    #[test]
    fn table_lookups() {
        assert_eq!(
            canonical_params(PatternId::TonicSpiking),
            Some(NeuronParams::new(0.02, 0.2, -65.0, 6.0))
        );
        assert_eq!(
            canonical_params(PatternId::InhibitionInducedSpiking),
            Some(NeuronParams::new(-0.02, -1.0, -60.0, 8.0))
        );
        assert_eq!(canonical_params(PatternId::Resonator), None);
        assert_eq!(
            optimized_params(PatternId::TonicSpiking),
            Some(NeuronParams::new(0.01877, 0.26801, -66.3083, 12.4662))
        );
        assert_eq!(
            optimized_params(PatternId::Dap),
            Some(NeuronParams::new(1.738625, 0.165259, -67.823, -4.4429))
        );
        assert_eq!(
            optimized_params(PatternId::ThresholdVariability),
            Some(NeuronParams::new(0.067733, 0.251266, -62.2565, 13.03464))
        );
    }

    #[test]
    fn region_lookups() {
        assert!(region_allows(Region::Bla, PatternId::TonicSpiking));
        assert!(!region_allows(Region::Hip, PatternId::PhasicSpiking));
        assert!(region_allows(Region::Hip, PatternId::MixedMode));
        assert_eq!(Catalog::builtin().possible_patterns(Region::Bla).count(), 7);
        assert_eq!(Catalog::builtin().possible_patterns(Region::Hip).count(), 3);
    }

    #[test]
    fn protocols_from_catalog() {
        let p = protocol_for(PatternId::TonicSpiking);
        assert_eq!(p.current_at(5.0), 0.0);
        assert_eq!(p.current_at(10.0), 10.0);
        let p = protocol_for(PatternId::InhibitionInducedSpiking);
        assert_eq!(p.current_at(0.0), 80.0);
        assert_eq!(p.current_at(100.0), 75.0);
        let p = protocol_for(PatternId::ReboundSpike);
        assert_eq!(p.current_at(22.0), -15.0);
        assert_eq!(p.current_at(30.0), 0.0);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let cat = Catalog::builtin();
        let back = Catalog::from_json(&cat.to_json()).unwrap();
        assert_eq!(&back, cat);
        for id in PatternId::ALL {
            let (a, b) = (cat.spec(id), back.spec(id));
            for (x, y) in a.original.iter().chain(&a.optimized).zip(b.original.iter().chain(&b.optimized)) {
                for (g, h) in x.to_array().iter().zip(y.to_array()) {
                    assert_eq!(g.to_bits(), h.to_bits());
                }
            }
        }
    }

    #[test]
    fn rejects_incomplete_catalog() {
        let text = r#"{"version":1,"patterns":{},"regions":{}}"#;
        assert!(Catalog::from_json(text).is_err());
        let bumped = Catalog::builtin().to_json().replacen("\"version\": 1", "\"version\": 9", 1);
        assert!(Catalog::from_json(&bumped).is_err());
    }

    #[test]
    fn ids_parse_from_strings() {
        for id in PatternId::ALL {
            assert_eq!(id.as_str().parse::<PatternId>().unwrap(), id);
        }
        assert_eq!("Tonic spiking".parse::<PatternId>().unwrap(), PatternId::TonicSpiking);
        assert!("bursty".parse::<PatternId>().is_err());
        assert_eq!("hip".parse::<Region>().unwrap(), Region::Hip);
    }
}
