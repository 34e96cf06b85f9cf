use serde::Deserialize;

const PROGRAMS_TOML: &str = include_str!("../programs.toml");

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub sample_rate: f64,
    pub saw: Saw,
    pub ping: Ping,
    pub chord: Chord,
    pub chordchorus: ChordChorus,
    pub butterworth: Butterworth,
    pub allpass: Allpass,
    pub karplus: Karplus,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Saw {
    pub freq: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ping {
    pub freq: f64,
    pub half_life: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Chord {
    pub root: f64,
    pub ratios: [f64; 4],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChordChorus {
    pub root: f64,
    pub ratios: [f64; 4],
    pub detune_cents: [f64; 4],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Butterworth {
    pub cutoff_low: f64,
    pub cutoff_high: f64,
    pub sweep_rate: f64,
    pub control_factor: usize,
    pub seed: u32,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Allpass {
    pub stages: usize,
    pub coefficient: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Karplus {
    pub delay: usize,
    pub damping: f64,
    pub loop_gain: f64,
    pub burst_period: u64,
    pub burst_length: u64,
    pub seed: u32,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

impl Default for Config {
    /// The configuration shipped with the crate.
    fn default() -> Self {
        Config::parse(PROGRAMS_TOML).expect("bundled programs.toml is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_config_parses() {
        let c = Config::default();
        assert_eq!(c.sample_rate, 44100.0);
        assert_eq!(c.butterworth.control_factor, 100);
        assert_eq!(c.karplus.delay, 100);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = PROGRAMS_TOML.replace("[saw]\n", "[saw]\nvolume = 1.0\n");
        assert!(Config::parse(&text).is_err());
    }
}
