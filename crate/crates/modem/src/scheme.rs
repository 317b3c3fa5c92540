use serde::{Deserialize, Serialize};

/// The four signal classes, with a stable integer encoding 0..3 used as the
/// classifier label everywhere downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulationScheme {
    Bpsk,
    Qpsk,
    Qam16,
    Gfsk,
}

impl ModulationScheme {
    pub const ALL: [ModulationScheme; 4] = [
        ModulationScheme::Bpsk,
        ModulationScheme::Qpsk,
        ModulationScheme::Qam16,
        ModulationScheme::Gfsk,
    ];

    pub fn index(self) -> usize {
        match self {
            ModulationScheme::Bpsk => 0,
            ModulationScheme::Qpsk => 1,
            ModulationScheme::Qam16 => 2,
            ModulationScheme::Gfsk => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<ModulationScheme> {
        Self::ALL.get(i).copied()
    }

    pub fn bits_per_symbol(self) -> usize {
        match self {
            ModulationScheme::Bpsk | ModulationScheme::Gfsk => 1,
            ModulationScheme::Qpsk => 2,
            ModulationScheme::Qam16 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModulationScheme::Bpsk => "bpsk",
            ModulationScheme::Qpsk => "qpsk",
            ModulationScheme::Qam16 => "qam16",
            ModulationScheme::Gfsk => "gfsk",
        }
    }
}

impl std::fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModulationScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "bpsk" => Ok(ModulationScheme::Bpsk),
            "qpsk" => Ok(ModulationScheme::Qpsk),
            "qam16" => Ok(ModulationScheme::Qam16),
            "gfsk" => Ok(ModulationScheme::Gfsk),
            other => Err(format!("unknown modulation scheme: {other}")),
        }
    }
}
