use crate::{Complex64, ModemError, ModulationScheme, Result};

/// Bit-pattern to symbol table, unit average power. Pattern value is the bits
/// read MSB-first, so QPSK bits [0,1] select entry 0b01.
#[derive(Debug, Clone)]
pub struct ConstellationMap {
    pub bits_per_symbol: usize,
    pub points: Vec<Complex64>,
}

impl ConstellationMap {
    pub fn for_scheme(scheme: ModulationScheme) -> Result<ConstellationMap> {
        match scheme {
            ModulationScheme::Bpsk => Ok(Self::bpsk()),
            ModulationScheme::Qpsk => Ok(Self::qpsk()),
            ModulationScheme::Qam16 => Ok(Self::qam16()),
            ModulationScheme::Gfsk => Err(ModemError::InvalidArgument(
                "GFSK is frequency modulation and has no constellation table".into(),
            )),
        }
    }

    pub fn bpsk() -> ConstellationMap {
        ConstellationMap {
            bits_per_symbol: 1,
            points: vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        }
    }

    /// Gray map: 00 -> quadrant I, 01 -> II, 11 -> III, 10 -> IV.
    pub fn qpsk() -> ConstellationMap {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        ConstellationMap {
            bits_per_symbol: 2,
            points: vec![
                Complex64::new(a, a),   // 00
                Complex64::new(-a, a),  // 01
                Complex64::new(a, -a),  // 10
                Complex64::new(-a, -a), // 11
            ],
        }
    }

    /// Square 16-QAM: first two bits Gray-select the I level, last two the Q
    /// level, axis map 00:-3, 01:-1, 11:+1, 10:+3, all scaled by 1/sqrt(10).
    pub fn qam16() -> ConstellationMap {
        let scale = 1.0 / 10f64.sqrt();
        let level = |two_bits: usize| -> f64 {
            match two_bits {
                0b00 => -3.0,
                0b01 => -1.0,
                0b11 => 1.0,
                0b10 => 3.0,
                _ => unreachable!(),
            }
        };
        let points = (0..16)
            .map(|p| Complex64::new(level(p >> 2) * scale, level(p & 0b11) * scale))
            .collect();
        ConstellationMap {
            bits_per_symbol: 4,
            points,
        }
    }

    /// Maps a bit sequence to symbols. Bit count must divide evenly.
    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        if bits.is_empty() || bits.len() % self.bits_per_symbol != 0 {
            return Err(ModemError::InvalidArgument(format!(
                "bit count {} is not a positive multiple of {}",
                bits.len(),
                self.bits_per_symbol
            )));
        }
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(ModemError::InvalidArgument(format!(
                "bits must be 0 or 1, got {bad}"
            )));
        }
        Ok(bits
            .chunks_exact(self.bits_per_symbol)
            .map(|chunk| {
                let pattern = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
                self.points[pattern]
            })
            .collect())
    }

    pub fn mean_power(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }
}
