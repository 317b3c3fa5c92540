//! Private splitmix64 copy for weight initialization, kept separate from the
//! signal-generation stream so the two stages cannot perturb each other's
//! byte-level reproducibility.

pub(crate) struct InitRng {
    state: u64,
}

impl InitRng {
    pub(crate) fn new(seed: u64) -> Self {
        InitRng { state: seed }
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [-1, 1).
    pub(crate) fn next_symmetric(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }
}
