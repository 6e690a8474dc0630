//! Resource guards for the combinatorial parts of the toolkit.

/// Size guards. Every exponential enumeration in the crate is gated by one
/// of these; exceeding a cap is a resource error, never a wrong answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Box-as-atom alphabet size for tautological-consequence checks.
    pub sat_atoms: usize,
    /// Subformula-closure size admitted by the countermodel constructions
    /// (worlds grow exponentially in it).
    pub closure: usize,
    /// Exponent cap for frame-validity valuation enumeration.
    pub valuation_bits: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            sat_atoms: 24,
            closure: 16,
            valuation_bits: 20,
        }
    }
}

impl Caps {
    /// Apply overrides in `SUBINTKIT_CAPS` format: comma-separated
    /// `atoms=N`, `closure=N`, `valuation=N` entries.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self, String> {
        for entry in spec.split(',').filter(|e| !e.trim().is_empty()) {
            let Some((key, value)) = entry.split_once('=') else {
                return Err(format!("cap override `{entry}` is not of the form key=value"));
            };
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| format!("cap override `{entry}` has a non-numeric value"))?;
            match key.trim() {
                "atoms" => self.sat_atoms = value,
                "closure" => self.closure = value,
                "valuation" => self.valuation_bits = value,
                other => return Err(format!("unknown cap `{other}`")),
            }
        }
        Ok(self)
    }

    /// Defaults plus any `SUBINTKIT_CAPS` environment overrides.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var("SUBINTKIT_CAPS") {
            Ok(spec) => Caps::default().with_overrides(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let caps = Caps::default()
            .with_overrides("atoms=30, closure=12")
            .unwrap();
        assert_eq!(caps.sat_atoms, 30);
        assert_eq!(caps.closure, 12);
        assert_eq!(caps.valuation_bits, 20);
        assert!(Caps::default().with_overrides("atoms").is_err());
        assert!(Caps::default().with_overrides("depth=3").is_err());
    }
}
