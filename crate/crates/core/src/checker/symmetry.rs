//! State canonicalization under the automorphisms of a configuration.

use crate::echo::ProtocolState;
use crate::netconfig::{automorphisms, Config, ConfigError};

/// The non-identity automorphisms of a configuration, used to map every
/// state to the smallest member of its orbit.
#[derive(Debug, Clone)]
pub struct Symmetry {
    perms: Vec<Vec<u8>>,
}

impl Symmetry {
    /// `None` when the configuration has no non-trivial automorphism.
    pub fn for_config(c: &Config) -> Result<Option<Self>, ConfigError> {
        let perms: Vec<Vec<u8>> = automorphisms(c)?
            .into_iter()
            .filter(|p| !p.is_identity())
            .map(|p| p.as_slice().to_vec())
            .collect();
        Ok((!perms.is_empty()).then_some(Symmetry { perms }))
    }

    pub fn group_order(&self) -> usize {
        self.perms.len() + 1
    }

    pub fn canonical(&self, s: &ProtocolState) -> ProtocolState {
        let mut best = *s;
        for p in &self.perms {
            let t = s.permuted(p);
            if t < best {
                best = t;
            }
        }
        best
    }
}
