//! Variable registry.
//!
//! Every polynomial in a computation lives over one shared registry that lays
//! out, in a fixed slot order:
//!
//! * the space variables `z_1 .. z_n`,
//! * their primed partners `z_1' .. z_n'` (the second copy used by doubling),
//! * any symbolic parameters (curve coefficients and the like),
//! * the curve variable `t` (always the last slot).
//!
//! Keeping all four groups in a single exponent layout means substitution
//! between the copies is a relabelling, and pullback along a curve is an
//! ordinary substitution inside the same ring.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Role of a registry slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    /// `z_i`, index into the space block.
    Space(usize),
    /// `z_i'`, index into the primed block.
    Primed(usize),
    /// Symbolic parameter, index into the parameter block.
    Param(usize),
    /// The curve variable `t`.
    Curve,
}

#[derive(Debug, PartialEq, Eq)]
pub struct VarRegistry {
    space: Vec<String>,
    primed: Vec<String>,
    params: Vec<String>,
    curve: String,
    by_name: HashMap<String, usize>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    let mut seen_prime = false;
    for c in chars {
        if c == '\'' {
            seen_prime = true;
        } else if seen_prime || !(c.is_ascii_alphanumeric() || c == '_') {
            // primes may only trail the identifier
            return false;
        }
    }
    true
}

impl VarRegistry {
    /// Standard construction: space variables plus optional parameters.
    /// Primed names are derived by appending `'`, the curve variable is `t`.
    pub fn new(space: &[&str], params: &[&str]) -> Result<Arc<Self>> {
        let primed: Vec<String> = space.iter().map(|s| format!("{s}'")).collect();
        let primed_refs: Vec<&str> = primed.iter().map(|s| s.as_str()).collect();
        Self::with_names(space, &primed_refs, params, "t")
    }

    /// Fully explicit construction.
    pub fn with_names(
        space: &[&str],
        primed: &[&str],
        params: &[&str],
        curve: &str,
    ) -> Result<Arc<Self>> {
        if space.is_empty() {
            return Err(Error::InvalidRegistry("need at least one space variable".into()));
        }
        if space.len() != primed.len() {
            return Err(Error::InvalidRegistry(
                "space and primed blocks must have equal length".into(),
            ));
        }
        let mut by_name = HashMap::new();
        let all = space
            .iter()
            .chain(primed.iter())
            .chain(params.iter())
            .chain(std::iter::once(&curve));
        for (slot, name) in all.enumerate() {
            if !valid_name(name) {
                return Err(Error::InvalidRegistry(format!("invalid variable name `{name}`")));
            }
            if by_name.insert((*name).to_string(), slot).is_some() {
                return Err(Error::InvalidRegistry(format!("duplicate variable name `{name}`")));
            }
        }
        Ok(Arc::new(VarRegistry {
            space: space.iter().map(|s| s.to_string()).collect(),
            primed: primed.iter().map(|s| s.to_string()).collect(),
            params: params.iter().map(|s| s.to_string()).collect(),
            curve: curve.to_string(),
            by_name,
        }))
    }

    /// Number of space variables `n`.
    pub fn dim(&self) -> usize {
        self.space.len()
    }

    /// Number of symbolic parameters.
    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    /// Total number of exponent slots (`2n + params + 1`).
    pub fn n_slots(&self) -> usize {
        2 * self.space.len() + self.params.len() + 1
    }

    pub fn slot_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn name_of(&self, slot: usize) -> &str {
        let n = self.dim();
        match self.kind_of(slot) {
            VarKind::Space(i) => &self.space[i],
            VarKind::Primed(i) => &self.primed[i],
            VarKind::Param(i) => &self.params[i],
            VarKind::Curve => {
                debug_assert_eq!(slot, self.n_slots() - 1);
                let _ = n;
                &self.curve
            }
        }
    }

    pub fn kind_of(&self, slot: usize) -> VarKind {
        let n = self.dim();
        if slot < n {
            VarKind::Space(slot)
        } else if slot < 2 * n {
            VarKind::Primed(slot - n)
        } else if slot < 2 * n + self.params.len() {
            VarKind::Param(slot - 2 * n)
        } else if slot == self.n_slots() - 1 {
            VarKind::Curve
        } else {
            panic!("slot {slot} out of range");
        }
    }

    pub fn space_slot(&self, i: usize) -> usize {
        assert!(i < self.dim());
        i
    }

    pub fn primed_slot(&self, i: usize) -> usize {
        assert!(i < self.dim());
        self.dim() + i
    }

    pub fn param_slot(&self, i: usize) -> usize {
        assert!(i < self.n_params());
        2 * self.dim() + i
    }

    pub fn curve_slot(&self) -> usize {
        self.n_slots() - 1
    }

    pub fn space_names(&self) -> &[String] {
        &self.space
    }

    pub fn primed_names(&self) -> &[String] {
        &self.primed
    }

    pub fn param_names(&self) -> &[String] {
        &self.params
    }

    pub fn curve_name(&self) -> &str {
        &self.curve
    }

    /// Structural equality; `Arc` identity is used as a fast path elsewhere.
    pub fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other)
            || (self.space == other.space
                && self.primed == other.primed
                && self.params == other.params
                && self.curve == other.curve)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_layout() {
        let reg = VarRegistry::new(&["x", "y"], &["a", "b"]).unwrap();
        assert_eq!(reg.n_slots(), 7);
        assert_eq!(reg.slot_of("x"), Some(0));
        assert_eq!(reg.slot_of("y"), Some(1));
        assert_eq!(reg.slot_of("x'"), Some(2));
        assert_eq!(reg.slot_of("y'"), Some(3));
        assert_eq!(reg.slot_of("a"), Some(4));
        assert_eq!(reg.slot_of("b"), Some(5));
        assert_eq!(reg.slot_of("t"), Some(6));
        assert_eq!(reg.kind_of(3), VarKind::Primed(1));
        assert_eq!(reg.kind_of(6), VarKind::Curve);
        assert_eq!(reg.name_of(reg.primed_slot(0)), "x'");
    }

    #[test]
    fn rejects_collisions_and_bad_names() {
        assert!(VarRegistry::new(&["x", "x"], &[]).is_err());
        assert!(VarRegistry::new(&["t"], &[]).is_err()); // collides with curve var
        assert!(VarRegistry::new(&["x"], &["x'"]).is_err());
        assert!(VarRegistry::new(&["3x"], &[]).is_err());
        assert!(VarRegistry::new(&[], &[]).is_err());
        assert!(VarRegistry::new(&["x'y"], &[]).is_err()); // prime must trail
        assert!(VarRegistry::new(&["x", "y"], &["a"]).is_ok());
    }

    #[test]
    fn structural_equality() {
        let r1 = VarRegistry::new(&["x", "y"], &["a"]).unwrap();
        let r2 = VarRegistry::new(&["x", "y"], &["a"]).unwrap();
        let r3 = VarRegistry::new(&["x", "y"], &["b"]).unwrap();
        assert!(r1.same(&r2));
        assert!(!r1.same(&r3));
    }
}
