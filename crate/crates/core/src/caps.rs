use serde::Serialize;

use crate::error::ResourceError;

/// Size limits for the exhaustive and structured computations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Largest group whose elements may be listed one by one.
    pub elements: u64,
    /// Largest group whose subgroup lattice may be enumerated.
    pub subgroup_order: u64,
    /// Largest leaf count of a flattened wreath tower.
    pub leaves: usize,
    /// Largest tree ball (vertex count) for local-action groups.
    pub ball_vertices: usize,
    /// Largest predicted ball-group order for exhaustive grafting.
    pub ball_order: u64,
    /// Largest number of orbits for which every invariant subset is listed.
    pub fixed_orbits: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            elements: 100_000,
            subgroup_order: 1_000,
            leaves: 4_096,
            ball_vertices: 400,
            ball_order: 10_000_000,
            fixed_orbits: 20,
        }
    }
}

impl Caps {
    pub(crate) fn check_elements(&self, requested: impl ToString) -> Result<(), ResourceError> {
        check_u64(requested, self.elements, "element cap", "--element-cap")
    }

    pub(crate) fn check_subgroup_order(
        &self,
        requested: impl ToString,
    ) -> Result<(), ResourceError> {
        check_u64(
            requested,
            self.subgroup_order,
            "subgroup enumeration cap",
            "--subgroup-cap",
        )
    }

    pub(crate) fn check_leaves(&self, requested: u128) -> Result<(), ResourceError> {
        if requested > self.leaves as u128 {
            return Err(ResourceError {
                cap: "flatten leaf cap",
                limit: self.leaves.to_string(),
                requested: requested.to_string(),
                flag: "--leaf-cap",
            });
        }
        Ok(())
    }

    pub(crate) fn check_ball_vertices(&self, requested: u128) -> Result<(), ResourceError> {
        if requested > self.ball_vertices as u128 {
            return Err(ResourceError {
                cap: "ball vertex cap (reduce the radius)",
                limit: self.ball_vertices.to_string(),
                requested: requested.to_string(),
                flag: "--ball-vertex-cap",
            });
        }
        Ok(())
    }

    pub(crate) fn check_ball_order(&self, requested: impl ToString) -> Result<(), ResourceError> {
        check_u64(
            requested,
            self.ball_order,
            "ball group order cap (reduce the radius)",
            "--ball-order-cap",
        )
    }

    pub(crate) fn check_fixed_orbits(&self, requested: usize) -> Result<(), ResourceError> {
        if requested > self.fixed_orbits {
            return Err(ResourceError {
                cap: "invariant-subset orbit cap",
                limit: self.fixed_orbits.to_string(),
                requested: requested.to_string(),
                flag: "--fixed-orbit-cap",
            });
        }
        Ok(())
    }
}

// `requested` is a decimal rendering so huge BigUint orders compare correctly.
fn check_u64(
    requested: impl ToString,
    limit: u64,
    cap: &'static str,
    flag: &'static str,
) -> Result<(), ResourceError> {
    let requested = requested.to_string();
    let fits = requested
        .parse::<u64>()
        .map(|r| r <= limit)
        .unwrap_or(false);
    if fits {
        Ok(())
    } else {
        Err(ResourceError {
            cap,
            limit: limit.to_string(),
            requested,
            flag,
        })
    }
}
