//! Random walk on the integer sites and the flight it induces on the medium.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::{GapLaw, JumpLaw};
use crate::medium::{Medium, Site, SparseMedium, MAX_EXPLICIT_SITES};
use crate::rng::{Role, SeedStream};

/// Walk started at site 0; step `i` (1-based) is drawn from item `i` of the
/// walk stream.
#[derive(Clone, Debug)]
pub struct Walk {
    law: JumpLaw,
    stream: SeedStream,
    positions: Vec<Site>,
}

impl Walk {
    pub fn simulate(law: JumpLaw, steps: usize, stream: SeedStream) -> Result<Self> {
        law.validate()?;
        let mut w = Walk { law, stream, positions: Vec::with_capacity(steps + 1) };
        w.positions.push(0);
        w.extend(steps);
        Ok(w)
    }

    /// Walk with prescribed positions (first one must be 0). Used for checks
    /// that need hand-made trajectories.
    pub fn from_positions(law: JumpLaw, stream: SeedStream, positions: Vec<Site>) -> Result<Self> {
        if positions.first() != Some(&0) {
            return Err(Error::InvalidParameter("walk must start at site 0".into()));
        }
        Ok(Walk { law, stream, positions })
    }

    /// Continue the walk until it has `steps` steps.
    pub fn extend(&mut self, steps: usize) {
        let mut s = *self.positions.last().expect("walk starts at 0");
        for i in self.positions.len()..=steps {
            s = s.saturating_add(self.law.sample(&mut self.stream.rng(i as u64)));
            self.positions.push(s);
        }
    }

    pub fn law(&self) -> &JumpLaw {
        &self.law
    }

    pub fn stream(&self) -> &SeedStream {
        &self.stream
    }

    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.positions.len() - 1
    }

    /// Positions `S_0, ..., S_steps`.
    pub fn positions(&self) -> &[Site] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> Site {
        self.positions[i]
    }

    /// Smallest and largest site visited.
    pub fn range(&self) -> (Site, Site) {
        let lo = *self.positions.iter().min().expect("nonempty");
        let hi = *self.positions.iter().max().expect("nonempty");
        (lo, hi)
    }
}

/// Endpoint `S_steps` of the walk, without storing the trajectory.
/// Agrees with [`Walk::simulate`] on the same stream.
pub fn walk_endpoint(law: &JumpLaw, steps: usize, stream: &SeedStream) -> Site {
    (1..=steps as u64).fold(0 as Site, |s, i| s.saturating_add(law.sample(&mut stream.rng(i))))
}

/// How the medium behind a flight is stored.
#[derive(Clone, Debug)]
pub enum MediumStore {
    Explicit(Medium),
    /// Only the visited sites are known; used when the walk range is too wide
    /// to materialize.
    Sparse(SparseMedium),
}

impl MediumStore {
    pub fn get(&self, site: Site) -> Result<f64> {
        match self {
            MediumStore::Explicit(m) => m.get(site),
            MediumStore::Sparse(m) => m.get(site),
        }
    }

    pub fn explicit(&self) -> Option<&Medium> {
        match self {
            MediumStore::Explicit(m) => Some(m),
            MediumStore::Sparse(_) => None,
        }
    }
}

/// Which medium representation [`build_flight`] uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediumMode {
    /// Explicit when the visited range fits, sparse otherwise.
    #[default]
    Auto,
    Explicit,
    Sparse,
}

/// Walk together with the medium points it visits: `Y_i = omega_{S_i}`.
#[derive(Clone, Debug)]
pub struct Flight {
    walk: Walk,
    medium: MediumStore,
    targets: Vec<f64>,
}

impl Flight {
    pub fn new(walk: Walk, medium: MediumStore) -> Result<Self> {
        let targets = walk
            .positions()
            .iter()
            .map(|&s| medium.get(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Flight { walk, medium, targets })
    }

    pub fn walk(&self) -> &Walk {
        &self.walk
    }

    pub fn medium(&self) -> &MediumStore {
        &self.medium
    }

    /// `Y_0, ..., Y_steps`.
    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn steps(&self) -> usize {
        self.walk.steps()
    }
}

/// Simulate `steps` steps of the flight for one replica. Medium and walk use
/// the medium and walk roles of the same `(root, replica)` pair.
pub fn build_flight(
    gap_law: GapLaw,
    jump_law: JumpLaw,
    steps: usize,
    root: u64,
    replica: u64,
    mode: MediumMode,
) -> Result<Flight> {
    gap_law.validate()?;
    let walk = Walk::simulate(jump_law, steps, SeedStream::new(root, replica, Role::Walk))?;
    let medium_stream = SeedStream::new(root, replica, Role::Medium);
    let (lo, hi) = walk.range();
    let reach = (-lo).max(hi);
    let fits = 2 * reach < MAX_EXPLICIT_SITES;
    let explicit = match mode {
        MediumMode::Auto => fits,
        MediumMode::Explicit => true,
        MediumMode::Sparse => false,
    };
    let medium = if explicit {
        // symmetric, so the rescaled medium path covers every visited site
        MediumStore::Explicit(Medium::with_range(gap_law, medium_stream, -reach, reach)?)
    } else {
        MediumStore::Sparse(SparseMedium::new(&gap_law, &medium_stream, walk.positions())?)
    };
    Flight::new(walk, medium)
}
