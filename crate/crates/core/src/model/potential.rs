//! Fourier potentials with the rotation and reality symmetries of the chiral model.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exactnum::CycloNum;
use crate::{Error, Result};

/// Prop-2.1 mode index `n = (n₁, n₂)`.
pub type Mode = (i64, i64);

/// A step on the rectangular Fourier lattice.
pub type Shift = (i64, i64);

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    modes: BTreeMap<Mode, CycloNum>,
    real: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModeEntry {
    pub n: [i64; 2],
    pub c: CycloNum,
}

/// On-disk form of a potential.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialFile {
    pub modes: Vec<ModeEntry>,
    #[serde(default)]
    pub complete_symmetry: bool,
    #[serde(default)]
    pub real: bool,
}

/// `c_n = ω c_{T(n)}`.
pub fn rotate(n: Mode) -> Mode {
    (-n.1, n.0 - n.1 - 1)
}

/// `c̄_n = c_{R(n)}` for real potentials.
pub fn reflect(n: Mode) -> Mode {
    (-n.1, -n.0)
}

/// Rectangular shift of the plus layer carried by mode `n`.
pub fn mode_shift(n: Mode) -> Shift {
    (1 - 3 * n.0, 1 + 3 * n.1)
}

impl Potential {
    /// The Tarnopolsky-Kruchkov-Vishwanath potential: the orbit of (0,0) with c = √3.
    pub fn canonical() -> Self {
        Self::symmetry_complete(&[((0, 0), CycloNum::sqrt3())], true)
            .expect("canonical potential is consistent")
    }

    /// Builds a potential from raw modes without enforcing symmetry.
    pub fn from_modes(modes: impl IntoIterator<Item = (Mode, CycloNum)>, real: bool) -> Self {
        let modes = modes.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Self { modes, real }
    }

    /// Closes `seeds` under the rotation orbit and, when `real`, under conjugation.
    pub fn symmetry_complete(seeds: &[(Mode, CycloNum)], real: bool) -> Result<Self> {
        let w2 = CycloNum::omega2();
        let mut modes: BTreeMap<Mode, CycloNum> = BTreeMap::new();
        let mut queue: VecDeque<(Mode, CycloNum)> = seeds.iter().cloned().collect();
        while let Some((n, c)) = queue.pop_front() {
            if let Some(old) = modes.get(&n) {
                if *old != c {
                    return Err(Error::Symmetry(format!(
                        "mode {n:?} forced to both {old} and {c}"
                    )));
                }
                continue;
            }
            queue.push_back((rotate(n), &w2 * &c));
            if real {
                queue.push_back((reflect(n), c.conj()));
            }
            modes.insert(n, c);
        }
        modes.retain(|_, c| !c.is_zero());
        Ok(Self { modes, real })
    }

    /// Checks the orbit relations, and reality when declared.
    pub fn validate(&self) -> Result<()> {
        let w = CycloNum::omega();
        let zero = CycloNum::zero();
        for (&n, c) in &self.modes {
            let t = self.modes.get(&rotate(n)).unwrap_or(&zero);
            if *c != &w * t {
                return Err(Error::Symmetry(format!(
                    "c{n:?} = {c} but ω·c{:?} = {}",
                    rotate(n),
                    &w * t
                )));
            }
            if self.real {
                let r = self.modes.get(&reflect(n)).unwrap_or(&zero);
                if c.conj() != *r {
                    return Err(Error::Symmetry(format!(
                        "real potential needs conj(c{n:?}) = c{:?}",
                        reflect(n)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn modes(&self) -> impl Iterator<Item = (&Mode, &CycloNum)> {
        self.modes.iter()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Steps of V₊: shift `mode_shift(n)` with weight `c_n`.
    pub fn plus_steps(&self) -> Vec<(Shift, CycloNum)> {
        self.modes
            .iter()
            .map(|(&n, c)| (mode_shift(n), c.clone()))
            .collect()
    }

    /// Steps of V₋: the negated shifts with the same weights.
    pub fn minus_steps(&self) -> Vec<(Shift, CycloNum)> {
        self.modes
            .iter()
            .map(|(&n, c)| {
                let s = mode_shift(n);
                ((-s.0, -s.1), c.clone())
            })
            .collect()
    }

    pub fn to_file(&self) -> PotentialFile {
        PotentialFile {
            modes: self
                .modes
                .iter()
                .map(|(&(a, b), c)| ModeEntry {
                    n: [a, b],
                    c: c.clone(),
                })
                .collect(),
            complete_symmetry: false,
            real: self.real,
        }
    }

    /// Reads the on-disk form, completing or validating symmetry as requested.
    pub fn from_file(f: &PotentialFile) -> Result<Self> {
        let seeds: Vec<(Mode, CycloNum)> =
            f.modes.iter().map(|m| ((m.n[0], m.n[1]), m.c.clone())).collect();
        let p = if f.complete_symmetry {
            Self::symmetry_complete(&seeds, f.real)?
        } else {
            let mut modes = BTreeMap::new();
            for (n, c) in seeds {
                if modes.insert(n, c).is_some() {
                    return Err(Error::Validation(format!("duplicate mode {n:?}")));
                }
            }
            modes.retain(|_, c: &mut CycloNum| !c.is_zero());
            Self {
                modes,
                real: f.real,
            }
        };
        if p.is_empty() {
            return Err(Error::Validation("potential has no nonzero modes".into()));
        }
        p.validate()?;
        Ok(p)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: PotentialFile =
            serde_json::from_str(s).map_err(|e| Error::Validation(format!("potential JSON: {e}")))?;
        Self::from_file(&f)
    }

    /// SHA-256 over a canonical rendering of the mode table.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(if self.real { b"real;" as &[u8] } else { b"complex;" });
        for (n, c) in &self.modes {
            h.update(format!("{},{}:", n.0, n.1).as_bytes());
            for x in c.coeffs() {
                h.update(crate::exactnum::format_rational(&x).as_bytes());
                h.update(b",");
            }
            h.update(b";");
        }
        hex::encode(h.finalize())
    }
}
