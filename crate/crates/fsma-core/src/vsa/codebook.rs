//! Named hypervector codebooks with deterministic regeneration.
//!
//! Entries are derived from the codebook seed and the entry name alone, so
//! the same `(seed, name, kind)` always yields the same vector regardless
//! of insertion order. Codebooks serialise to JSON with exact integer
//! indices (no floats).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BmapVector, PsbcVector, SbcVector, VsaError};
use crate::rng::substream;

/// Any of the three atomic hypervector kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypervector {
    Sbc(SbcVector),
    Bmap(BmapVector),
    Psbc(PsbcVector),
}

/// Kind tag used when requesting generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorKind {
    Sbc,
    Bmap,
    Psbc,
}

impl Hypervector {
    pub fn kind(&self) -> VectorKind {
        match self {
            Hypervector::Sbc(_) => VectorKind::Sbc,
            Hypervector::Bmap(_) => VectorKind::Bmap,
            Hypervector::Psbc(_) => VectorKind::Psbc,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Hypervector::Sbc(v) => v.n(),
            Hypervector::Bmap(v) => v.n(),
            Hypervector::Psbc(v) => v.n(),
        }
    }

    pub fn block_len(&self) -> usize {
        match self {
            Hypervector::Sbc(v) => v.block_len(),
            Hypervector::Bmap(v) => v.block_len(),
            Hypervector::Psbc(v) => v.block_len(),
        }
    }

    pub(super) fn shape(&self) -> (usize, usize) {
        (self.n(), self.block_len())
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            Hypervector::Sbc(v) => v.to_dense(),
            Hypervector::Bmap(v) => v.to_dense(),
            Hypervector::Psbc(v) => v.to_dense(),
        }
    }

    pub fn as_sbc(&self) -> Option<&SbcVector> {
        match self {
            Hypervector::Sbc(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_bmap(&self) -> Option<&BmapVector> {
        match self {
            Hypervector::Bmap(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_psbc(&self) -> Option<&PsbcVector> {
        match self {
            Hypervector::Psbc(v) => Some(v),
            _ => None,
        }
    }
}

/// Name → hypervector map sharing one `(n, l)` shape and one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    l: usize,
    seed: u64,
    entries: BTreeMap<String, Hypervector>,
}

impl Codebook {
    pub fn new(n: usize, l: usize, seed: u64) -> Result<Self, VsaError> {
        super::check_shape(n, l)?;
        Ok(Self {
            n,
            l,
            seed,
            entries: BTreeMap::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_len(&self) -> usize {
        self.l
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Generate (or regenerate) the entry `name` of the given kind.
    ///
    /// The vector depends only on `(seed, name, kind)`.
    pub fn add(&mut self, name: &str, kind: VectorKind) -> &Hypervector {
        let tag = match kind {
            VectorKind::Sbc => "sbc",
            VectorKind::Bmap => "bmap",
            VectorKind::Psbc => "psbc",
        };
        let mut rng = substream(self.seed, &format!("codebook/{tag}/{name}"));
        let hv = match kind {
            VectorKind::Sbc => Hypervector::Sbc(SbcVector::random(self.n, self.l, &mut rng).unwrap()),
            VectorKind::Bmap => {
                Hypervector::Bmap(BmapVector::random(self.n, self.l, &mut rng).unwrap())
            }
            VectorKind::Psbc => {
                Hypervector::Psbc(PsbcVector::random(self.n, self.l, &mut rng).unwrap())
            }
        };
        self.entries.insert(name.to_string(), hv);
        &self.entries[name]
    }

    pub fn get(&self, name: &str) -> Result<&Hypervector, VsaError> {
        self.entries
            .get(name)
            .ok_or_else(|| VsaError::MissingEntry(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Hypervector)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CodebookDoc::from(self)).expect("codebook serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let doc: CodebookDoc = serde_json::from_str(text).map_err(|e| e.to_string())?;
        doc.try_into()
    }
}

// ── JSON document form ───────────────────────────────────────────────

#[derive(Serialize, Deserialize)]
struct CodebookDoc {
    n: usize,
    l: usize,
    seed: u64,
    entries: BTreeMap<String, EntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    kind: VectorKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    active_indices: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    block_signs: Option<Vec<i8>>,
}

impl From<&Codebook> for CodebookDoc {
    fn from(cb: &Codebook) -> Self {
        let entries = cb
            .entries
            .iter()
            .map(|(name, hv)| {
                let doc = match hv {
                    Hypervector::Sbc(v) => EntryDoc {
                        kind: VectorKind::Sbc,
                        active_indices: Some(v.active_components()),
                        block_signs: None,
                    },
                    Hypervector::Bmap(v) => EntryDoc {
                        kind: VectorKind::Bmap,
                        active_indices: None,
                        block_signs: Some(v.signs().to_vec()),
                    },
                    Hypervector::Psbc(v) => EntryDoc {
                        kind: VectorKind::Psbc,
                        active_indices: Some(
                            v.active()
                                .iter()
                                .enumerate()
                                .map(|(k, &a)| k * v.block_len() + a as usize)
                                .collect(),
                        ),
                        block_signs: Some(v.signs().to_vec()),
                    },
                };
                (name.clone(), doc)
            })
            .collect();
        CodebookDoc {
            n: cb.n,
            l: cb.l,
            seed: cb.seed,
            entries,
        }
    }
}

impl TryFrom<CodebookDoc> for Codebook {
    type Error = String;

    fn try_from(doc: CodebookDoc) -> Result<Self, String> {
        let l = doc.l;
        if l == 0 || doc.n == 0 || doc.n % l != 0 {
            return Err(format!("bad shape: n={} l={l}", doc.n));
        }
        let m = doc.n / l;
        let within = |abs: &[usize]| -> Result<Vec<u32>, String> {
            if abs.len() != m {
                return Err(format!("expected {m} active indices, got {}", abs.len()));
            }
            abs.iter()
                .enumerate()
                .map(|(k, &i)| {
                    if i / l != k {
                        Err(format!("index {i} is not in block {k}"))
                    } else {
                        Ok((i % l) as u32)
                    }
                })
                .collect()
        };
        let mut entries = BTreeMap::new();
        for (name, e) in doc.entries {
            let hv = match e.kind {
                VectorKind::Sbc => {
                    let idx = e.active_indices.ok_or("sbc entry missing active_indices")?;
                    Hypervector::Sbc(
                        SbcVector::from_active(l, within(&idx)?).map_err(|e| e.to_string())?,
                    )
                }
                VectorKind::Bmap => {
                    let signs = e.block_signs.ok_or("bmap entry missing block_signs")?;
                    Hypervector::Bmap(BmapVector::from_signs(l, signs).map_err(|e| e.to_string())?)
                }
                VectorKind::Psbc => {
                    let idx = e.active_indices.ok_or("psbc entry missing active_indices")?;
                    let signs = e.block_signs.ok_or("psbc entry missing block_signs")?;
                    if signs.len() != m || signs.iter().any(|&s| s != 1 && s != -1) {
                        return Err("bad psbc block_signs".to_string());
                    }
                    let active = within(&idx)?;
                    let sbc = SbcVector::from_active(l, active).map_err(|e| e.to_string())?;
                    let bmap = BmapVector::from_signs(l, signs).map_err(|e| e.to_string())?;
                    Hypervector::Psbc(super::hadamard_bind(&sbc, &bmap).map_err(|e| e.to_string())?)
                }
            };
            entries.insert(name, hv);
        }
        Ok(Codebook {
            n: doc.n,
            l,
            seed: doc.seed,
            entries,
        })
    }
}
