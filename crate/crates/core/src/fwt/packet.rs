//! Wavelet packets: any band, low or high, may be split again. Splitting
//! only low bands gives the pyramid; splitting everything to full depth with
//! Haar gives the Walsh basis.

use std::fmt;
use std::str::FromStr;

use super::{warn_if_not_orthogonal, Normalization, StepFilters};
use crate::error::{log2_exact, Error, Result};
use crate::filters::FilterCoefficients;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PacketTree {
    Leaf,
    Split(Box<PacketTree>, Box<PacketTree>),
}

impl PacketTree {
    pub fn split(low: PacketTree, high: PacketTree) -> Self {
        PacketTree::Split(Box::new(low), Box::new(high))
    }

    /// Every band split down to `depth`.
    pub fn full(depth: usize) -> Self {
        if depth == 0 {
            PacketTree::Leaf
        } else {
            Self::split(Self::full(depth - 1), Self::full(depth - 1))
        }
    }

    /// Only low bands split: the ordinary `levels`-stage pyramid.
    pub fn wavelet(levels: usize) -> Self {
        if levels == 0 {
            PacketTree::Leaf
        } else {
            Self::split(Self::wavelet(levels - 1), PacketTree::Leaf)
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            PacketTree::Leaf => 0,
            PacketTree::Split(l, h) => 1 + l.depth().max(h.depth()),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            PacketTree::Leaf => 1,
            PacketTree::Split(l, h) => l.leaves() + h.leaves(),
        }
    }

    fn write_preorder(&self, out: &mut String) {
        match self {
            PacketTree::Leaf => out.push('0'),
            PacketTree::Split(l, h) => {
                out.push('1');
                l.write_preorder(out);
                h.write_preorder(out);
            }
        }
    }
}

/// Preorder bits: `1` = split (low subtree, then high subtree), `0` = leaf.
impl fmt::Display for PacketTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_preorder(&mut s);
        f.write_str(&s)
    }
}

impl FromStr for PacketTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        fn parse(bits: &[u8], pos: &mut usize) -> Result<PacketTree> {
            let b = *bits.get(*pos).ok_or_else(|| {
                Error::InvalidInput("packet tree ends before every split has two children".into())
            })?;
            *pos += 1;
            match b {
                b'0' => Ok(PacketTree::Leaf),
                b'1' => {
                    let low = parse(bits, pos)?;
                    let high = parse(bits, pos)?;
                    Ok(PacketTree::split(low, high))
                }
                other => Err(Error::InvalidInput(format!(
                    "packet tree may only contain 0 and 1, found '{}'",
                    other as char
                ))),
            }
        }
        let bits = s.trim().as_bytes();
        let mut pos = 0;
        let tree = parse(bits, &mut pos)?;
        if pos != bits.len() {
            return Err(Error::InvalidInput(format!(
                "trailing characters after packet tree at position {pos}"
            )));
        }
        Ok(tree)
    }
}

/// One terminal band of a packet decomposition. `path` lists the filters
/// applied from the root, `L` or `H`; empty for the undivided signal.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketBand {
    pub path: String,
    pub coeffs: Vec<f64>,
}

fn check_tree(n: usize, tree: &PacketTree) -> Result<()> {
    let ell = log2_exact(n).ok_or(Error::InvalidLength {
        len: n,
        reason: "signal length must be a power of two",
    })?;
    if tree.depth() > ell {
        return Err(Error::InvalidInput(format!(
            "packet tree depth {} exceeds log2({n}) = {ell}",
            tree.depth()
        )));
    }
    Ok(())
}

/// Bands in preorder, low before high; concatenated they form the flat
/// coefficient sequence.
pub fn packet_analyze(
    signal: &[f64],
    filter: &FilterCoefficients,
    tree: &PacketTree,
    normalization: Normalization,
) -> Result<Vec<PacketBand>> {
    check_tree(signal.len(), tree)?;
    warn_if_not_orthogonal(filter);
    let step = StepFilters::new(filter, normalization);
    let mut bands = Vec::with_capacity(tree.leaves());
    descend(&step, signal.to_vec(), tree, String::new(), &mut bands);
    Ok(bands)
}

fn descend(step: &StepFilters, x: Vec<f64>, tree: &PacketTree, path: String, out: &mut Vec<PacketBand>) {
    match tree {
        PacketTree::Leaf => out.push(PacketBand { path, coeffs: x }),
        PacketTree::Split(l, h) => {
            let (mut low, mut high) = (Vec::new(), Vec::new());
            step.analyze(&x, &mut low, &mut high);
            descend(step, low, l, format!("{path}L"), out);
            descend(step, high, h, format!("{path}H"), out);
        }
    }
}

/// Inverse of [`packet_analyze`] given the flat coefficient sequence.
pub fn packet_synthesize(
    flat: &[f64],
    filter: &FilterCoefficients,
    tree: &PacketTree,
    normalization: Normalization,
) -> Result<Vec<f64>> {
    check_tree(flat.len(), tree)?;
    let step = StepFilters::new(filter, normalization);
    let mut pos = 0;
    let out = ascend(&step, flat, flat.len(), tree, &mut pos);
    debug_assert_eq!(pos, flat.len());
    Ok(out)
}

fn ascend(step: &StepFilters, flat: &[f64], len: usize, tree: &PacketTree, pos: &mut usize) -> Vec<f64> {
    match tree {
        PacketTree::Leaf => {
            let v = flat[*pos..*pos + len].to_vec();
            *pos += len;
            v
        }
        PacketTree::Split(l, h) => {
            let low = ascend(step, flat, len / 2, l, pos);
            let high = ascend(step, flat, len / 2, h, pos);
            let mut out = Vec::new();
            step.synthesize(&low, &high, &mut out);
            out
        }
    }
}
