//! Finite groups as multiplication tables and their unitary
//! representations.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ONE, ZERO};

/// Group elements are indices `0..order`.
pub type Element = usize;

/// Associativity is checked on every triple `(a, b, c)` with `a` below
/// this cap, which is exhaustive for groups up to this order.
pub const ASSOCIATIVITY_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mult: Vec<Element>,
    identity: Element,
    inverse: Vec<Element>,
    labels: Vec<String>,
}

impl FiniteGroup {
    /// Cyclic group `Z_n` with `i * j = (i + j) mod n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group needs a positive order");
        let mult = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        let inverse = (0..n).map(|i| (n - i) % n).collect();
        Self {
            order: n,
            mult,
            identity: 0,
            inverse,
            labels: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    /// Symmetric group on `n` letters. Element labels are the images
    /// `[p(0) p(1) ...]`, elements ordered lexicographically, and
    /// `(p * q)(i) = p(q(i))`.
    pub fn symmetric(n: usize) -> Self {
        let perms = permutations(n);
        let index_of = |p: &[usize]| perms.iter().position(|q| q == p).expect("closed");
        let order = perms.len();
        let mut table = vec![vec![0; order]; order];
        for (a, p) in perms.iter().enumerate() {
            for (b, q) in perms.iter().enumerate() {
                let composed: Vec<usize> = (0..n).map(|i| p[q[i]]).collect();
                table[a][b] = index_of(&composed);
            }
        }
        let labels = perms
            .iter()
            .map(|p| {
                let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                format!("[{}]", parts.join(" "))
            })
            .collect();
        Self::from_table(&table, Some(labels)).expect("permutation composition is a group")
    }

    /// Dihedral group of order `2n`: elements `r^k` (index `k`) then
    /// `s r^k` (index `n + k`).
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 1, "dihedral group needs n >= 1");
        let order = 2 * n;
        let decode = |x: usize| (x >= n, x % n);
        let encode = |s: bool, k: usize| if s { n + k % n } else { k % n };
        let table: Vec<Vec<Element>> = (0..order)
            .map(|a| {
                let (sa, ka) = decode(a);
                (0..order)
                    .map(|b| {
                        let (sb, kb) = decode(b);
                        // s^a r^ka s^b r^kb = s^(a+b) r^(±ka + kb)
                        let k = if sb { (n - ka + kb) % n } else { (ka + kb) % n };
                        encode(sa ^ sb, k)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(&table, None).expect("dihedral table is a group")
    }

    /// Validates an arbitrary multiplication table.
    pub fn from_table(table: &[Vec<Element>], labels: Option<Vec<String>>) -> Result<Self> {
        let order = table.len();
        if order == 0 || table.iter().any(|row| row.len() != order) {
            return Err(Error::MalformedTable { order });
        }
        if table.iter().flatten().any(|&x| x >= order) {
            return Err(Error::MalformedTable { order });
        }
        let mult: Vec<Element> = table.iter().flatten().copied().collect();
        let at = |a: usize, b: usize| mult[a * order + b];

        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or(Error::NoIdentity)?;
        let inverse = (0..order)
            .map(|x| {
                (0..order)
                    .find(|&y| at(x, y) == identity && at(y, x) == identity)
                    .ok_or(Error::NoInverse(x))
            })
            .collect::<Result<Vec<Element>>>()?;
        let limit = order.min(ASSOCIATIVITY_CAP);
        for a in 0..limit {
            for b in 0..order {
                for c in 0..order {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(Error::NotAssociative(a, b, c));
                    }
                }
            }
        }
        let labels = match labels {
            Some(l) if l.len() == order => l,
            Some(l) => {
                return Err(Error::Dimension {
                    context: "group labels",
                    expected: order,
                    found: l.len(),
                })
            }
            None => (0..order).map(|i| i.to_string()).collect(),
        };
        Ok(Self {
            order,
            mult,
            identity,
            inverse,
            labels,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn elements(&self) -> core::ops::Range<Element> {
        0..self.order
    }

    pub fn identity(&self) -> Element {
        self.identity
    }

    pub fn mul(&self, a: Element, b: Element) -> Element {
        self.mult[a * self.order + b]
    }

    pub fn inverse(&self, a: Element) -> Element {
        self.inverse[a]
    }

    pub fn label(&self, a: Element) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Looks up an element by label, falling back to a decimal index.
    pub fn element_by_label(&self, label: &str) -> Option<Element> {
        self.labels
            .iter()
            .position(|l| l == label)
            .or_else(|| label.parse::<usize>().ok().filter(|&i| i < self.order))
    }

    pub fn is_central(&self, h: Element) -> bool {
        self.elements().all(|g| self.mul(g, h) == self.mul(h, g))
    }

    /// Same multiplication table (labels are cosmetic).
    pub fn same_group(&self, other: &Self) -> bool {
        self.mult == other.mult
    }

    pub fn table(&self) -> Vec<Vec<Element>> {
        self.mult
            .chunks(self.order)
            .map(|row| row.to_vec())
            .collect()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

/// A validated unitary representation `g -> U(g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryRep {
    group: Arc<FiniteGroup>,
    dim: usize,
    matrices: Vec<ComplexMatrix>,
}

impl UnitaryRep {
    /// Validates unitarity, the homomorphism law and `U(e) = I`.
    pub fn new(
        group: Arc<FiniteGroup>,
        matrices: Vec<ComplexMatrix>,
        cfg: &Config,
    ) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::Dimension {
                context: "representation matrices",
                expected: group.order(),
                found: matrices.len(),
            });
        }
        let dim = matrices[0].dim();
        for m in &matrices {
            if m.dim() != dim {
                return Err(Error::Dimension {
                    context: "representation matrix",
                    expected: dim,
                    found: m.dim(),
                });
            }
        }
        let tol = cfg.tolerance;
        for (g, m) in matrices.iter().enumerate() {
            let deviation = m.unitarity_deviation();
            if deviation > tol {
                return Err(Error::RepNotUnitary {
                    element: g,
                    deviation,
                });
            }
        }
        let e = group.identity();
        let deviation = matrices[e].max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > tol {
            return Err(Error::RepNotHomomorphism(e, e, deviation));
        }
        for g in group.elements() {
            for h in group.elements() {
                let lhs = &matrices[group.mul(g, h)];
                let deviation = lhs.max_abs_diff(&matrices[g].matmul(&matrices[h]));
                if deviation > tol {
                    return Err(Error::RepNotHomomorphism(g, h, deviation));
                }
            }
        }
        Ok(Self {
            group,
            dim,
            matrices,
        })
    }

    /// `U(g) = I_dim` for every `g`.
    pub fn trivial(group: Arc<FiniteGroup>, dim: usize) -> Self {
        let matrices = vec![ComplexMatrix::identity(dim); group.order()];
        Self {
            group,
            dim,
            matrices,
        }
    }

    /// Left-regular representation: `U(g)|h> = |gh>`.
    pub fn regular(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        let matrices = group
            .elements()
            .map(|g| {
                ComplexMatrix::from_fn(
                    n,
                    |row, col| {
                        if group.mul(g, col) == row {
                            ONE
                        } else {
                            ZERO
                        }
                    },
                )
            })
            .collect();
        Self {
            group,
            dim: n,
            matrices,
        }
    }

    /// `g -> U1(g) ⊗ U2(g)`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if !self.group.same_group(&other.group) {
            return Err(Error::GroupMismatch);
        }
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| a.kron(b))
            .collect();
        Ok(Self {
            group: self.group.clone(),
            dim: self.dim * other.dim,
            matrices,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: Element) -> &ComplexMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    /// `g.A = U(g) A U(g)^†`. Panics on dimension mismatch; see [`Self::try_act`].
    pub fn act(&self, g: Element, a: &ComplexMatrix) -> ComplexMatrix {
        self.matrices[g].conjugate(a)
    }

    pub fn try_act(&self, g: Element, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.dim() != self.dim {
            return Err(Error::Dimension {
                context: "group action",
                expected: self.dim,
                found: a.dim(),
            });
        }
        Ok(self.act(g, a))
    }

    pub fn is_trivial(&self, tol: f64) -> bool {
        let id = ComplexMatrix::identity(self.dim);
        self.matrices.iter().all(|m| {
            // trivial action means scalar unitaries
            let phase = m[(0, 0)];
            m.approx_eq(&id.scale(phase), tol)
        })
    }
}
