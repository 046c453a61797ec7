//! Homomorphisms of a finite abelian group into itself, given by images of
//! the invariant-factor generators.

use super::group::{GroupElement, GroupSpec};
use super::sequence::Sequence;
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupMap {
    group: GroupSpec,
    images: Vec<GroupElement>,
    is_isomorphism: bool,
}

impl GroupMap {
    /// Builds the endomorphism sending the `i`-th generator `e_i` to
    /// `images[i]`. Fails unless `n_i * images[i] = 0` for each `i`, which is
    /// exactly the condition for the assignment to be well defined.
    pub fn new(group: GroupSpec, images: Vec<GroupElement>) -> Result<Self, AlgebraError> {
        if images.len() != group.rank() {
            return Err(AlgebraError::Parse(format!(
                "expected {} generator images, got {}",
                group.rank(),
                images.len()
            )));
        }
        for (img, &n) in images.iter().zip(group.invariant_factors()) {
            if !group.contains(img) {
                return Err(AlgebraError::GroupMismatch);
            }
            if group.scalar_mul(n, img) != group.zero() {
                return Err(AlgebraError::NotWellDefined);
            }
        }
        let mut map = GroupMap {
            group,
            images,
            is_isomorphism: false,
        };
        map.is_isomorphism = map.check_bijective();
        Ok(map)
    }

    pub fn identity(group: GroupSpec) -> Self {
        let images = (0..group.rank())
            .map(|i| {
                let mut coords = vec![0; group.rank()];
                coords[i] = 1;
                group.element(coords).unwrap()
            })
            .collect();
        GroupMap::new(group, images).unwrap()
    }

    /// The map `g -> k*g`.
    pub fn scalar(group: GroupSpec, k: u64) -> Self {
        let images = (0..group.rank())
            .map(|i| {
                let mut coords = vec![0; group.rank()];
                coords[i] = 1;
                group.scalar_mul(k, &group.element(coords).unwrap())
            })
            .collect();
        GroupMap::new(group, images).unwrap()
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_isomorphism
    }

    fn check_bijective(&self) -> bool {
        let mut seen = vec![false; self.group.order() as usize];
        for g in self.group.elements() {
            let idx = self.group.index_of(&self.apply(&g));
            if seen[idx] {
                return false;
            }
            seen[idx] = true;
        }
        true
    }

    pub fn apply(&self, g: &GroupElement) -> GroupElement {
        let mut acc = self.group.zero();
        for (c, img) in g.coords().iter().zip(&self.images) {
            acc = self.group.add(&acc, &self.group.scalar_mul(*c, img));
        }
        acc
    }

    /// Pushes a sequence forward elementwise, merging multiplicities when
    /// images collide.
    pub fn apply_sequence(&self, s: &Sequence) -> Result<Sequence, AlgebraError> {
        if s.group() != &self.group {
            return Err(AlgebraError::GroupMismatch);
        }
        Ok(Sequence::from_counts(
            self.group.clone(),
            s.iter().map(|(g, m)| (self.apply(g), m)),
        ))
    }

    /// All automorphisms of the group, found by filtering every generator
    /// image assignment. Exponential in rank; intended for small groups.
    pub fn automorphisms(group: &GroupSpec) -> Vec<GroupMap> {
        let els = group.elements();
        let rank = group.rank();
        let mut out = Vec::new();
        let mut images: Vec<GroupElement> = Vec::with_capacity(rank);
        fn rec(
            group: &GroupSpec,
            els: &[GroupElement],
            images: &mut Vec<GroupElement>,
            rank: usize,
            out: &mut Vec<GroupMap>,
        ) {
            if images.len() == rank {
                if let Ok(map) = GroupMap::new(group.clone(), images.clone()) {
                    if map.is_isomorphism() {
                        out.push(map);
                    }
                }
                return;
            }
            for e in els {
                images.push(e.clone());
                rec(group, els, images, rank, out);
                images.pop();
            }
        }
        rec(group, &els, &mut images, rank, &mut out);
        out
    }
}
