//! Stratum trees built by rank-ordered splitting of height intervals.
//!
//! A log starts as one stratum spanning all heights. Contacts are applied
//! rank by rank, greatest magnitude of change (rank 0) first; every contact
//! of a rank splits the leaf containing its height, so all contacts of one
//! rank that fall into the same leaf become sibling boundaries. Cross-bed
//! measurements and rock types attach to leaves only.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize, Serializer};

use crate::model::{ContactId, ContactPick, CrossBedId, CrossBedMeasurement, RockType, RockTypeId, StratumId};

/// Picks closer than this in true height are rejected as duplicates.
pub const DUPLICATE_HEIGHT_TOLERANCE_M: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StrataError {
    #[error("contacts {first} and {second} are {gap_m:e} m apart in true height")]
    DuplicateHeight {
        first: ContactId,
        second: ContactId,
        gap_m: f64,
    },
    #[error("contact {0} has a non-finite true height")]
    NonFiniteHeight(ContactId),
    #[error("contact {0} has no rank")]
    UnrankedContact(ContactId),
    #[error("unknown stratum {0}")]
    UnknownStratum(StratumId),
    #[error("stratum {0} is not a leaf")]
    NonLeafTarget(StratumId),
    #[error("unknown rock type {0}")]
    UnknownRockType(RockTypeId),
    #[error("unknown measurement {0}")]
    UnknownMeasurement(CrossBedId),
}

/// Half-open height interval `(low, high]` in meters; the extremes of a
/// tree are infinite and serialize as `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightInterval {
    pub low: f64,
    pub high: f64,
}

impl HeightInterval {
    pub const UNBOUNDED: HeightInterval = HeightInterval {
        low: f64::NEG_INFINITY,
        high: f64::INFINITY,
    };

    pub fn contains(&self, h: f64) -> bool {
        self.low < h && h <= self.high
    }

    pub fn thickness(&self) -> f64 {
        self.high - self.low
    }

    pub fn is_bounded(&self) -> bool {
        self.low.is_finite() && self.high.is_finite()
    }
}

impl Serialize for HeightInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let finite = |v: f64| v.is_finite().then_some(v);
        (finite(self.low), finite(self.high)).serialize(serializer)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stratum {
    pub id: StratumId,
    pub height_interval: HeightInterval,
    pub lower_contact_id: Option<ContactId>,
    pub upper_contact_id: Option<ContactId>,
    pub children: Vec<Stratum>,
    pub rock_type_id: Option<RockTypeId>,
    pub rock_type_uncertain: bool,
    pub crossbed_ids: BTreeSet<CrossBedId>,
}

impl Stratum {
    fn new(
        height_interval: HeightInterval,
        lower_contact_id: Option<ContactId>,
        upper_contact_id: Option<ContactId>,
    ) -> Self {
        Self {
            id: StratumId::from_bounds(lower_contact_id.as_ref(), upper_contact_id.as_ref()),
            height_interval,
            lower_contact_id,
            upper_contact_id,
            children: Vec::new(),
            rock_type_id: None,
            rock_type_uncertain: false,
            crossbed_ids: BTreeSet::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Leaves below this stratum (itself when it is a leaf), bottom to top.
    pub fn leaves(&self) -> Vec<&Stratum> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Stratum>) {
        if self.is_leaf() {
            out.push(self);
        } else {
            for child in &self.children {
                child.collect_leaves(out);
            }
        }
    }

    fn find(&self, id: &StratumId) -> Option<&Stratum> {
        if &self.id == id {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(id))
    }

    fn find_mut(&mut self, id: &StratumId) -> Option<&mut Stratum> {
        if &self.id == id {
            return Some(self);
        }
        self.children.iter_mut().find_map(|c| c.find_mut(id))
    }

    fn depth(&self) -> usize {
        self.children.iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    fn cut<'a>(&'a self, remaining: usize, out: &mut Vec<&'a Stratum>) {
        if remaining == 0 || self.is_leaf() {
            out.push(self);
        } else {
            for child in &self.children {
                child.cut(remaining - 1, out);
            }
        }
    }

    /// Splits this leaf at the given ascending heights.
    fn split(&mut self, boundaries: &[(f64, &ContactId)]) {
        let mut low = self.height_interval.low;
        let mut lower = self.lower_contact_id.clone();
        for &(h, contact) in boundaries {
            let interval = HeightInterval { low, high: h };
            self.children
                .push(Stratum::new(interval, lower.take(), Some(contact.clone())));
            low = h;
            lower = Some(contact.clone());
        }
        let interval = HeightInterval {
            low,
            high: self.height_interval.high,
        };
        self.children
            .push(Stratum::new(interval, lower, self.upper_contact_id.clone()));
    }

    fn split_leaves(&mut self, group: &[(f64, &ContactId)]) {
        if self.is_leaf() {
            let inside: Vec<_> = group
                .iter()
                .filter(|(h, _)| self.height_interval.contains(*h))
                .copied()
                .collect();
            if !inside.is_empty() {
                self.split(&inside);
            }
        } else {
            for child in &mut self.children {
                child.split_leaves(group);
            }
        }
    }
}

/// Persistent per-leaf annotations, keyed by stratum id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumAnnotation {
    pub stratum_id: StratumId,
    #[serde(default)]
    pub rock_type_id: Option<RockTypeId>,
    #[serde(default)]
    pub rock_type_uncertain: bool,
    #[serde(default)]
    pub crossbed_ids: BTreeSet<CrossBedId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumTree {
    pub root: Stratum,
}

impl Default for StratumTree {
    fn default() -> Self {
        Self {
            root: Stratum::new(HeightInterval::UNBOUNDED, None, None),
        }
    }
}

impl StratumTree {
    /// Builds the tree for a set of picks with heights already assigned.
    pub fn build(
        picks: &[ContactPick],
        ranks: &BTreeMap<ContactId, u32>,
    ) -> Result<Self, StrataError> {
        let mut by_height: Vec<(f64, &ContactId)> = Vec::with_capacity(picks.len());
        for pick in picks {
            if !pick.true_height_m.is_finite() {
                return Err(StrataError::NonFiniteHeight(pick.contact_id.clone()));
            }
            by_height.push((pick.true_height_m, &pick.contact_id));
        }
        by_height.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
        if let Some(w) = by_height
            .windows(2)
            .find(|w| w[1].0 - w[0].0 <= DUPLICATE_HEIGHT_TOLERANCE_M)
        {
            return Err(StrataError::DuplicateHeight {
                first: w[0].1.clone(),
                second: w[1].1.clone(),
                gap_m: w[1].0 - w[0].0,
            });
        }

        let mut by_rank: BTreeMap<u32, Vec<(f64, &ContactId)>> = BTreeMap::new();
        for (h, contact) in by_height {
            let rank = *ranks
                .get(contact)
                .ok_or_else(|| StrataError::UnrankedContact(contact.clone()))?;
            by_rank.entry(rank).or_default().push((h, contact));
        }

        let mut tree = StratumTree::default();
        for group in by_rank.values() {
            tree.root.split_leaves(group);
        }
        Ok(tree)
    }

    pub fn leaves(&self) -> Vec<&Stratum> {
        self.root.leaves()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn find(&self, id: &StratumId) -> Option<&Stratum> {
        self.root.find(id)
    }

    /// Strata at depth `level` (root is 0) from bottom to top. Branches
    /// shallower than `level` contribute their leaf, so the cut always tiles
    /// the root interval.
    pub fn cut_at_level(&self, level: usize) -> Vec<&Stratum> {
        let mut out = Vec::new();
        self.root.cut(level, &mut out);
        out
    }

    fn leaf_mut(&mut self, id: &StratumId) -> Result<&mut Stratum, StrataError> {
        let stratum = self
            .root
            .find_mut(id)
            .ok_or_else(|| StrataError::UnknownStratum(id.clone()))?;
        if stratum.is_leaf() {
            Ok(stratum)
        } else {
            Err(StrataError::NonLeafTarget(id.clone()))
        }
    }

    /// Sets the rock type of a leaf; only leaves (the primary log) carry
    /// rock types, so any other target is unknown.
    pub fn assign_rock_type(
        &mut self,
        stratum: &StratumId,
        rock_type: &RockTypeId,
        uncertain: bool,
        catalog: &[RockType],
    ) -> Result<(), StrataError> {
        if !catalog.iter().any(|r| &r.id == rock_type) {
            return Err(StrataError::UnknownRockType(rock_type.clone()));
        }
        let leaf = self
            .leaf_mut(stratum)
            .map_err(|_| StrataError::UnknownStratum(stratum.clone()))?;
        leaf.rock_type_id = Some(rock_type.clone());
        leaf.rock_type_uncertain = uncertain;
        Ok(())
    }

    pub fn clear_rock_type(&mut self, stratum: &StratumId) -> Result<(), StrataError> {
        let leaf = self
            .leaf_mut(stratum)
            .map_err(|_| StrataError::UnknownStratum(stratum.clone()))?;
        leaf.rock_type_id = None;
        leaf.rock_type_uncertain = false;
        Ok(())
    }

    /// Sets only the uncertainty flag of a leaf's rock type.
    pub fn set_rock_type_uncertain(
        &mut self,
        stratum: &StratumId,
        uncertain: bool,
    ) -> Result<(), StrataError> {
        let leaf = self
            .leaf_mut(stratum)
            .map_err(|_| StrataError::UnknownStratum(stratum.clone()))?;
        leaf.rock_type_uncertain = uncertain;
        Ok(())
    }

    /// Replaces the cross-bed set of a leaf.
    pub fn assign_crossbeds(
        &mut self,
        stratum: &StratumId,
        crossbeds: BTreeSet<CrossBedId>,
        known: &[CrossBedMeasurement],
    ) -> Result<(), StrataError> {
        if let Some(missing) = crossbeds
            .iter()
            .find(|id| !known.iter().any(|m| &m.id == *id))
        {
            return Err(StrataError::UnknownMeasurement(missing.clone()));
        }
        self.leaf_mut(stratum)?.crossbed_ids = crossbeds;
        Ok(())
    }

    /// Dip azimuths of every measurement on the leaves below `stratum`,
    /// bottom to top and by measurement id within a leaf.
    pub fn aggregate_azimuths(
        &self,
        stratum: &StratumId,
        crossbeds: &[CrossBedMeasurement],
    ) -> Result<Vec<f64>, StrataError> {
        let stratum = self
            .find(stratum)
            .ok_or_else(|| StrataError::UnknownStratum(stratum.clone()))?;
        stratum
            .leaves()
            .into_iter()
            .flat_map(|leaf| &leaf.crossbed_ids)
            .map(|id| {
                crossbeds
                    .iter()
                    .find(|m| &m.id == id)
                    .map(|m| m.dip_azimuth_deg)
                    .ok_or_else(|| StrataError::UnknownMeasurement(id.clone()))
            })
            .collect()
    }

    /// Annotations of every leaf that carries any.
    pub fn annotations(&self) -> Vec<StratumAnnotation> {
        self.leaves()
            .into_iter()
            .filter(|l| l.rock_type_id.is_some() || l.rock_type_uncertain || !l.crossbed_ids.is_empty())
            .map(|l| StratumAnnotation {
                stratum_id: l.id.clone(),
                rock_type_id: l.rock_type_id.clone(),
                rock_type_uncertain: l.rock_type_uncertain,
                crossbed_ids: l.crossbed_ids.clone(),
            })
            .collect()
    }

    /// Re-attaches annotations to leaves with matching ids and returns the
    /// ids that no longer name a leaf.
    pub fn apply_annotations(&mut self, annotations: &[StratumAnnotation]) -> Vec<StratumId> {
        let mut orphans = Vec::new();
        for a in annotations {
            match self.leaf_mut(&a.stratum_id) {
                Ok(leaf) => {
                    leaf.rock_type_id = a.rock_type_id.clone();
                    leaf.rock_type_uncertain = a.rock_type_uncertain;
                    leaf.crossbed_ids = a.crossbed_ids.clone();
                }
                Err(_) => orphans.push(a.stratum_id.clone()),
            }
        }
        orphans
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point3;
    use crate::model::default_rock_catalog;

    fn picks(entries: &[(&str, f64, u32)]) -> (Vec<ContactPick>, BTreeMap<ContactId, u32>) {
        let picks = entries
            .iter()
            .map(|&(id, h, _)| ContactPick {
                contact_id: id.into(),
                point: Point3::new(0.0, 0.0, h),
                true_height_m: h,
            })
            .collect();
        let ranks = entries.iter().map(|&(id, _, r)| (id.into(), r)).collect();
        (picks, ranks)
    }

    fn bounds(strata: &[&Stratum]) -> Vec<(f64, f64)> {
        strata
            .iter()
            .map(|s| (s.height_interval.low, s.height_interval.high))
            .collect()
    }

    const INF: f64 = f64::INFINITY;

    fn three_contact_tree() -> StratumTree {
        let (p, r) = picks(&[("a", 1.0, 0), ("b", 2.0, 0), ("c", 1.5, 1)]);
        StratumTree::build(&p, &r).unwrap()
    }

    fn crossbed(id: &str, azimuth: f64) -> CrossBedMeasurement {
        CrossBedMeasurement {
            id: id.into(),
            source_points: Vec::new(),
            dip_azimuth_deg: azimuth,
            dip_angle_deg: 20.0,
            centroid: Point3::origin(),
        }
    }

    #[test]
    fn empty_picks_give_single_root() {
        let tree = StratumTree::build(&[], &BTreeMap::new()).unwrap();
        assert_eq!(tree.leaf_count(), 1);
        assert_eq!(tree.root.height_interval, HeightInterval::UNBOUNDED);
        assert_eq!(tree.root.id.as_str(), "..");
    }

    #[test]
    fn rank_zero_contacts_are_root_siblings() {
        let tree = three_contact_tree();
        assert_eq!(
            bounds(&tree.root.children.iter().collect::<Vec<_>>()),
            vec![(-INF, 1.0), (1.0, 2.0), (2.0, INF)]
        );
        assert_eq!(
            bounds(&tree.root.children[1].children.iter().collect::<Vec<_>>()),
            vec![(1.0, 1.5), (1.5, 2.0)]
        );
        assert_eq!(tree.leaf_count(), 4);
        assert_eq!(tree.depth(), 2);
        let mid = &tree.root.children[1];
        assert_eq!(mid.id.as_str(), "a..b");
        assert_eq!(mid.children[0].id.as_str(), "a..c");
    }

    #[test]
    fn duplicate_heights_are_rejected() {
        let (p, r) = picks(&[("a", 1.0, 0), ("b", 1.0 + 5e-7, 1)]);
        assert!(matches!(
            StratumTree::build(&p, &r),
            Err(StrataError::DuplicateHeight { .. })
        ));
        let (p, _) = picks(&[("a", 1.0, 0)]);
        assert_eq!(
            StratumTree::build(&p, &BTreeMap::new()),
            Err(StrataError::UnrankedContact("a".into()))
        );
    }

    #[test]
    fn level_cuts() {
        let tree = three_contact_tree();
        assert_eq!(tree.cut_at_level(0).len(), 1);
        assert_eq!(
            bounds(&tree.cut_at_level(1)),
            vec![(-INF, 1.0), (1.0, 2.0), (2.0, INF)]
        );
        assert_eq!(bounds(&tree.cut_at_level(99)), bounds(&tree.leaves()));
        // ragged branch: the shallow leaves stand in at level 2
        assert_eq!(
            bounds(&tree.cut_at_level(2)),
            vec![(-INF, 1.0), (1.0, 1.5), (1.5, 2.0), (2.0, INF)]
        );
    }

    #[test]
    fn unit_and_bedset_levels() {
        // two unit contacts (rank 0) with bedset contacts (rank 1) between
        let (p, r) = picks(&[
            ("u1", 0.0, 0),
            ("b1", 0.8, 1),
            ("b2", 1.7, 1),
            ("u2", 2.5, 0),
            ("b3", 3.1, 1),
            ("u3", 4.0, 0),
        ]);
        let tree = StratumTree::build(&p, &r).unwrap();
        let units = tree.cut_at_level(1);
        assert_eq!(units.len(), 4);
        assert!(units.iter().all(|s| {
            s.lower_contact_id.as_ref().is_none_or(|c| c.as_str().starts_with('u'))
                && s.upper_contact_id.as_ref().is_none_or(|c| c.as_str().starts_with('u'))
        }));
        assert_eq!(tree.leaf_count(), 7);
        assert_eq!(units[1].children.len(), 3);
        assert_eq!(units[2].children.len(), 2);
    }

    #[test]
    fn rock_type_assignment() {
        let mut tree = three_contact_tree();
        let catalog = default_rock_catalog();
        let leaf: StratumId = "a..c".into();
        tree.assign_rock_type(&leaf, &"fine-sand".into(), false, &catalog)
            .unwrap();
        let s = tree.find(&leaf).unwrap();
        assert_eq!(s.rock_type_id, Some("fine-sand".into()));
        assert!(!s.rock_type_uncertain);

        tree.assign_rock_type(&leaf, &"silt".into(), true, &catalog)
            .unwrap();
        let s = tree.find(&leaf).unwrap();
        assert_eq!(s.rock_type_id, Some("silt".into()));
        assert!(s.rock_type_uncertain);

        assert_eq!(
            tree.assign_rock_type(&"a..b".into(), &"silt".into(), false, &catalog),
            Err(StrataError::UnknownStratum("a..b".into()))
        );
        assert_eq!(
            tree.assign_rock_type(&leaf, &"granite".into(), false, &catalog),
            Err(StrataError::UnknownRockType("granite".into()))
        );
    }

    #[test]
    fn crossbed_assignment_and_aggregation() {
        let mut tree = three_contact_tree();
        let known: Vec<_> = (1..=10).map(|i| crossbed(&format!("m{i:02}"), 90.0 + i as f64)).collect();
        let all: BTreeSet<CrossBedId> = known.iter().map(|m| m.id.clone()).collect();
        let leaf: StratumId = "..a".into();

        tree.assign_crossbeds(&leaf, all.clone(), &known).unwrap();
        assert_eq!(tree.find(&leaf).unwrap().crossbed_ids.len(), 10);
        tree.assign_crossbeds(&leaf, BTreeSet::new(), &known).unwrap();
        assert!(tree.find(&leaf).unwrap().crossbed_ids.is_empty());

        assert_eq!(
            tree.assign_crossbeds(&"a..b".into(), all.clone(), &known),
            Err(StrataError::NonLeafTarget("a..b".into()))
        );
        assert_eq!(
            tree.assign_crossbeds(&"x..y".into(), all, &known),
            Err(StrataError::UnknownStratum("x..y".into()))
        );
        let bogus = BTreeSet::from(["nope".into()]);
        assert_eq!(
            tree.assign_crossbeds(&leaf, bogus, &known),
            Err(StrataError::UnknownMeasurement("nope".into()))
        );

        let pair = [crossbed("p1", 90.0), crossbed("p2", 95.0)];
        let ids = |s: &[&str]| s.iter().map(|&i| CrossBedId::from(i)).collect::<BTreeSet<_>>();
        let mut known = known;
        known.extend(pair);
        tree.assign_crossbeds(&"a..c".into(), ids(&["p2", "p1"]), &known)
            .unwrap();
        assert_eq!(
            tree.aggregate_azimuths(&"a..c".into(), &known).unwrap(),
            vec![90.0, 95.0]
        );
        tree.assign_crossbeds(&"c..b".into(), ids(&["m01", "m02", "m03"]), &known)
            .unwrap();
        let unit = tree.aggregate_azimuths(&"a..b".into(), &known).unwrap();
        assert_eq!(unit, vec![90.0, 95.0, 91.0, 92.0, 93.0]);
        assert_eq!(tree.aggregate_azimuths(&"..".into(), &known).unwrap().len(), 5);
    }

    #[test]
    fn annotations_survive_rebuild() {
        let mut tree = three_contact_tree();
        let catalog = default_rock_catalog();
        tree.assign_rock_type(&"c..b".into(), &"clay".into(), true, &catalog)
            .unwrap();
        tree.assign_rock_type(&"a..c".into(), &"silt".into(), false, &catalog)
            .unwrap();
        let notes = tree.annotations();
        assert_eq!(notes.len(), 2);

        // moving contact c keeps both ids; removing it orphans both
        let (p, r) = picks(&[("a", 1.0, 0), ("b", 2.0, 0), ("c", 1.2, 1)]);
        let mut moved = StratumTree::build(&p, &r).unwrap();
        assert!(moved.apply_annotations(&notes).is_empty());
        assert_eq!(moved.annotations(), notes);

        let (p, r) = picks(&[("a", 1.0, 0), ("b", 2.0, 0)]);
        let mut removed = StratumTree::build(&p, &r).unwrap();
        assert_eq!(removed.apply_annotations(&notes).len(), 2);
    }
}
