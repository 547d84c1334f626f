//! JSON cover files.
//!
//! Points are referenced everywhere by their index in `space.points`;
//! member lists are written sorted ascending.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Cover, CoverSet, Metric, Provenance, SampleSpace};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverFile {
    pub space: SpaceFile,
    pub sets: Vec<SetFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<Value>,
    #[serde(default)]
    pub coords: Option<Vec<Vec<f64>>>,
    pub metric: MetricFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricFile {
    Named(String),
    Matrix { matrix: Vec<Vec<f64>> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Explicit,
    Ball,
    Interval,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SetFile {
    pub id: usize,
    pub kind: SetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
}

fn point_label(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::input(format!("point identifier must be a string or number, got {other}"))),
    }
}

impl SpaceFile {
    pub fn into_space(self) -> Result<SampleSpace> {
        let labels = self.points.iter().map(point_label).collect::<Result<Vec<_>>>()?;
        let metric = match self.metric {
            MetricFile::Named(name) if name == "euclidean" => Metric::Euclidean,
            MetricFile::Named(name) => return Err(Error::input(format!("unknown metric {name:?}"))),
            MetricFile::Matrix { matrix } => Metric::Matrix(matrix),
        };
        SampleSpace::new(labels, self.coords, metric)
    }

    pub fn from_space(space: &SampleSpace) -> Self {
        SpaceFile {
            points: space.labels().iter().cloned().map(Value::String).collect(),
            coords: space.coords().map(|c| c.to_vec()),
            metric: match space.metric() {
                Metric::Euclidean => MetricFile::Named("euclidean".into()),
                Metric::Matrix(m) => MetricFile::Matrix { matrix: m.clone() },
            },
        }
    }
}

impl SetFile {
    fn into_set(self, space: &SampleSpace) -> Result<CoverSet> {
        let id = self.id;
        let built = match self.kind {
            SetKind::Explicit => {
                let members =
                    self.members.ok_or_else(|| Error::input(format!("set {id}: explicit set without members")))?;
                return CoverSet::explicit(space, members);
            }
            SetKind::Ball => {
                let (center, radius) = self
                    .center
                    .zip(self.radius)
                    .ok_or_else(|| Error::input(format!("set {id}: ball needs center and radius")))?;
                CoverSet::ball(space, center, radius)?
            }
            SetKind::Interval => {
                let (lo, hi) = self
                    .lo
                    .zip(self.hi)
                    .ok_or_else(|| Error::input(format!("set {id}: interval needs lo and hi")))?;
                CoverSet::interval(space, lo, hi)?
            }
        };
        if let Some(members) = self.members {
            let listed = CoverSet::explicit(space, members)?;
            if listed.bits() != built.bits() {
                return Err(Error::input(format!("set {id}: listed members disagree with its geometry")));
            }
        }
        Ok(built)
    }

    fn from_set(id: usize, set: &CoverSet) -> Self {
        let members = Some(set.members().collect());
        let mut file = SetFile { id, kind: SetKind::Explicit, members, center: None, radius: None, lo: None, hi: None };
        match *set.provenance() {
            Provenance::Ball { center, radius } => {
                file.kind = SetKind::Ball;
                file.center = Some(center);
                file.radius = Some(radius);
            }
            Provenance::Interval { lo, hi } => {
                file.kind = SetKind::Interval;
                file.lo = Some(lo);
                file.hi = Some(hi);
            }
            _ => {}
        }
        file
    }
}

impl CoverFile {
    pub fn into_cover(self) -> Result<Cover> {
        let space = Arc::new(self.space.into_space()?);
        let mut sets: Vec<SetFile> = self.sets;
        sets.sort_by_key(|s| s.id);
        if let Some((i, s)) = sets.iter().enumerate().find(|(i, s)| s.id != *i) {
            return Err(Error::input(format!("set ids must be 0..{}; found {} at position {i}", sets.len(), s.id)));
        }
        let sets = sets.into_iter().map(|s| s.into_set(&space)).collect::<Result<Vec<_>>>()?;
        Cover::new(space, sets)
    }

    pub fn from_cover(cover: &Cover) -> Self {
        CoverFile {
            space: SpaceFile::from_space(cover.space()),
            sets: cover.sets().iter().enumerate().map(|(i, s)| SetFile::from_set(i, s)).collect(),
        }
    }
}

impl Cover {
    pub fn from_json(text: &str) -> Result<Cover> {
        serde_json::from_str::<CoverFile>(text)?.into_cover()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CoverFile::from_cover(self)).expect("cover serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{circle_arcs, interval_cover, unit_interval_sample};

    #[test]
    fn explicit_cover_parses() {
        let text = r#"{"space": {"points": ["a", "b", 3], "coords": null, "metric": {"matrix": [[0,1,2],[1,0,1],[2,1,0]]}},
                       "sets": [{"id": 1, "kind": "explicit", "members": [2]}, {"id": 0, "kind": "explicit", "members": [0, 1]}]}"#;
        let cover = Cover::from_json(text).unwrap();
        assert_eq!(cover.len(), 2);
        assert_eq!(cover.set(0).members().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(cover.space().label(2), "3");
    }

    #[test]
    fn geometric_covers_survive_a_round_trip() {
        let arcs = circle_arcs(4, 24, 0.3).unwrap();
        assert_eq!(Cover::from_json(&arcs.to_json()).unwrap(), arcs);
        let space = Arc::new(unit_interval_sample(0.1, 0.0, 1.0).unwrap());
        let intervals = interval_cover(space, &[(-0.1, 0.55), (0.45, 1.1)]).unwrap();
        assert_eq!(Cover::from_json(&intervals.to_json()).unwrap(), intervals);
    }

    #[test]
    fn malformed_sets_are_rejected() {
        let base = r#"{"space": {"points": ["a", "b"], "coords": [[0.0], [1.0]], "metric": "euclidean"}, "sets": SETS}"#;
        for sets in [
            r#"[{"id": 0, "kind": "explicit", "members": [5]}]"#,
            r#"[{"id": 0, "kind": "ball", "center": 0}]"#,
            r#"[{"id": 0, "kind": "interval", "lo": -1, "hi": 0.5, "members": [0, 1]}]"#,
            r#"[{"id": 3, "kind": "explicit", "members": [0]}]"#,
        ] {
            let text = base.replace("SETS", sets);
            assert!(matches!(Cover::from_json(&text), Err(Error::Input(_))), "{sets}");
        }
        let text = base.replace("euclidean", "taxicab").replace("SETS", "[]");
        assert!(Cover::from_json(&text).is_err());
    }
}
