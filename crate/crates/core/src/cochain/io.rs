//! JSON cochain files.
//!
//! Edges may be listed in either orientation (a reversed edge carries the
//! inverse); triangles must be listed ascending. Unlisted simplices take
//! the identity.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Cochain0, Cochain1, Cochain2};
use crate::error::{Error, Result};
use crate::groups::{GroupElement, GroupSpec};
use crate::nerve::Nerve;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CochainFile {
    pub spec: GroupSpec,
    pub degree: u8,
    pub values: Vec<CochainValue>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CochainValue {
    pub simplex: Vec<usize>,
    pub value: Value,
}

impl CochainFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cochain serializes")
    }

    fn expect_degree(&self, degree: u8) -> Result<()> {
        if self.degree == degree {
            Ok(())
        } else {
            Err(Error::input(format!("expected a degree-{degree} cochain, file has degree {}", self.degree)))
        }
    }

    fn entries(&self, size: usize) -> Result<Vec<(Vec<usize>, GroupElement)>> {
        self.values
            .iter()
            .map(|v| {
                if v.simplex.len() != size {
                    return Err(Error::input(format!(
                        "simplex {:?} has {} vertices, expected {size}",
                        v.simplex,
                        v.simplex.len()
                    )));
                }
                Ok((v.simplex.clone(), self.spec.element_from_json(&v.value)?))
            })
            .collect()
    }

    pub fn into_cochain0(&self, nerve: Arc<Nerve>) -> Result<Cochain0> {
        self.expect_degree(0)?;
        let mut values = vec![None; nerve.vertex_count()];
        for (s, g) in self.entries(1)? {
            let slot = values.get_mut(s[0]).ok_or_else(|| Error::input(format!("vertex {} not in the nerve", s[0])))?;
            if slot.replace(g).is_some() {
                return Err(Error::input(format!("vertex {} given twice", s[0])));
            }
        }
        let values = values.into_iter().map(|g| g.unwrap_or_else(|| self.spec.identity())).collect();
        Cochain0::new(nerve, self.spec, values)
    }

    pub fn into_cochain1(&self, nerve: Arc<Nerve>) -> Result<Cochain1> {
        self.expect_degree(1)?;
        let entries = self.entries(2)?.into_iter().map(|(s, g)| ((s[0], s[1]), g));
        Cochain1::from_oriented(nerve, self.spec, entries)
    }

    pub fn into_cochain2(&self, nerve: Arc<Nerve>) -> Result<Cochain2> {
        self.expect_degree(2)?;
        let mut values = vec![None; nerve.triangles().len()];
        for (s, g) in self.entries(3)? {
            let t = [s[0], s[1], s[2]];
            if !(t[0] < t[1] && t[1] < t[2]) {
                return Err(Error::input(format!("triangle {t:?} must be listed in ascending order")));
            }
            let id = nerve.triangle_id(t).ok_or_else(|| Error::input(format!("{t:?} is not a triangle of the nerve")))?;
            if values[id].replace(g).is_some() {
                return Err(Error::input(format!("triangle {t:?} given twice")));
            }
        }
        let values = values.into_iter().map(|g| g.unwrap_or_else(|| self.spec.identity())).collect();
        Cochain2::new(nerve, self.spec, values)
    }

    fn listing<'a>(
        spec: GroupSpec,
        degree: u8,
        simplices: impl Iterator<Item = Vec<usize>>,
        values: &'a [GroupElement],
    ) -> Self {
        let values = simplices
            .zip(values)
            .map(|(simplex, g)| CochainValue { simplex, value: spec.element_to_json(g) })
            .collect();
        CochainFile { spec, degree, values }
    }

    /// Every value, listed in stored order.
    pub fn from_cochain0(c: &Cochain0) -> Self {
        Self::listing(*c.spec(), 0, (0..c.values().len()).map(|v| vec![v]), c.values())
    }

    pub fn from_cochain1(c: &Cochain1) -> Self {
        Self::listing(*c.spec(), 1, c.nerve().edges().iter().map(|e| e.to_vec()), c.values())
    }

    pub fn from_cochain2(c: &Cochain2) -> Self {
        Self::listing(*c.spec(), 2, c.nerve().triangles().iter().map(|t| t.to_vec()), c.values())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Arc<Nerve> {
        Arc::new(Nerve::from_simplices(3, &[[0, 1], [1, 2], [0, 2]], &[[0, 1, 2]]).unwrap())
    }

    #[test]
    fn reversed_edges_store_inverses() {
        let text = r#"{"spec": {"group": "Z"}, "degree": 1, "values": [{"simplex": [2, 0], "value": 1}]}"#;
        let r = CochainFile::from_json(text).unwrap().into_cochain1(triangle()).unwrap();
        assert_eq!(r.get(0, 2).unwrap(), GroupElement::Int(-1));
        assert_eq!(r.get(0, 1).unwrap(), GroupElement::Int(0));
    }

    #[test]
    fn round_trip_all_degrees() {
        let nerve = triangle();
        let spec = GroupSpec::gl(2).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let t = Cochain0::random(nerve.clone(), spec, &mut rng);
        let back = CochainFile::from_json(&CochainFile::from_cochain0(&t).to_json()).unwrap();
        assert_eq!(back.into_cochain0(nerve.clone()).unwrap(), t);
        let r = Cochain1::random(nerve.clone(), spec, &mut rng);
        let back = CochainFile::from_json(&CochainFile::from_cochain1(&r).to_json()).unwrap();
        assert_eq!(back.into_cochain1(nerve.clone()).unwrap(), r);
        let v = Cochain2::identity(nerve.clone(), GroupSpec::z());
        let back = CochainFile::from_json(&CochainFile::from_cochain2(&v).to_json()).unwrap();
        assert_eq!(back.into_cochain2(nerve).unwrap(), v);
    }

    #[test]
    fn bad_listings_are_rejected() {
        let nerve = triangle();
        for values in [
            r#"[{"simplex": [0, 3], "value": 1}]"#,
            r#"[{"simplex": [0, 1], "value": 1}, {"simplex": [1, 0], "value": 1}]"#,
            r#"[{"simplex": [0, 1, 2], "value": 1}]"#,
            r#"[{"simplex": [0, 1], "value": 0.5}]"#,
        ] {
            let text = format!(r#"{{"spec": {{"group": "Z"}}, "degree": 1, "values": {values}}}"#);
            assert!(CochainFile::from_json(&text).unwrap().into_cochain1(nerve.clone()).is_err(), "{values}");
        }
        let text = r#"{"spec": {"group": "Z"}, "degree": 2, "values": [{"simplex": [1, 0, 2], "value": 1}]}"#;
        assert!(CochainFile::from_json(text).unwrap().into_cochain2(nerve.clone()).is_err());
        let text = r#"{"spec": {"group": "Z"}, "degree": 2, "values": []}"#;
        assert!(CochainFile::from_json(text).unwrap().into_cochain1(nerve).is_err());
    }
}
