//! JSON map descriptors.
//!
//! ```json
//! {"kind":"stunted","m":1,"epsilon":1,"xi":["3/2"]}
//! {"kind":"type_b","stages":[[2,-1.0]]}
//! {"kind":"quadratic","c":-1.0}
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::interval_map::SharedMap;
use super::polynomial::{PolynomialTypeB, QuadraticMap};
use super::sawtooth::StuntedSawtooth;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapDescriptor {
    Stunted {
        m: usize,
        epsilon: i8,
        #[serde(with = "rational::vec")]
        xi: Vec<Rational>,
    },
    TypeB {
        stages: Vec<(u32, f64)>,
    },
    Quadratic {
        c: f64,
    },
}

/// A map built from a descriptor, keeping the exact variant when there is one.
#[derive(Debug, Clone)]
pub enum BuiltMap {
    Stunted(Arc<StuntedSawtooth>),
    Float(SharedMap),
}

impl BuiltMap {
    pub fn as_float(&self) -> SharedMap {
        match self {
            BuiltMap::Stunted(t) => t.clone(),
            BuiltMap::Float(f) => f.clone(),
        }
    }

    pub fn as_stunted(&self) -> Option<&StuntedSawtooth> {
        match self {
            BuiltMap::Stunted(t) => Some(t),
            BuiltMap::Float(_) => None,
        }
    }
}

impl MapDescriptor {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("map descriptor, line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }

    pub fn from_stunted(t: &StuntedSawtooth) -> Self {
        MapDescriptor::Stunted { m: t.base.m, epsilon: t.base.epsilon, xi: t.xi.clone() }
    }

    pub fn build(&self) -> Result<BuiltMap> {
        Ok(match self {
            MapDescriptor::Stunted { m, epsilon, xi } => {
                BuiltMap::Stunted(Arc::new(StuntedSawtooth::from_parts(*m, *epsilon, xi.clone())?))
            }
            MapDescriptor::TypeB { stages } => BuiltMap::Float(Arc::new(PolynomialTypeB::new(stages)?)),
            MapDescriptor::Quadratic { c } => BuiltMap::Float(Arc::new(QuadraticMap::new(*c)?)),
        })
    }
}
