//! Bundled example scenarios.

use crate::document::{parse_scenario, Document};

pub struct Example {
    pub name: &'static str,
    pub source: &'static str,
}

pub const EXAMPLES: &[Example] = &[
    Example { name: "hardy", source: include_str!("../corpus/hardy.json") },
    Example { name: "prbox", source: include_str!("../corpus/prbox.json") },
    Example { name: "ghz", source: include_str!("../corpus/ghz.json") },
    Example { name: "triangle", source: include_str!("../corpus/triangle.json") },
    Example { name: "ks18", source: include_str!("../corpus/ks18.json") },
    Example { name: "peres-mermin", source: include_str!("../corpus/peres-mermin.json") },
    Example { name: "ks-false-positive", source: include_str!("../corpus/ks-false-positive.json") },
];

pub fn find(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name)
}

impl Example {
    pub fn load(&self) -> Document {
        parse_scenario(self.source).unwrap_or_else(|e| panic!("bundled example {} is invalid: {e}", self.name))
    }
}
