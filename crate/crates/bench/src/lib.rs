//! Seeded fixtures shared by the benchmarks.

use lexichoice_core::compose::lex_compose;
use lexichoice_core::families::{random_responsive, random_tlcr_params, rng};
use lexichoice_core::{ChoiceFunction, ExclusionFunction, GroundSet};

pub struct Fixture {
    pub ground: GroundSet,
    pub exclusion: ExclusionFunction,
    pub c1: ChoiceFunction,
    pub c2: ChoiceFunction,
}

impl Fixture {
    /// Threshold-linear exclusion and two responsive inputs on `n` items.
    pub fn new(n: usize, seed: u64) -> Self {
        let ground = GroundSet::new(n).expect("valid size");
        let mut r = rng(seed);
        let exclusion = ExclusionFunction::tlcr(&ground, random_tlcr_params(&ground, &mut r)).expect("valid params");
        let c1 = random_responsive(&ground, &mut r);
        let c2 = random_responsive(&ground, &mut r);
        Fixture { ground, exclusion, c1, c2 }
    }

    pub fn composed(&self) -> ChoiceFunction {
        lex_compose(&self.c1, &self.c2, &self.exclusion).expect("same ground")
    }
}
