//! Bundled default partitions, the 20-rule expert rule base and the
//! 20-case e-commerce sample dataset.

use std::path::Path;

use crate::fuzzy::LinguisticVariable;
use crate::inference::{Engine, RuleBase, DEFAULT_RESOLUTION};
use crate::io;
use crate::tcp::Dataset;

pub const VARIABLES_JSON: &str = include_str!("../data/variables.json");
pub const RULES_JSON: &str = include_str!("../data/rules.json");
pub const SAMPLE_TESTS_CSV: &str = include_str!("../data/sample-tests.csv");
pub const FAULTS_EXAMPLE: &str = include_str!("../data/faults-example.txt");
pub const SURVEY_EXECUTION_TIME_CSV: &str = include_str!("../data/survey-execution-time.csv");

pub fn variables() -> Vec<LinguisticVariable> {
    io::parse_variables(VARIABLES_JSON, Path::new("<bundled variables.json>"))
        .expect("bundled variables are valid")
}

pub fn rules() -> RuleBase {
    io::parse_rules(RULES_JSON, Path::new("<bundled rules.json>")).expect("bundled rules are valid")
}

pub fn engine() -> Engine {
    Engine::new(variables(), rules(), DEFAULT_RESOLUTION).expect("bundled engine is valid")
}

pub fn dataset() -> Dataset {
    io::parse_csv_dataset(SAMPLE_TESTS_CSV, Path::new("<bundled sample-tests.csv>")).expect("bundled dataset is valid")
}
