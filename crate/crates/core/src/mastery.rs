//! Mastery profiles keyed by expected score.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MasteryLabel {
    WheelSpinning,
    Unengaged,
    Undetermined,
    Familiar,
    Proficient,
    Mastered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Directive {
    RemedialStrategy,
    WeakGoBack,
    WeakPass,
    Pass,
    StrongPass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MasteryClass {
    pub label: MasteryLabel,
    pub directive: Directive,
}

/// One row of the profile table: `[lower, upper]`, label, directive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub lower: f64,
    pub upper: f64,
    pub class: MasteryClass,
}

const fn row(lower: f64, upper: f64, label: MasteryLabel, directive: Directive) -> TableRow {
    TableRow {
        lower,
        upper,
        class: MasteryClass { label, directive },
    }
}

/// The table ranges. They leave small gaps (0.09 → 0.1, ...).
pub const MASTERY_TABLE: [TableRow; 6] = [
    row(
        0.0,
        0.09,
        MasteryLabel::WheelSpinning,
        Directive::RemedialStrategy,
    ),
    row(
        0.10,
        0.25,
        MasteryLabel::Unengaged,
        Directive::RemedialStrategy,
    ),
    row(
        0.26,
        0.49,
        MasteryLabel::Undetermined,
        Directive::WeakGoBack,
    ),
    row(0.50, 0.74, MasteryLabel::Familiar, Directive::WeakPass),
    row(0.75, 0.84, MasteryLabel::Proficient, Directive::Pass),
    row(0.85, 1.0, MasteryLabel::Mastered, Directive::StrongPass),
];

impl MasteryLabel {
    pub fn directive(self) -> Directive {
        match self {
            MasteryLabel::WheelSpinning | MasteryLabel::Unengaged => Directive::RemedialStrategy,
            MasteryLabel::Undetermined => Directive::WeakGoBack,
            MasteryLabel::Familiar => Directive::WeakPass,
            MasteryLabel::Proficient => Directive::Pass,
            MasteryLabel::Mastered => Directive::StrongPass,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MasteryLabel::WheelSpinning => "wheel-spinning",
            MasteryLabel::Unengaged => "unengaged",
            MasteryLabel::Undetermined => "undetermined",
            MasteryLabel::Familiar => "familiar",
            MasteryLabel::Proficient => "proficient",
            MasteryLabel::Mastered => "mastered",
        }
    }
}

impl Directive {
    pub fn as_str(self) -> &'static str {
        match self {
            Directive::RemedialStrategy => "remedial strategy",
            Directive::WeakGoBack => "weak go back",
            Directive::WeakPass => "weak pass",
            Directive::Pass => "pass",
            Directive::StrongPass => "strong pass",
        }
    }
}

/// Maps an expected score to its mastery profile.
///
/// A value in a gap between ranges goes to the row with the greatest
/// lower bound not exceeding it, so 0.095 is wheel-spinning and 0.255 is
/// unengaged.
pub fn classify(mean_z: f64) -> Result<MasteryClass> {
    if !(0.0..=1.0).contains(&mean_z) {
        return Err(invalid("mean_z", "must lie in [0, 1]", mean_z));
    }
    let row = MASTERY_TABLE
        .iter()
        .rev()
        .find(|r| r.lower <= mean_z)
        .unwrap_or(&MASTERY_TABLE[0]);
    Ok(row.class)
}
