//! Rule catalog, rule application on ordered inequality systems, derivation traces, and the
//! semantic harness that checks rule soundness on finite models.

mod apply;
mod equiv;
mod schema;
mod soundness;
mod trace;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::lplus::{LPlusError, Side, Term};
use crate::two_sorted::FrameError;

pub use apply::{apply, apply_rule, normalized, reorder};
pub use equiv::{equivalent_on, equivalent_over, Counterexample, Granularity, ModelClass, Verdict};
pub use schema::{rewrite_schemas, system_schemas, MetaDecl, MetaKind, RewriteSchema, SystemSchema};
pub use soundness::{rule_soundness_suite, Failure, Instance, SoundnessBounds, SoundnessReport};
pub use trace::{DerivationTrace, Step, TraceStep};

macro_rules! rules {
    ($($var:ident => $id:literal, $name:literal, $class:ident, $shape:ident;)*) => {
        /// Identifier of a rule in the closed catalog.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum RuleId { $($var),* }

        impl RuleId {
            pub const ALL: &'static [RuleId] = &[$(RuleId::$var),*];

            /// ASCII identifier used in traces and on the command line.
            pub fn id(self) -> &'static str {
                match self { $(RuleId::$var => $id),* }
            }

            /// Conventional symbolic name.
            pub fn name(self) -> &'static str {
                match self { $(RuleId::$var => $name),* }
            }

            /// Class of models on which the rule is sound.
            pub fn class(self) -> RuleClass {
                match self { $(RuleId::$var => RuleClass::$class),* }
            }

            pub fn shape(self) -> RuleShape {
                match self { $(RuleId::$var => RuleShape::$shape),* }
            }
        }
    };
}

rules! {
    RsAnd => "RSand", "RS∧", Basic, System;
    RsOr => "RSor", "RS∨", Basic, System;
    AjDiaXY => "AJdiaXY", "AJ⟨XY⟩", Basic, System;
    AjBoxXY => "AJboxXY", "AJ[XY]", Basic, System;
    AjDiaYX => "AJdiaYX", "AJ⟨YX⟩", Basic, System;
    AjBoxYX => "AJboxYX", "AJ[YX]", Basic, System;
    ApDiaXY => "APdiaXY", "AP⟨XY⟩", Basic, System;
    ApBoxXY => "APboxXY", "AP[XY]", Basic, System;
    ApDiaYX => "APdiaYX", "AP⟨YX⟩", Basic, System;
    ApBoxYX => "APboxYX", "AP[YX]", Basic, System;
    SpAnd => "SPand", "SP∧", Basic, System;
    SpOr => "SPor", "SP∨", Basic, System;
    Rar => "RAR", "RAR", Basic, Ackermann;
    Lar => "LAR", "LAR", Basic, Ackermann;
    OrBot => "OrBot", "∨⊥", Basic, Rewrite;
    AndTop => "AndTop", "∧⊤", Basic, Rewrite;
    DOrAnd => "DOrAnd", "D∨∧", Basic, Rewrite;
    DAndOr => "DAndOr", "D∧∨", Basic, Rewrite;
    COr => "COr", "C∨", Basic, Rewrite;
    CAnd => "CAnd", "C∧", Basic, Rewrite;
    AAnd => "AAnd", "A∧", Basic, Rewrite;
    AOr => "AOr", "A∨", Basic, Rewrite;
    Tnn => "TNN", "TNN", Basic, Rewrite;
    TOr => "TOr", "T∨", Basic, Rewrite;
    TAnd => "TAnd", "T∧", Basic, Rewrite;
    TMinus => "TMinus", "T∖", Basic, System;
    Dm => "DM", "DM", Basic, Rewrite;
    BaAnd => "BAand", "BA∧", Basic, System;
    BaOr => "BAor", "BA∨", Basic, System;
    TAndBot => "TAndBot", "T∧⊥", Basic, System;
    AtCoat1 => "AtCoat1", "AtCoat1", Basic, System;
    AtCoat2 => "AtCoat2", "AtCoat2", Basic, System;
    Mt => "MT", "MT", Basic, System;
    Bis => "bis", "bis", Basic, System;
    Sub => "Sub", "Sub", Basic, Sub;
    Tr => "TR", "TR", Basic, System;
    Tbd => "TBD", "TBD", Basic, Rewrite;
    Tdb => "TDB", "TDB", Basic, Rewrite;
    TrrInv => "TRRinv", "TRR⁻¹", Basic, System;
    Tnm => "TNM", "TNM", Basic, System;
    AtomRXX => "AtomRXX", "AtomR_XX", Ordered, System;
    MinCov2 => "MinCov2", "MinCov2", Closed, System;
    MinCovD => "MinCovD", "MinCovD", Closed, System;
    RaCl => "RAcl", "RAcl", Closed, Ackermann;
    DoubleAckermann => "DoubleAckermann", "DoubleAckermann", Closed, DoubleAckermann;
}

/// Models on which a rule is sound and invertible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleClass {
    /// Every two-sorted frame, arbitrary valuations.
    Basic,
    /// Enriched frames whose `R_XX` is a partial order, downset valuations.
    Ordered,
    /// Enriched frames of lattices, closed valuations.
    Closed,
}

/// How a rule is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleShape {
    /// Rewrites one subterm in place.
    Rewrite,
    /// Replaces matched premises by conclusions.
    System,
    Ackermann,
    Sub,
    DoubleAckermann,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for RuleId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .iter()
            .copied()
            .find(|r| r.id().eq_ignore_ascii_case(s) || r.name() == s)
            .ok_or_else(|| format!("unknown rule {s}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        }
    }
}

/// A subterm position: side of an inequality and a child path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermPos {
    pub side: Side,
    pub path: Vec<usize>,
}

impl TermPos {
    pub fn new(side: Side, path: &[usize]) -> TermPos {
        TermPos { side, path: path.to_vec() }
    }
}

impl fmt::Display for TermPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Lhs => "lhs",
            Side::Rhs => "rhs",
        };
        let path: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
        write!(f, "{side}[{}]", path.join(","))
    }
}

/// One use of a rule on a system.
///
/// `targets` lists inequality indices in the order of the rule's matched side. `bindings`
/// pre-assigns metavariables; for the Ackermann family it also carries the eliminated
/// variable (`p`) and, when running backward, the original premises. `at` places the
/// produced inequalities at explicit final indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: RuleId,
    pub direction: Direction,
    pub targets: Vec<usize>,
    pub bindings: BTreeMap<String, Term>,
    pub fresh: Vec<String>,
    pub position: Option<TermPos>,
    pub at: Option<Vec<usize>>,
}

impl RuleApplication {
    pub fn new(rule: RuleId, direction: Direction, targets: &[usize]) -> RuleApplication {
        RuleApplication {
            rule,
            direction,
            targets: targets.to_vec(),
            bindings: BTreeMap::new(),
            fresh: Vec::new(),
            position: None,
            at: None,
        }
    }

    pub fn forward(rule: RuleId, targets: &[usize]) -> RuleApplication {
        RuleApplication::new(rule, Direction::Forward, targets)
    }

    pub fn backward(rule: RuleId, targets: &[usize]) -> RuleApplication {
        RuleApplication::new(rule, Direction::Backward, targets)
    }

    pub fn bind(mut self, meta: &str, t: Term) -> RuleApplication {
        self.bindings.insert(meta.to_string(), t);
        self
    }

    pub fn with_fresh(mut self, names: &[&str]) -> RuleApplication {
        self.fresh = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn at_pos(mut self, side: Side, path: &[usize]) -> RuleApplication {
        self.position = Some(TermPos::new(side, path));
        self
    }

    pub fn placed(mut self, at: &[usize]) -> RuleApplication {
        self.at = Some(at.to_vec());
        self
    }
}

impl fmt::Display for RuleApplication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.targets.iter().map(|i| i.to_string()).collect();
        write!(f, "{} {} [{}]", self.rule.id(), self.direction.text(), t.join(","))?;
        if let Some(p) = &self.position {
            write!(f, " @{p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlbaError {
    #[error("{rule}: no match at {location}: expected {pattern}")]
    NoMatch { rule: RuleId, location: String, pattern: String },
    #[error("{rule}: side condition violated: {condition}")]
    SideCondition { rule: RuleId, condition: String },
    #[error("{rule}: fresh name clash: {name}")]
    FreshClash { rule: RuleId, name: String },
    #[error("{rule}: bad application: {detail}")]
    BadApplication { rule: RuleId, detail: String },
    #[error("bad reordering: {0}")]
    BadReorder(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Term(#[from] LPlusError),
}
