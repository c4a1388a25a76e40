use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Lifecycle phase in which a vector's code runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    PreBuild,
    Initialization,
    Execution,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::PreBuild => "pre_build",
            Phase::Initialization => "initialization",
            Phase::Execution => "execution",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The twelve attack vectors, declared in taxonomy order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AttackVector {
    /// `//go:generate` directives.
    #[serde(rename = "P1")]
    StaticCodeGeneration,
    /// Functions run by `go test`.
    #[serde(rename = "P2")]
    TestingFunctions,
    /// Package-level variables initialized by calls.
    #[serde(rename = "I1")]
    GlobalVarInit,
    /// `func init()`.
    #[serde(rename = "I2")]
    InitHook,
    /// Calls to `New` / `NewXxx`.
    #[serde(rename = "E1")]
    Constructor,
    /// Imports of `reflect`.
    #[serde(rename = "E2")]
    Reflection,
    /// Calls to methods declared on several receiver types.
    #[serde(rename = "E3")]
    InterfacePolymorphism,
    /// `unsafe.*` calls and conversions.
    #[serde(rename = "E4")]
    UnsafePointer,
    /// Calls into the cgo pseudo-package `C`.
    #[serde(rename = "E5")]
    CgoLinking,
    /// Calls to functions implemented in Go assembly.
    #[serde(rename = "E6")]
    AssemblyLinking,
    /// `plugin.Open`.
    #[serde(rename = "E7")]
    PluginLinking,
    /// Process spawning through `os/exec`, `syscall` and `os`.
    #[serde(rename = "E8")]
    ExternalExec,
}

impl AttackVector {
    pub const ALL: [AttackVector; 12] = [
        AttackVector::StaticCodeGeneration,
        AttackVector::TestingFunctions,
        AttackVector::GlobalVarInit,
        AttackVector::InitHook,
        AttackVector::Constructor,
        AttackVector::Reflection,
        AttackVector::InterfacePolymorphism,
        AttackVector::UnsafePointer,
        AttackVector::CgoLinking,
        AttackVector::AssemblyLinking,
        AttackVector::PluginLinking,
        AttackVector::ExternalExec,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn id(self) -> &'static str {
        [
            "P1", "P2", "I1", "I2", "E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8",
        ][self.index()]
    }

    pub fn name(self) -> &'static str {
        [
            "static_code_generation",
            "testing_functions",
            "global_var_init",
            "init_hook",
            "constructor",
            "reflection",
            "interface_polymorphism",
            "unsafe_pointer",
            "cgo_linking",
            "assembly_linking",
            "plugin_linking",
            "external_exec",
        ][self.index()]
    }

    pub fn phase(self) -> Phase {
        match self {
            AttackVector::StaticCodeGeneration | AttackVector::TestingFunctions => Phase::PreBuild,
            AttackVector::GlobalVarInit | AttackVector::InitHook => Phase::Initialization,
            _ => Phase::Execution,
        }
    }
}

impl fmt::Display for AttackVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Accepts an id (`E7`, case-insensitive) or a machine name (`plugin_linking`).
impl FromStr for AttackVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        AttackVector::ALL
            .into_iter()
            .find(|v| v.id().eq_ignore_ascii_case(t) || v.name() == t)
            .ok_or_else(|| Error::UnknownVector(s.to_string()))
    }
}

/// A subset of the taxonomy.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct VectorSet(u16);

impl VectorSet {
    pub const fn empty() -> Self {
        VectorSet(0)
    }

    pub const fn all() -> Self {
        VectorSet((1 << 12) - 1)
    }

    pub fn contains(self, v: AttackVector) -> bool {
        self.0 & (1 << v.index()) != 0
    }

    pub fn insert(&mut self, v: AttackVector) {
        self.0 |= 1 << v.index();
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Members in taxonomy order.
    pub fn iter(self) -> impl Iterator<Item = AttackVector> {
        AttackVector::ALL
            .into_iter()
            .filter(move |v| self.contains(*v))
    }

    /// Parses a comma-separated list such as `P1,E8`.
    pub fn parse_list(list: &str) -> Result<Self, Error> {
        let mut set = VectorSet::empty();
        for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            set.insert(token.parse()?);
        }
        Ok(set)
    }
}

impl Default for VectorSet {
    fn default() -> Self {
        VectorSet::all()
    }
}

impl FromIterator<AttackVector> for VectorSet {
    fn from_iter<I: IntoIterator<Item = AttackVector>>(iter: I) -> Self {
        let mut set = VectorSet::empty();
        for v in iter {
            set.insert(v);
        }
        set
    }
}

impl fmt::Debug for VectorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(AttackVector::id))
            .finish()
    }
}
