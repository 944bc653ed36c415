//! Power-system case description.
//!
//! All power quantities are per unit on [`PowerCase::mva_base`]; costs are in
//! dollars (energy cost per MWh, no-load and start-up per hour/event). A case
//! is immutable once validated and can be shared across threads by reference.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::topology::connected_without;

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    pub id: u32,
    /// Fixed demand per hour (p.u.).
    pub demand: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub id: u32,
    pub from_bus: u32,
    pub to_bus: u32,
    /// Series reactance (p.u.).
    pub reactance: f64,
    /// Normal thermal rating (p.u.).
    pub rating_normal: f64,
    /// Emergency thermal rating used after a contingency (p.u.).
    pub rating_emergency: f64,
    /// Whether the outage of this branch is part of the N-1 set.
    pub contingency_eligible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub id: u32,
    pub bus: u32,
    pub p_min: f64,
    pub p_max: f64,
    /// $/MWh
    pub cost_energy: f64,
    /// $ per committed hour
    pub cost_noload: f64,
    /// $ per start-up
    pub cost_startup: f64,
    /// p.u./h
    pub ramp_hourly: f64,
    pub ramp_startup: f64,
    pub ramp_shutdown: f64,
    /// Spinning-reserve ramp capability (p.u.).
    pub reserve_ramp: f64,
    /// Minimum up time (h).
    pub min_up: u32,
    /// Minimum down time (h).
    pub min_dn: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataCenterSite {
    pub bus: u32,
    /// Physical site capacity (p.u.).
    pub capacity: f64,
    /// Original (pre-optimization) workload per hour (p.u.).
    pub workload: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenewableSite {
    pub bus: u32,
    /// Available output per hour (p.u.).
    pub available: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCase {
    pub name: String,
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    pub generators: Vec<Generator>,
    pub dc_sites: Vec<DataCenterSite>,
    pub renewable_sites: Vec<RenewableSite>,
    pub horizon: usize,
    /// MVA base (MW per p.u.).
    pub mva_base: f64,
    pub reference_bus: u32,
}

/// Names the entity a validation failure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entity {
    Bus(u32),
    Branch(u32),
    Generator(u32),
    DataCenter(u32),
    Renewable(u32),
    Case,
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::Bus(id) => write!(f, "bus {id}"),
            Entity::Branch(id) => write!(f, "branch {id}"),
            Entity::Generator(id) => write!(f, "generator {id}"),
            Entity::DataCenter(bus) => write!(f, "data center at bus {bus}"),
            Entity::Renewable(bus) => write!(f, "renewable site at bus {bus}"),
            Entity::Case => f.write_str("case"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CaseError {
    #[error("{entity}: duplicate id")]
    Duplicate { entity: Entity },
    #[error("{entity}: references nonexistent bus {bus}")]
    UnknownBus { entity: Entity, bus: u32 },
    #[error("{entity}: {field} = {value} is invalid ({reason})")]
    InvalidValue {
        entity: Entity,
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("{entity}: profile has {got} entries, horizon is {expected}")]
    ProfileLength {
        entity: Entity,
        got: usize,
        expected: usize,
    },
    #[error("{entity}: from and to bus are both {bus}")]
    SelfLoop { entity: Entity, bus: u32 },
    #[error("branch graph is disconnected")]
    Disconnected,
    #[error("{entity}: outage islands part of the network, mark it contingency-ineligible")]
    IslandingContingency { entity: Entity },
    #[error("case: {0}")]
    Malformed(&'static str),
}

/// Non-fatal observations made during validation.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseWarning {
    pub entity: Entity,
    pub message: &'static str,
}

impl fmt::Display for CaseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.message)
    }
}

fn check(entity: Entity, field: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<(), CaseError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(CaseError::InvalidValue {
            entity,
            field,
            value,
            reason,
        })
    }
}

fn check_profile(entity: Entity, profile: &[f64], horizon: usize) -> Result<(), CaseError> {
    if profile.len() != horizon {
        return Err(CaseError::ProfileLength {
            entity,
            got: profile.len(),
            expected: horizon,
        });
    }
    for &x in profile {
        check(entity, "profile", x, x >= 0.0, "must be >= 0")?;
    }
    Ok(())
}

impl PowerCase {
    /// Checks every case invariant. Returns the warnings on success.
    pub fn validate(&self) -> Result<Vec<CaseWarning>, CaseError> {
        let mut warnings = Vec::new();
        if self.horizon == 0 {
            return Err(CaseError::Malformed("horizon must be at least 1"));
        }
        if self.buses.is_empty() {
            return Err(CaseError::Malformed("no buses"));
        }
        check(Entity::Case, "mva_base", self.mva_base, self.mva_base > 0.0, "must be > 0")?;

        let mut bus_ids = BTreeMap::new();
        for (pos, bus) in self.buses.iter().enumerate() {
            let e = Entity::Bus(bus.id);
            if bus_ids.insert(bus.id, pos).is_some() {
                return Err(CaseError::Duplicate { entity: e });
            }
            check_profile(e, &bus.demand, self.horizon)?;
        }
        if !bus_ids.contains_key(&self.reference_bus) {
            return Err(CaseError::UnknownBus {
                entity: Entity::Case,
                bus: self.reference_bus,
            });
        }

        let mut branch_ids = BTreeMap::new();
        let mut edges = Vec::with_capacity(self.branches.len());
        for br in &self.branches {
            let e = Entity::Branch(br.id);
            if branch_ids.insert(br.id, ()).is_some() {
                return Err(CaseError::Duplicate { entity: e });
            }
            let from = *bus_ids
                .get(&br.from_bus)
                .ok_or(CaseError::UnknownBus { entity: e, bus: br.from_bus })?;
            let to = *bus_ids
                .get(&br.to_bus)
                .ok_or(CaseError::UnknownBus { entity: e, bus: br.to_bus })?;
            if from == to {
                return Err(CaseError::SelfLoop { entity: e, bus: br.from_bus });
            }
            check(e, "reactance", br.reactance, br.reactance > 0.0, "must be > 0")?;
            check(e, "rating_normal", br.rating_normal, br.rating_normal > 0.0, "must be > 0")?;
            check(
                e,
                "rating_emergency",
                br.rating_emergency,
                br.rating_emergency >= br.rating_normal,
                "must be >= rating_normal",
            )?;
            edges.push((from, to));
        }

        let mut gen_ids = BTreeMap::new();
        for g in &self.generators {
            let e = Entity::Generator(g.id);
            if gen_ids.insert(g.id, ()).is_some() {
                return Err(CaseError::Duplicate { entity: e });
            }
            if !bus_ids.contains_key(&g.bus) {
                return Err(CaseError::UnknownBus { entity: e, bus: g.bus });
            }
            check(e, "p_min", g.p_min, g.p_min >= 0.0, "must be >= 0")?;
            check(e, "p_max", g.p_max, g.p_max >= g.p_min, "must be >= p_min")?;
            for (field, v) in [
                ("cost_energy", g.cost_energy),
                ("cost_noload", g.cost_noload),
                ("cost_startup", g.cost_startup),
                ("ramp_hourly", g.ramp_hourly),
                ("ramp_startup", g.ramp_startup),
                ("ramp_shutdown", g.ramp_shutdown),
                ("reserve_ramp", g.reserve_ramp),
            ] {
                check(e, field, v, v >= 0.0, "must be >= 0")?;
            }
            for (field, v) in [("min_up", g.min_up), ("min_dn", g.min_dn)] {
                let ok = v >= 1 && v as usize <= self.horizon;
                check(e, field, f64::from(v), ok, "must lie in 1..=horizon")?;
            }
            if g.ramp_startup < g.p_min {
                warnings.push(CaseWarning {
                    entity: e,
                    message: "start-up ramp below p_min, unit cannot start",
                });
            }
            if g.ramp_shutdown < g.p_min {
                warnings.push(CaseWarning {
                    entity: e,
                    message: "shut-down ramp below p_min, unit cannot stop",
                });
            }
        }

        let mut dc_buses = BTreeMap::new();
        for dc in &self.dc_sites {
            let e = Entity::DataCenter(dc.bus);
            if !bus_ids.contains_key(&dc.bus) {
                return Err(CaseError::UnknownBus { entity: e, bus: dc.bus });
            }
            if dc_buses.insert(dc.bus, ()).is_some() {
                return Err(CaseError::Duplicate { entity: e });
            }
            check(e, "capacity", dc.capacity, dc.capacity > 0.0, "must be > 0")?;
            check_profile(e, &dc.workload, self.horizon)?;
            if dc.workload.iter().any(|&d| d > dc.capacity) {
                warnings.push(CaseWarning {
                    entity: e,
                    message: "original workload exceeds site capacity in some hour",
                });
            }
        }

        let mut res_buses = BTreeMap::new();
        for rs in &self.renewable_sites {
            let e = Entity::Renewable(rs.bus);
            if !bus_ids.contains_key(&rs.bus) {
                return Err(CaseError::UnknownBus { entity: e, bus: rs.bus });
            }
            if res_buses.insert(rs.bus, ()).is_some() {
                return Err(CaseError::Duplicate { entity: e });
            }
            check_profile(e, &rs.available, self.horizon)?;
        }

        let n = self.buses.len();
        if !connected_without(n, &edges, None) {
            return Err(CaseError::Disconnected);
        }
        for (i, br) in self.branches.iter().enumerate() {
            if br.contingency_eligible && !connected_without(n, &edges, Some(i)) {
                return Err(CaseError::IslandingContingency {
                    entity: Entity::Branch(br.id),
                });
            }
        }
        Ok(warnings)
    }

    /// Positions (into `branches`) of the contingency set.
    pub fn contingencies(&self) -> Vec<usize> {
        self.branches
            .iter()
            .enumerate()
            .filter(|(_, b)| b.contingency_eligible)
            .map(|(i, _)| i)
            .collect()
    }

    /// Branches whose single outage leaves the graph disconnected.
    pub fn islanding_branches(&self) -> Vec<u32> {
        let index: BTreeMap<u32, usize> = self.buses.iter().enumerate().map(|(i, b)| (b.id, i)).collect();
        let edges: Vec<(usize, usize)> = self
            .branches
            .iter()
            .filter_map(|b| Some((*index.get(&b.from_bus)?, *index.get(&b.to_bus)?)))
            .collect();
        if edges.len() != self.branches.len() {
            return Vec::new();
        }
        (0..edges.len())
            .filter(|&i| !connected_without(self.buses.len(), &edges, Some(i)))
            .map(|i| self.branches[i].id)
            .collect()
    }

    /// Largest rated unit, the system reserve requirement.
    pub fn largest_unit(&self) -> f64 {
        self.generators.iter().map(|g| g.p_max).fold(0.0, f64::max)
    }

    pub fn max_energy_cost(&self) -> f64 {
        self.generators.iter().map(|g| g.cost_energy).fold(0.0, f64::max)
    }

    /// Smallest strictly positive energy cost, if any unit has one.
    pub fn min_positive_energy_cost(&self) -> Option<f64> {
        self.generators
            .iter()
            .map(|g| g.cost_energy)
            .filter(|&c| c > 0.0)
            .fold(None, |acc, c| Some(acc.map_or(c, |a: f64| a.min(c))))
    }

    pub fn index(&self) -> CaseIndex {
        CaseIndex::new(self)
    }
}

/// Positional lookups derived from a validated case.
#[derive(Debug, Clone)]
pub struct CaseIndex {
    pub bus_pos: BTreeMap<u32, usize>,
    pub reference: usize,
    pub branch_from: Vec<usize>,
    pub branch_to: Vec<usize>,
    pub gen_bus: Vec<usize>,
    pub gens_at_bus: Vec<Vec<usize>>,
    /// Branches whose receiving end is the bus.
    pub branches_into: Vec<Vec<usize>>,
    /// Branches whose sending end is the bus.
    pub branches_out_of: Vec<Vec<usize>>,
    pub dc_at_bus: Vec<Option<usize>>,
    pub dc_bus: Vec<usize>,
    pub renewable_at_bus: Vec<Option<usize>>,
    pub renewable_bus: Vec<usize>,
    pub contingencies: Vec<usize>,
}

impl CaseIndex {
    /// Panics on ids that do not resolve; call [`PowerCase::validate`] first.
    pub fn new(case: &PowerCase) -> Self {
        let bus_pos: BTreeMap<u32, usize> = case.buses.iter().enumerate().map(|(i, b)| (b.id, i)).collect();
        let pos = |id: u32| *bus_pos.get(&id).expect("case validated");
        let n = case.buses.len();
        let mut gens_at_bus = alloc::vec![Vec::new(); n];
        let gen_bus: Vec<usize> = case.generators.iter().map(|g| pos(g.bus)).collect();
        for (g, &b) in gen_bus.iter().enumerate() {
            gens_at_bus[b].push(g);
        }
        let branch_from: Vec<usize> = case.branches.iter().map(|b| pos(b.from_bus)).collect();
        let branch_to: Vec<usize> = case.branches.iter().map(|b| pos(b.to_bus)).collect();
        let mut branches_into = alloc::vec![Vec::new(); n];
        let mut branches_out_of = alloc::vec![Vec::new(); n];
        for l in 0..case.branches.len() {
            branches_out_of[branch_from[l]].push(l);
            branches_into[branch_to[l]].push(l);
        }
        let mut dc_at_bus = alloc::vec![None; n];
        let dc_bus: Vec<usize> = case.dc_sites.iter().map(|d| pos(d.bus)).collect();
        for (i, &b) in dc_bus.iter().enumerate() {
            dc_at_bus[b] = Some(i);
        }
        let mut renewable_at_bus = alloc::vec![None; n];
        let renewable_bus: Vec<usize> = case.renewable_sites.iter().map(|r| pos(r.bus)).collect();
        for (i, &b) in renewable_bus.iter().enumerate() {
            renewable_at_bus[b] = Some(i);
        }
        Self {
            reference: pos(case.reference_bus),
            bus_pos,
            branch_from,
            branch_to,
            gen_bus,
            gens_at_bus,
            branches_into,
            branches_out_of,
            dc_at_bus,
            dc_bus,
            renewable_at_bus,
            renewable_bus,
            contingencies: case.contingencies(),
        }
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn valid_ring_passes() {
        let case = ring_with_spur();
        assert!(case.validate().unwrap().is_empty());
        assert_eq!(case.contingencies(), alloc::vec![0, 1, 2, 3]);
        assert_eq!(case.islanding_branches(), alloc::vec![5]);
    }

    #[test]
    fn unknown_bus_names_branch() {
        let mut case = ring_with_spur();
        case.branches[4].to_bus = 99;
        let err = case.validate().unwrap_err();
        assert_eq!(
            err,
            CaseError::UnknownBus {
                entity: Entity::Branch(5),
                bus: 99
            }
        );
        assert_eq!(alloc::format!("{err}"), "branch 5: references nonexistent bus 99");
    }

    #[test]
    fn islanding_contingency_rejected() {
        let mut case = ring_with_spur();
        case.branches[4].contingency_eligible = true;
        assert_eq!(
            case.validate().unwrap_err(),
            CaseError::IslandingContingency {
                entity: Entity::Branch(5)
            }
        );
    }

    #[test]
    fn disconnected_rejected() {
        let mut case = ring_with_spur();
        case.branches.pop();
        assert_eq!(case.validate().unwrap_err(), CaseError::Disconnected);
    }

    #[test]
    fn negative_parameters_rejected() {
        let mut case = ring_with_spur();
        case.generators[0].cost_startup = -1.0;
        assert!(matches!(
            case.validate().unwrap_err(),
            CaseError::InvalidValue { entity: Entity::Generator(1), field: "cost_startup", .. }
        ));

        let mut case = ring_with_spur();
        case.branches[0].reactance = 0.0;
        assert!(matches!(
            case.validate().unwrap_err(),
            CaseError::InvalidValue { entity: Entity::Branch(1), field: "reactance", .. }
        ));

        let mut case = ring_with_spur();
        case.branches[0].rating_emergency = 1.0;
        assert!(matches!(
            case.validate().unwrap_err(),
            CaseError::InvalidValue { field: "rating_emergency", .. }
        ));

        let mut case = ring_with_spur();
        case.buses[2].demand[1] = -0.1;
        assert!(matches!(
            case.validate().unwrap_err(),
            CaseError::InvalidValue { entity: Entity::Bus(3), .. }
        ));
    }

    #[test]
    fn profile_length_checked() {
        let mut case = ring_with_spur();
        case.buses[0].demand.push(1.0);
        assert!(matches!(case.validate().unwrap_err(), CaseError::ProfileLength { got: 3, expected: 2, .. }));
    }

    #[test]
    fn duplicate_and_reference_checks() {
        let mut case = ring_with_spur();
        case.buses[1].id = 1;
        assert_eq!(case.validate().unwrap_err(), CaseError::Duplicate { entity: Entity::Bus(1) });

        let mut case = ring_with_spur();
        case.reference_bus = 42;
        assert!(matches!(case.validate().unwrap_err(), CaseError::UnknownBus { bus: 42, .. }));
    }

    #[test]
    fn startup_ramp_warning() {
        let mut case = ring_with_spur();
        case.generators[0].p_min = 1.0;
        case.generators[0].ramp_startup = 0.5;
        let warnings = case.validate().unwrap();
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].entity, Entity::Generator(1));
    }

    #[test]
    fn index_orients_branches() {
        let case = ring_with_spur();
        let idx = case.index();
        assert_eq!(idx.branches_out_of[3], alloc::vec![3, 4]);
        assert_eq!(idx.branches_into[0], alloc::vec![3]);
        assert_eq!(idx.reference, 0);
        assert_eq!(idx.gens_at_bus[0], alloc::vec![0]);
    }
}
