//! JSON case files.
//!
//! Field names carry their unit (`_mw`, `_pu`, `_usd...`). Power is stored in
//! MW on disk and converted to per unit on load. Any profile can be an inline
//! array or `{"csv": "relative/path.csv"}` pointing at an `hour,value` file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use scuc_core::case::CaseWarning;
use scuc_core::{Branch, Bus, CaseError, DataCenterSite, Generator, PowerCase, RenewableSite};

#[derive(Debug, thiserror::Error)]
pub enum CaseFileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: schema error at `{at}`: {message}")]
    Schema { path: PathBuf, at: String, message: String },
    #[error("{path}: {entity}: profile sidecar: {message}")]
    Sidecar {
        path: PathBuf,
        entity: String,
        message: String,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: CaseError,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileSource {
    Inline(Vec<f64>),
    Csv { csv: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusRecord {
    pub id: u32,
    pub demand_mw: ProfileSource,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchRecord {
    pub id: u32,
    pub from_bus: u32,
    pub to_bus: u32,
    pub reactance_pu: f64,
    pub rating_normal_mw: f64,
    pub rating_emergency_mw: f64,
    #[serde(default = "default_true")]
    pub contingency_eligible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRecord {
    pub id: u32,
    pub bus: u32,
    pub p_min_mw: f64,
    pub p_max_mw: f64,
    pub cost_energy_usd_per_mwh: f64,
    pub cost_noload_usd_per_h: f64,
    pub cost_startup_usd: f64,
    pub ramp_hourly_mw_per_h: f64,
    pub ramp_startup_mw: f64,
    pub ramp_shutdown_mw: f64,
    pub reserve_ramp_mw: f64,
    pub min_up_h: u32,
    pub min_dn_h: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataCenterRecord {
    pub bus: u32,
    pub capacity_mw: f64,
    pub workload_mw: ProfileSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenewableRecord {
    pub bus: u32,
    pub available_mw: ProfileSource,
}

fn default_horizon() -> usize {
    24
}

fn default_base() -> f64 {
    100.0
}

/// On-disk representation of a case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_base")]
    pub mva_base: f64,
    pub reference_bus: u32,
    pub buses: Vec<BusRecord>,
    pub branches: Vec<BranchRecord>,
    pub generators: Vec<GeneratorRecord>,
    #[serde(default)]
    pub dc_sites: Vec<DataCenterRecord>,
    #[serde(default)]
    pub renewable_sites: Vec<RenewableRecord>,
}

/// A validated case plus the validator's warnings.
#[derive(Debug, Clone)]
pub struct LoadedCase {
    pub case: PowerCase,
    pub warnings: Vec<CaseWarning>,
}

/// Cases shipped with the binary, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("rts24_dc", include_str!("../cases/rts24_dc.case.json")),
    ("toy6", include_str!("../cases/toy6.case.json")),
    ("toy3", include_str!("../cases/toy3.case.json")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Reads a path, or a bundled case name when no such file exists.
pub fn load_case(path: &Path) -> Result<LoadedCase, CaseFileError> {
    if !path.exists() {
        if let Some(text) = path.to_str().and_then(bundled) {
            return parse_case(text, path, None);
        }
    }
    let text = fs::read_to_string(path).map_err(|source| CaseFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_case(&text, path, path.parent())
}

/// Parses case JSON. `base_dir` resolves CSV sidecars; `None` forbids them.
pub fn parse_case(text: &str, origin: &Path, base_dir: Option<&Path>) -> Result<LoadedCase, CaseFileError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: CaseFile = serde_path_to_error::deserialize(de).map_err(|e| CaseFileError::Schema {
        path: origin.to_path_buf(),
        at: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    let case = file.to_case(origin, base_dir)?;
    let warnings = case.validate().map_err(|source| CaseFileError::Invalid {
        path: origin.to_path_buf(),
        source,
    })?;
    Ok(LoadedCase { case, warnings })
}

/// Writes inline MW profiles; loading the result reproduces `case` up to
/// the MW/p.u. conversion rounding.
pub fn save_case(case: &PowerCase, path: &Path) -> Result<(), CaseFileError> {
    save_case_file(&CaseFile::from_case(case), path)
}

pub fn save_case_file(file: &CaseFile, path: &Path) -> Result<(), CaseFileError> {
    let mut text = serde_json::to_string_pretty(file).expect("case serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| CaseFileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_sidecar(path: &Path, horizon: usize) -> Result<Vec<f64>, String> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    if headers.iter().collect::<Vec<_>>() != ["hour", "value"] {
        return Err(format!("{}: header must be `hour,value`", path.display()));
    }
    let mut values = vec![f64::NAN; horizon];
    for (i, record) in reader.deserialize::<(usize, f64)>().enumerate() {
        let (hour, value) = record.map_err(|e| format!("{}: row {}: {e}", path.display(), i + 1))?;
        if hour >= horizon || !values[hour].is_nan() {
            return Err(format!("{}: hour {hour} out of range or repeated", path.display()));
        }
        values[hour] = value;
    }
    if let Some(h) = values.iter().position(|v| v.is_nan()) {
        return Err(format!("{}: hour {h} missing", path.display()));
    }
    Ok(values)
}

pub fn write_sidecar(path: &Path, values: &[f64]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["hour", "value"])?;
    for (h, v) in values.iter().enumerate() {
        w.serialize((h, v))?;
    }
    w.flush()
}

impl CaseFile {
    fn to_case(&self, origin: &Path, base_dir: Option<&Path>) -> Result<PowerCase, CaseFileError> {
        let base = self.mva_base;
        let pu = |mw: f64| mw / base;
        let profile = |src: &ProfileSource, entity: String| -> Result<Vec<f64>, CaseFileError> {
            let mw = match src {
                ProfileSource::Inline(v) => v.clone(),
                ProfileSource::Csv { csv } => {
                    let sidecar_err = |message: String| CaseFileError::Sidecar {
                        path: origin.to_path_buf(),
                        entity: entity.clone(),
                        message,
                    };
                    let dir = base_dir.ok_or_else(|| sidecar_err("sidecars need a case file on disk".into()))?;
                    read_sidecar(&dir.join(csv), self.horizon).map_err(sidecar_err)?
                }
            };
            Ok(mw.into_iter().map(pu).collect())
        };
        let mut buses = Vec::with_capacity(self.buses.len());
        for b in &self.buses {
            buses.push(Bus {
                id: b.id,
                demand: profile(&b.demand_mw, format!("bus {}", b.id))?,
            });
        }
        let mut dc_sites = Vec::with_capacity(self.dc_sites.len());
        for d in &self.dc_sites {
            dc_sites.push(DataCenterSite {
                bus: d.bus,
                capacity: pu(d.capacity_mw),
                workload: profile(&d.workload_mw, format!("data center at bus {}", d.bus))?,
            });
        }
        let mut renewable_sites = Vec::with_capacity(self.renewable_sites.len());
        for r in &self.renewable_sites {
            renewable_sites.push(RenewableSite {
                bus: r.bus,
                available: profile(&r.available_mw, format!("renewable site at bus {}", r.bus))?,
            });
        }
        Ok(PowerCase {
            name: self.name.clone(),
            buses,
            branches: self
                .branches
                .iter()
                .map(|b| Branch {
                    id: b.id,
                    from_bus: b.from_bus,
                    to_bus: b.to_bus,
                    reactance: b.reactance_pu,
                    rating_normal: pu(b.rating_normal_mw),
                    rating_emergency: pu(b.rating_emergency_mw),
                    contingency_eligible: b.contingency_eligible,
                })
                .collect(),
            generators: self
                .generators
                .iter()
                .map(|g| Generator {
                    id: g.id,
                    bus: g.bus,
                    p_min: pu(g.p_min_mw),
                    p_max: pu(g.p_max_mw),
                    cost_energy: g.cost_energy_usd_per_mwh,
                    cost_noload: g.cost_noload_usd_per_h,
                    cost_startup: g.cost_startup_usd,
                    ramp_hourly: pu(g.ramp_hourly_mw_per_h),
                    ramp_startup: pu(g.ramp_startup_mw),
                    ramp_shutdown: pu(g.ramp_shutdown_mw),
                    reserve_ramp: pu(g.reserve_ramp_mw),
                    min_up: g.min_up_h,
                    min_dn: g.min_dn_h,
                })
                .collect(),
            dc_sites,
            renewable_sites,
            horizon: self.horizon,
            mva_base: base,
            reference_bus: self.reference_bus,
        })
    }

    pub fn from_case(case: &PowerCase) -> Self {
        let base = case.mva_base;
        let mw = |pu: f64| pu * base;
        let inline = |v: &[f64]| ProfileSource::Inline(v.iter().map(|&x| mw(x)).collect());
        Self {
            name: case.name.clone(),
            description: None,
            horizon: case.horizon,
            mva_base: base,
            reference_bus: case.reference_bus,
            buses: case
                .buses
                .iter()
                .map(|b| BusRecord {
                    id: b.id,
                    demand_mw: inline(&b.demand),
                })
                .collect(),
            branches: case
                .branches
                .iter()
                .map(|b| BranchRecord {
                    id: b.id,
                    from_bus: b.from_bus,
                    to_bus: b.to_bus,
                    reactance_pu: b.reactance,
                    rating_normal_mw: mw(b.rating_normal),
                    rating_emergency_mw: mw(b.rating_emergency),
                    contingency_eligible: b.contingency_eligible,
                })
                .collect(),
            generators: case
                .generators
                .iter()
                .map(|g| GeneratorRecord {
                    id: g.id,
                    bus: g.bus,
                    p_min_mw: mw(g.p_min),
                    p_max_mw: mw(g.p_max),
                    cost_energy_usd_per_mwh: g.cost_energy,
                    cost_noload_usd_per_h: g.cost_noload,
                    cost_startup_usd: g.cost_startup,
                    ramp_hourly_mw_per_h: mw(g.ramp_hourly),
                    ramp_startup_mw: mw(g.ramp_startup),
                    ramp_shutdown_mw: mw(g.ramp_shutdown),
                    reserve_ramp_mw: mw(g.reserve_ramp),
                    min_up_h: g.min_up,
                    min_dn_h: g.min_dn,
                })
                .collect(),
            dc_sites: case
                .dc_sites
                .iter()
                .map(|d| DataCenterRecord {
                    bus: d.bus,
                    capacity_mw: mw(d.capacity),
                    workload_mw: inline(&d.workload),
                })
                .collect(),
            renewable_sites: case
                .renewable_sites
                .iter()
                .map(|r| RenewableRecord {
                    bus: r.bus,
                    available_mw: inline(&r.available),
                })
                .collect(),
        }
    }
}
