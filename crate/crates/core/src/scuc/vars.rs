use alloc::format;
use alloc::vec::Vec;

use crate::case::{CaseIndex, PowerCase};
use crate::milp::{MilpError, MilpModel, Var, VarKind};

use super::{ModelSpec, Variant};

/// Dense row-major table keyed by `(entity position, hour)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy> Grid<T> {
    pub fn try_from_fn<E>(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Result<T, E>) -> Result<Self, E> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c)?);
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self::try_from_fn::<core::convert::Infallible>(rows, cols, |r, c| Ok(f(r, c))).unwrap_or_else(|e| match e {})
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        self.data.iter().copied()
    }
}

/// Data-center load variables: total load and, for flexible variants, the
/// flexible component.
#[derive(Debug, Clone, PartialEq)]
pub struct DcVars {
    pub load: Grid<Var>,
    pub flex: Option<Grid<Var>>,
}

/// Post-contingency copy of the dispatch and network variables for one outage.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyVars {
    /// Position of the outaged branch in `PowerCase::branches`.
    pub branch: usize,
    pub p: Grid<Var>,
    pub theta: Grid<Var>,
    pub flow: Grid<Var>,
    /// No slack on the outaged branch itself.
    pub alpha: Grid<Option<Var>>,
    pub shed: Grid<Var>,
}

/// Handle tables for every SCUC decision variable.
///
/// Contingency blocks share the base-case renewable and data-center handles.
#[derive(Debug, Clone, PartialEq)]
pub struct ScucVariables {
    pub p: Grid<Var>,
    pub u: Grid<Var>,
    pub v: Grid<Var>,
    pub reserve: Grid<Var>,
    pub theta: Grid<Var>,
    pub flow: Grid<Var>,
    pub alpha: Grid<Var>,
    pub shed: Grid<Var>,
    pub r_use: Grid<Var>,
    pub r_curt: Grid<Var>,
    pub dc: Option<DcVars>,
    pub contingencies: Vec<ContingencyVars>,
}

const FREE: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);

impl ScucVariables {
    /// Registers all variables in a fixed order: base-case generator,
    /// network, renewable and data-center tables, then one block per
    /// contingency.
    pub fn register(model: &mut MilpModel, case: &PowerCase, idx: &CaseIndex, spec: &ModelSpec) -> Result<Self, MilpError> {
        let t_n = case.horizon;
        let g_n = case.generators.len();
        let n_n = case.buses.len();
        let l_n = case.branches.len();
        let gid = |g: usize| case.generators[g].id;
        let bid = |n: usize| case.buses[n].id;
        let lid = |l: usize| case.branches[l].id;
        let has_dc = |n: usize| spec.variant != Variant::Base && idx.dc_at_bus[n].is_some();

        let p = Grid::try_from_fn(g_n, t_n, |g, t| {
            model.add_var(format!("P[{},{t}]", gid(g)), VarKind::Continuous, 0.0, case.generators[g].p_max)
        })?;
        let u = Grid::try_from_fn(g_n, t_n, |g, t| model.add_var(format!("uc[{},{t}]", gid(g)), VarKind::Binary, 0.0, 1.0))?;
        let v = Grid::try_from_fn(g_n, t_n, |g, t| model.add_var(format!("vs[{},{t}]", gid(g)), VarKind::Binary, 0.0, 1.0))?;
        let reserve = Grid::try_from_fn(g_n, t_n, |g, t| {
            model.add_var(format!("Rv[{},{t}]", gid(g)), VarKind::Continuous, 0.0, case.generators[g].reserve_ramp)
        })?;
        let theta = Grid::try_from_fn(n_n, t_n, |n, t| {
            let (lo, hi) = if n == idx.reference { (0.0, 0.0) } else { FREE };
            model.add_var(format!("theta[{},{t}]", bid(n)), VarKind::Continuous, lo, hi)
        })?;
        let flow = Grid::try_from_fn(l_n, t_n, |l, t| model.add_var(format!("flow[{},{t}]", lid(l)), VarKind::Continuous, FREE.0, FREE.1))?;
        let alpha = Grid::try_from_fn(l_n, t_n, |l, t| {
            model.add_var(format!("alpha[{},{t}]", lid(l)), VarKind::Continuous, 0.0, f64::INFINITY)
        })?;
        let shed_ub = |n: usize, t: usize| if has_dc(n) { f64::INFINITY } else { case.buses[n].demand[t] };
        let shed = Grid::try_from_fn(n_n, t_n, |n, t| {
            model.add_var(format!("shed[{},{t}]", bid(n)), VarKind::Continuous, 0.0, shed_ub(n, t))
        })?;
        let s_n = case.renewable_sites.len();
        let avail = |s: usize, t: usize| case.renewable_sites[s].available[t];
        let r_use = Grid::try_from_fn(s_n, t_n, |s, t| {
            model.add_var(format!("Ruse[{},{t}]", case.renewable_sites[s].bus), VarKind::Continuous, 0.0, avail(s, t))
        })?;
        let r_curt = Grid::try_from_fn(s_n, t_n, |s, t| {
            model.add_var(format!("Rcurt[{},{t}]", case.renewable_sites[s].bus), VarKind::Continuous, 0.0, avail(s, t))
        })?;

        let dc = if spec.variant == Variant::Base {
            None
        } else {
            let d_n = case.dc_sites.len();
            let dc_id = |d: usize| case.dc_sites[d].bus;
            let load = Grid::try_from_fn(d_n, t_n, |d, t| {
                model.add_var(format!("D[{},{t}]", dc_id(d)), VarKind::Continuous, 0.0, case.dc_sites[d].capacity)
            })?;
            let flex = if spec.variant.is_flexible() {
                Some(Grid::try_from_fn(d_n, t_n, |d, t| {
                    model.add_var(format!("Dflex[{},{t}]", dc_id(d)), VarKind::Continuous, 0.0, f64::INFINITY)
                })?)
            } else {
                None
            };
            Some(DcVars { load, flex })
        };

        let mut contingencies = Vec::with_capacity(idx.contingencies.len());
        for &k in &idx.contingencies {
            let c = lid(k);
            let p = Grid::try_from_fn(g_n, t_n, |g, t| {
                model.add_var(format!("Pc[{c},{},{t}]", gid(g)), VarKind::Continuous, 0.0, case.generators[g].p_max)
            })?;
            let theta = Grid::try_from_fn(n_n, t_n, |n, t| {
                let (lo, hi) = if n == idx.reference { (0.0, 0.0) } else { FREE };
                model.add_var(format!("thetac[{c},{},{t}]", bid(n)), VarKind::Continuous, lo, hi)
            })?;
            let flow = Grid::try_from_fn(l_n, t_n, |l, t| {
                model.add_var(format!("flowc[{c},{},{t}]", lid(l)), VarKind::Continuous, FREE.0, FREE.1)
            })?;
            let alpha = Grid::try_from_fn(l_n, t_n, |l, t| {
                if l == k {
                    Ok(None)
                } else {
                    model
                        .add_var(format!("alphac[{c},{},{t}]", lid(l)), VarKind::Continuous, 0.0, f64::INFINITY)
                        .map(Some)
                }
            })?;
            let shed = Grid::try_from_fn(n_n, t_n, |n, t| {
                model.add_var(format!("shedc[{c},{},{t}]", bid(n)), VarKind::Continuous, 0.0, shed_ub(n, t))
            })?;
            contingencies.push(ContingencyVars {
                branch: k,
                p,
                theta,
                flow,
                alpha,
                shed,
            });
        }

        Ok(Self {
            p,
            u,
            v,
            reserve,
            theta,
            flow,
            alpha,
            shed,
            r_use,
            r_curt,
            dc,
            contingencies,
        })
    }

    /// Handle of the data-center load at bus position `n`, if it is a DC bus.
    pub fn dc_load(&self, idx: &CaseIndex, n: usize, t: usize) -> Option<Var> {
        let d = idx.dc_at_bus[n]?;
        Some(self.dc.as_ref()?.load.get(d, t))
    }

    pub fn renewable_use(&self, idx: &CaseIndex, n: usize, t: usize) -> Option<Var> {
        Some(self.r_use.get(idx.renewable_at_bus[n]?, t))
    }
}
