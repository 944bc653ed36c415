use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Handle of a registered variable; the index is its insertion position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Self {
        Var(index as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarInfo {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// Sparse affine expression `sum(coef * var) + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(Var, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn term(mut self, var: Var, coef: f64) -> Self {
        self.terms.push((var, coef));
        self
    }

    pub fn push(&mut self, var: Var, coef: f64) {
        self.terms.push((var, coef));
    }

    pub fn sum<I: IntoIterator<Item = Var>>(vars: I) -> Self {
        Self {
            terms: vars.into_iter().map(|v| (v, 1.0)).collect(),
            constant: 0.0,
        }
    }

    /// Sorts by handle, merges duplicates and drops zero coefficients.
    pub fn canonicalize(&mut self) {
        self.terms.sort_by_key(|t| t.0);
        let mut out: Vec<(Var, f64)> = Vec::with_capacity(self.terms.len());
        for &(v, c) in &self.terms {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|t| t.1 != 0.0);
        self.terms = out;
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(v, c)| c * values[v.index()]).sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.constant.is_finite() && self.terms.iter().all(|t| t.1.is_finite())
    }
}

impl From<Var> for LinExpr {
    fn from(v: Var) -> Self {
        LinExpr::new().term(v, 1.0)
    }
}

impl<T: Into<LinExpr>> Add<T> for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: T) -> LinExpr {
        self += rhs;
        self
    }
}

impl<T: Into<LinExpr>> AddAssign<T> for LinExpr {
    fn add_assign(&mut self, rhs: T) {
        let rhs = rhs.into();
        self.terms.extend(rhs.terms);
        self.constant += rhs.constant;
    }
}

impl<T: Into<LinExpr>> Sub<T> for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: T) -> LinExpr {
        self + (-rhs.into())
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self * -1.0
    }
}

impl Mul<f64> for LinExpr {
    type Output = LinExpr;
    fn mul(mut self, k: f64) -> LinExpr {
        self.terms.iter_mut().for_each(|t| t.1 *= k);
        self.constant *= k;
        self
    }
}

impl Mul<f64> for Var {
    type Output = LinExpr;
    fn mul(self, k: f64) -> LinExpr {
        LinExpr::new().term(self, k)
    }
}

impl<T: Into<LinExpr>> Add<T> for Var {
    type Output = LinExpr;
    fn add(self, rhs: T) -> LinExpr {
        LinExpr::from(self) + rhs
    }
}

impl<T: Into<LinExpr>> Sub<T> for Var {
    type Output = LinExpr;
    fn sub(self, rhs: T) -> LinExpr {
        LinExpr::from(self) - rhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

/// A stored row: `expr sense rhs`, with the expression constant folded into `rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub expr: LinExpr,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    /// Signed amount by which `values` violate the row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.expr.eval(values);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConstraintId(pub u32);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MilpError {
    #[error("variable name `{0}` already registered")]
    DuplicateName(String),
    #[error("empty variable name")]
    EmptyName,
    #[error("variable `{name}`: lower bound {lower} exceeds upper bound {upper}")]
    InvertedBounds { name: String, lower: f64, upper: f64 },
    #[error("binary variable `{0}` must have bounds within [0, 1]")]
    BinaryBounds(String),
    #[error("constraint `{constraint}` references unregistered variable index {index}")]
    UnknownVar { constraint: String, index: usize },
    #[error("constraint `{0}` has a non-finite coefficient or right-hand side")]
    NonFinite(String),
}

/// Minimisation MILP with a deterministic variable and row order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MilpModel {
    pub name: String,
    /// Identifies the options the model was built from.
    pub fingerprint: String,
    vars: Vec<VarInfo>,
    by_name: BTreeMap<String, Var>,
    constraints: Vec<Constraint>,
    objective: LinExpr,
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> Result<Var, MilpError> {
        let name = name.into();
        if name.is_empty() {
            return Err(MilpError::EmptyName);
        }
        if !(lower <= upper) {
            return Err(MilpError::InvertedBounds { name, lower, upper });
        }
        if kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(MilpError::BinaryBounds(name));
        }
        if self.by_name.contains_key(&name) {
            return Err(MilpError::DuplicateName(name));
        }
        let var = Var(self.vars.len() as u32);
        self.by_name.insert(name.clone(), var);
        self.vars.push(VarInfo { name, kind, lower, upper });
        Ok(var)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        expr: impl Into<LinExpr>,
        sense: Sense,
        rhs: f64,
    ) -> Result<ConstraintId, MilpError> {
        let name = name.into();
        let mut expr = expr.into();
        if let Some(&(v, _)) = expr.terms.iter().find(|t| t.0.index() >= self.vars.len()) {
            return Err(MilpError::UnknownVar {
                constraint: name,
                index: v.index(),
            });
        }
        expr.canonicalize();
        let rhs = rhs - expr.constant;
        expr.constant = 0.0;
        if !rhs.is_finite() || !expr.is_finite() {
            return Err(MilpError::NonFinite(name));
        }
        let id = ConstraintId(self.constraints.len() as u32);
        self.constraints.push(Constraint { name, expr, sense, rhs });
        Ok(id)
    }

    pub fn set_objective(&mut self, expr: impl Into<LinExpr>) -> Result<(), MilpError> {
        let mut expr = expr.into();
        if let Some(&(v, _)) = expr.terms.iter().find(|t| t.0.index() >= self.vars.len()) {
            return Err(MilpError::UnknownVar {
                constraint: "objective".into(),
                index: v.index(),
            });
        }
        expr.canonicalize();
        if !expr.is_finite() {
            return Err(MilpError::NonFinite("objective".into()));
        }
        self.objective = expr;
        Ok(())
    }

    /// Tightens both bounds of `var` to `value`.
    pub fn fix_var(&mut self, var: Var, value: f64) {
        let info = &mut self.vars[var.index()];
        info.lower = value;
        info.upper = value;
    }

    pub fn set_bounds(&mut self, var: Var, lower: f64, upper: f64) -> Result<(), MilpError> {
        let info = &mut self.vars[var.index()];
        if !(lower <= upper) {
            return Err(MilpError::InvertedBounds {
                name: info.name.clone(),
                lower,
                upper,
            });
        }
        info.lower = lower;
        info.upper = upper;
        Ok(())
    }

    pub fn vars(&self) -> &[VarInfo] {
        &self.vars
    }

    pub fn var(&self, v: Var) -> &VarInfo {
        &self.vars[v.index()]
    }

    pub fn var_by_name(&self, name: &str) -> Option<Var> {
        self.by_name.get(name).copied()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, id: ConstraintId) -> &Constraint {
        &self.constraints[id.0 as usize]
    }

    pub fn objective(&self) -> &LinExpr {
        &self.objective
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.constraints.is_empty()
    }

    /// Turns every binary into a continuous variable on [0, 1] (the LP relaxation).
    pub fn relax_integrality(&mut self) {
        for v in &mut self.vars {
            v.kind = VarKind::Continuous;
        }
    }

    /// Copy over the variables with `keep_var[j]` set and the rows accepted by
    /// `keep_row`. A dropped variable appearing in a kept row is replaced by
    /// `fixed[j]` (0 without `fixed`); objective terms on dropped variables are
    /// discarded, the constant stays. Also returns the original variable behind
    /// each new column.
    pub fn submodel(
        &self,
        name: impl Into<String>,
        keep_var: &[bool],
        mut keep_row: impl FnMut(usize, &Constraint) -> bool,
        fixed: Option<&[f64]>,
    ) -> (MilpModel, Vec<Var>) {
        let mut sub = MilpModel::new(name);
        sub.fingerprint = self.fingerprint.clone();
        let mut map = alloc::vec![None; self.vars.len()];
        let mut origin = Vec::new();
        for (j, info) in self.vars.iter().enumerate() {
            if keep_var[j] {
                map[j] = Some(Var(sub.vars.len() as u32));
                sub.by_name.insert(info.name.clone(), Var(sub.vars.len() as u32));
                sub.vars.push(info.clone());
                origin.push(Var(j as u32));
            }
        }
        let fixed_value = |j: usize| fixed.map_or(0.0, |f| f[j]);
        for (i, row) in self.constraints.iter().enumerate() {
            if !keep_row(i, row) {
                continue;
            }
            let mut expr = LinExpr::new();
            let mut rhs = row.rhs;
            for &(v, a) in &row.expr.terms {
                match map[v.index()] {
                    Some(w) => expr.terms.push((w, a)),
                    None => rhs -= a * fixed_value(v.index()),
                }
            }
            sub.constraints.push(Constraint {
                name: row.name.clone(),
                expr,
                sense: row.sense,
                rhs,
            });
        }
        sub.objective = LinExpr::constant(self.objective.constant);
        for &(v, a) in &self.objective.terms {
            if let Some(w) = map[v.index()] {
                sub.objective.terms.push((w, a));
            }
        }
        (sub, origin)
    }

    /// Count of rows whose name starts with `prefix` followed by `[`.
    pub fn count_rows(&self, prefix: &str) -> usize {
        self.constraints
            .iter()
            .filter(|c| c.name.strip_prefix(prefix).is_some_and(|rest| rest.starts_with('[') || rest.is_empty()))
            .count()
    }

    /// Count of variables whose name family is `prefix`.
    pub fn count_vars(&self, prefix: &str) -> usize {
        self.vars
            .iter()
            .filter(|v| v.name.strip_prefix(prefix).is_some_and(|rest| rest.starts_with('[')))
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn handles_follow_insertion_order() {
        let mut m = MilpModel::new("t");
        let p = m.add_var("P_g1_t5", VarKind::Continuous, 0.0, 3.5).unwrap();
        let u = m.add_var("u_g1_t5", VarKind::Binary, 0.0, 1.0).unwrap();
        assert_eq!(p.index(), 0);
        assert_eq!(u.index(), 1);
        assert_eq!(
            m.add_var("P_g1_t5", VarKind::Continuous, 0.0, 1.0),
            Err(MilpError::DuplicateName("P_g1_t5".into()))
        );
        assert!(matches!(
            m.add_var("x", VarKind::Continuous, 2.0, 1.0),
            Err(MilpError::InvertedBounds { .. })
        ));
        assert!(matches!(m.add_var("b", VarKind::Binary, 0.0, 2.0), Err(MilpError::BinaryBounds(_))));
        assert_eq!(m.add_var("", VarKind::Continuous, 0.0, 1.0), Err(MilpError::EmptyName));
    }

    #[test]
    fn constraints_canonicalize() {
        let mut m = MilpModel::new("t");
        let x = m.add_var("x", VarKind::Continuous, 0.0, 10.0).unwrap();
        let id = m.add_constraint("c", x + x, Sense::Le, 4.0).unwrap();
        let c = m.constraint(id);
        assert_eq!(c.expr.terms, alloc::vec![(x, 2.0)]);
        assert_eq!(c.rhs, 4.0);

        let id = m.add_constraint("k", LinExpr::constant(3.0) + x * 2.0 - x * 2.0, Sense::Ge, 5.0).unwrap();
        let c = m.constraint(id);
        assert!(c.expr.terms.is_empty());
        assert_eq!(c.rhs, 2.0);
    }

    #[test]
    fn constant_infeasible_row_accepted() {
        let mut m = MilpModel::new("t");
        let id = m.add_constraint("bad", LinExpr::new(), Sense::Le, -1.0).unwrap();
        assert_eq!(m.constraint(id).violation(&[]), 1.0);
    }

    #[test]
    fn unknown_handle_rejected() {
        let mut m = MilpModel::new("t");
        let _ = m.add_var("x", VarKind::Continuous, 0.0, 1.0).unwrap();
        let ghost = Var::from_index(7);
        assert!(matches!(
            m.add_constraint("c", LinExpr::from(ghost), Sense::Eq, 0.0),
            Err(MilpError::UnknownVar { index: 7, .. })
        ));
        assert!(m.set_objective(ghost * 1.0).is_err());
    }

    #[test]
    fn expression_arithmetic() {
        let x = Var::from_index(0);
        let y = Var::from_index(1);
        let mut e = (x * 3.0 - y) + LinExpr::constant(2.0);
        e.canonicalize();
        assert_eq!(e.eval(&[1.0, 4.0]), 1.0);
        let mut n = -(x + y);
        n.canonicalize();
        assert_eq!(n.terms, alloc::vec![(x, -1.0), (y, -1.0)]);
    }

    #[test]
    fn row_and_var_family_counts() {
        let mut m = MilpModel::new("t");
        let a = m.add_var("P[1,0]", VarKind::Continuous, 0.0, 1.0).unwrap();
        m.add_var("Pc[1,1,0]", VarKind::Continuous, 0.0, 1.0).unwrap();
        m.add_constraint("bal[1,0]", a, Sense::Eq, 0.0).unwrap();
        m.add_constraint("balc[1,1,0]", a, Sense::Eq, 0.0).unwrap();
        m.add_constraint("cpl_st", a, Sense::Eq, 0.0).unwrap();
        assert_eq!(m.count_vars("P"), 1);
        assert_eq!(m.count_rows("bal"), 1);
        assert_eq!(m.count_rows("cpl_st"), 1);
    }
}
