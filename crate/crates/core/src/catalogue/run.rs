//! Name resolution and execution of parsed documents into a JSON report.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use super::dsl::{parse_document, DslError, GridDecl, Name, Operand, PolytopeDecl, Stmt, Text};
use crate::calculus::{Form, Multivector, SmoothMap};
use crate::dirac::{LagrangianFamily, LagrangianSubspace};
use crate::lie::{
    induced_from_action, positivity, quotient_conditions, standard_samples, standard_triple, validate_algebra,
    weyl_order, ComplexStructure, LieAlgebra, RootType, Subspace,
};
use crate::linalg::{Field, Matrix};
use crate::scalars::{
    default_grid, halton, parse_in, product_grid, q, q_to_f64, Chart, Coord, Point, Scalar, DEFAULT_GRID_CAP,
    DEFAULT_GRID_PER_DIM, Q,
};
use crate::submanifolds::{classify, ClassifyOptions, SubmanifoldSpec};
use crate::submersions::{
    canonical_coupling_data, coupling_data_verify, fiber_report, ham_flow, horizontal_generators,
    pencil_cross_check, pencil_decompose, FlowOptions, SubmersionSpec,
};
use crate::toric::{
    faces, faces_brute_force, git_coregular_sample, is_delzant, kernel_lattice, vertices, AssociatedLeafSpec,
    DelzantPolytope, Hypothesis,
};
use crate::verdict::Verdict;

pub const SCHEMA: &str = "poisson-kit/1";

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    /// Values per coordinate of default grids.
    pub grid: usize,
    /// Tolerance for floating comparisons.
    pub tol: f64,
    /// Adds a rank profile on the default grid to every bivector result.
    pub leaf_ranks: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 0,
            grid: DEFAULT_GRID_PER_DIM,
            tol: 1e-9,
            leaf_ranks: false,
        }
    }
}

pub fn input_digest(src: &str) -> String {
    let hash = Sha256::digest(src.as_bytes());
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

#[derive(Default)]
struct Env {
    charts: HashMap<String, Chart>,
    bivectors: HashMap<String, Multivector>,
    forms: HashMap<String, Form>,
    vectors: HashMap<String, Vec<Multivector>>,
    maps: HashMap<String, SmoothMap>,
    grids: HashMap<String, Vec<Point<Q>>>,
    counts: HashMap<String, u64>,
}

struct Runner<'a> {
    src: &'a str,
    opts: &'a RunOptions,
    env: Env,
    results: Map<String, Value>,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

fn with_kind(kind: &str, v: Value) -> Value {
    let mut m = match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    m.insert("kind".into(), Value::String(kind.into()));
    Value::Object(m)
}

fn error_result(kind: &str, msg: impl ToString) -> Value {
    json!({ "kind": kind, "error": msg.to_string() })
}

fn labels<F: Coord>(p: &Point<F>) -> Vec<String> {
    p.labels()
}

impl Runner<'_> {
    fn err<T>(&self, at: usize, msg: impl Into<String>) -> Result<T, DslError> {
        Err(DslError::at(self.src, at, msg))
    }

    fn chart(&self, n: &Name) -> Result<Chart, DslError> {
        match self.env.charts.get(&n.text) {
            Some(c) => Ok(c.clone()),
            None => self.err(n.offset, format!("unknown chart '{}'", n.text)),
        }
    }

    fn bivector(&self, n: &Name) -> Result<Multivector, DslError> {
        match self.env.bivectors.get(&n.text) {
            Some(b) => Ok(b.clone()),
            None => self.err(n.offset, format!("unknown bivector '{}'", n.text)),
        }
    }

    fn map(&self, n: &Name) -> Result<SmoothMap, DslError> {
        match self.env.maps.get(&n.text) {
            Some(m) => Ok(m.clone()),
            None => self.err(n.offset, format!("unknown map '{}'", n.text)),
        }
    }

    fn grid(&self, n: &Option<Name>, chart: &Chart) -> Result<Vec<Point<Q>>, DslError> {
        match n {
            None => Ok(default_grid(chart, self.opts.seed, self.opts.grid, DEFAULT_GRID_CAP)),
            Some(n) => match self.env.grids.get(&n.text) {
                Some(g) if g.first().is_some_and(|p| &p.chart == chart) => Ok(g.clone()),
                Some(_) => self.err(n.offset, format!("grid '{}' lives on another chart", n.text)),
                None => self.err(n.offset, format!("unknown grid '{}'", n.text)),
            },
        }
    }

    fn scalar(&self, t: &Text, chart: &Chart) -> Result<Scalar, DslError> {
        parse_in(&t.text, chart.vars()).map_err(|e| DslError::at(self.src, t.offset + e.offset, e.message))
    }

    fn constant(&self, t: &Text, chart: &Chart) -> Result<Q, DslError> {
        let s = self.scalar(t, chart)?;
        match s.as_exact().and_then(|r| r.as_constant()) {
            Some(c) => Ok(c),
            None => self.err(t.offset, "expected a rational constant"),
        }
    }

    fn alt_terms(&self, chart: &Chart, entries: &[(Vec<usize>, Text)]) -> Result<Vec<(Vec<usize>, Scalar)>, DslError> {
        entries
            .iter()
            .map(|(idx, t)| {
                if let Some(&bad) = idx.iter().find(|&&i| i >= chart.dim()) {
                    return self.err(t.offset, format!("index {} exceeds chart dimension {}", bad + 1, chart.dim()));
                }
                Ok((idx.clone(), self.scalar(t, chart)?))
            })
            .collect()
    }

    fn field_list(&self, chart: &Chart, fields: &[Vec<Text>], at: usize) -> Result<Vec<Vec<Scalar>>, DslError> {
        fields
            .iter()
            .map(|f| {
                if f.len() != chart.dim() {
                    return self.err(at, format!("vector needs {} components, got {}", chart.dim(), f.len()));
                }
                f.iter().map(|t| self.scalar(t, chart)).collect()
            })
            .collect()
    }

    fn declare(&mut self, name: &Name) -> Result<(), DslError> {
        let taken = self.results.contains_key(&name.text)
            || self.env.charts.contains_key(&name.text)
            || self.env.bivectors.contains_key(&name.text)
            || self.env.forms.contains_key(&name.text)
            || self.env.vectors.contains_key(&name.text)
            || self.env.maps.contains_key(&name.text)
            || self.env.grids.contains_key(&name.text)
            || self.env.counts.contains_key(&name.text);
        if taken {
            return self.err(name.offset, format!("'{}' is already defined", name.text));
        }
        Ok(())
    }

    fn put(&mut self, name: &Name, v: Value) {
        self.results.insert(name.text.clone(), v);
    }

    fn bivector_result(&self, pi: &Multivector) -> Value {
        let mut v = json!({
            "kind": "bivector",
            "components": pi.to_string(),
            "poisson": pi.is_poisson(),
        });
        if self.opts.leaf_ranks {
            let grid = default_grid(pi.chart(), self.opts.seed, self.opts.grid, DEFAULT_GRID_CAP);
            let mut ranks: BTreeMap<usize, usize> = BTreeMap::new();
            let mut undefined = 0;
            for p in &grid {
                let r = if pi.is_exact() {
                    pi.eval_matrix(p).map(|m| m.rank())
                } else {
                    pi.eval_matrix(&p.to_f64()).map(|m| m.rank())
                };
                match r {
                    Ok(r) => *ranks.entry(r).or_default() += 1,
                    Err(_) => undefined += 1,
                }
            }
            let profile: Map<String, Value> = ranks.into_iter().map(|(r, c)| (r.to_string(), json!(c))).collect();
            v["leaf_ranks"] = json!({ "points": grid.len(), "undefined": undefined, "profile": profile });
        }
        v
    }

    fn exec(&mut self, s: &Stmt) -> Result<(), DslError> {
        self.declare(s.name())?;
        match s {
            Stmt::Chart { name, vars } => {
                let names: Vec<&str> = vars.iter().map(|v| v.text.as_str()).collect();
                let chart = Chart::new(&names).map_err(|e| DslError::at(self.src, name.offset, e.to_string()))?;
                self.env.charts.insert(name.text.clone(), chart);
            }
            Stmt::Bivector { name, chart, entries } => {
                let c = self.chart(chart)?;
                let terms = self.alt_terms(&c, entries)?;
                if let Some((idx, _)) = terms.iter().find(|(i, _)| i.len() != 2) {
                    return self.err(name.offset, format!("bivector entry needs two indices, got {}", idx.len()));
                }
                let pi = Multivector::from_terms(&c, 2, terms).map_err(|e| DslError::at(self.src, name.offset, e.to_string()))?;
                let v = self.bivector_result(&pi);
                self.put(name, v);
                self.env.bivectors.insert(name.text.clone(), pi);
            }
            Stmt::Form { name, chart, entries } => {
                let c = self.chart(chart)?;
                let terms = self.alt_terms(&c, entries)?;
                let Some(degree) = terms.first().map(|(i, _)| i.len()) else {
                    return self.err(name.offset, "a form needs at least one entry");
                };
                let w = Form::from_terms(&c, degree, terms).map_err(|e| DslError::at(self.src, name.offset, e.to_string()))?;
                self.env.forms.insert(name.text.clone(), w);
            }
            Stmt::Vectors { name, chart, fields } => {
                let c = self.chart(chart)?;
                let comps = self.field_list(&c, fields, name.offset)?;
                let vs = comps.into_iter().map(|f| Multivector::vector(&c, f)).collect();
                self.env.vectors.insert(name.text.clone(), vs);
            }
            Stmt::Map {
                name,
                source,
                target,
                comps,
            } => {
                let (s, t) = (self.chart(source)?, self.chart(target)?);
                let cs = comps.iter().map(|c| self.scalar(c, &s)).collect::<Result<Vec<_>, _>>()?;
                let m = SmoothMap::new(&s, &t, cs).map_err(|e| DslError::at(self.src, name.offset, e.to_string()))?;
                self.env.maps.insert(name.text.clone(), m);
            }
            Stmt::Grid { name, chart, decl } => {
                let c = self.chart(chart)?;
                let g = match decl {
                    GridDecl::Default => default_grid(&c, self.opts.seed, self.opts.grid, DEFAULT_GRID_CAP),
                    GridDecl::Axes(axes) => {
                        let mut ordered = Vec::new();
                        for v in c.vars() {
                            match axes.iter().find(|(n, _)| n.text == v.name()) {
                                Some((_, vals)) => ordered.push(vals.clone()),
                                None => return self.err(name.offset, format!("grid has no values for '{}'", v.name())),
                            }
                        }
                        if let Some((n, _)) = axes.iter().find(|(n, _)| c.index_of_name(&n.text).is_none()) {
                            return self.err(n.offset, format!("'{}' is not a coordinate of the chart", n.text));
                        }
                        product_grid(&c, &ordered).map_err(|e| DslError::at(self.src, name.offset, e.to_string()))?
                    }
                    GridDecl::Points(pts) => {
                        if let Some(p) = pts.iter().find(|p| p.len() != c.dim()) {
                            return self.err(name.offset, format!("point with {} coordinates on a {}-dimensional chart", p.len(), c.dim()));
                        }
                        pts.iter().map(|p| Point::new(&c, p.clone())).collect()
                    }
                };
                if g.is_empty() {
                    return self.err(name.offset, "empty grid");
                }
                self.env.grids.insert(name.text.clone(), g);
            }
            Stmt::Related {
                name,
                map,
                source,
                target,
            } => {
                let (m, a, b) = (self.map(map)?, self.bivector(source)?, self.bivector(target)?);
                if a.chart() != m.source() || b.chart() != m.target() {
                    return self.err(name.offset, "bivectors must live on the source and target charts of the map");
                }
                let pts: Vec<Point<f64>> = default_grid(m.source(), self.opts.seed, self.opts.grid, DEFAULT_GRID_CAP)
                    .iter()
                    .map(|p| p.to_f64())
                    .collect();
                let v = m.map_related(&a, &b, &pts, self.opts.tol);
                self.put(name, json!({ "kind": "related", "related": v }));
            }
            Stmt::Submanifold {
                name,
                map,
                bivector,
                levels,
                grid,
                splitting,
            } => {
                let m = self.map(map)?;
                let pi = self.bivector(bivector)?;
                let x = m.source().clone();
                let lv = levels.iter().map(|t| self.scalar(t, m.target())).collect::<Result<Vec<_>, _>>()?;
                let spec = SubmanifoldSpec::new(m.clone()).with_levels(lv);
                let g = self.grid(grid, &x)?;
                let opts = ClassifyOptions {
                    splitting: match splitting {
                        Some(f) => Some(
                            f.iter()
                                .map(|v| {
                                    if v.len() != m.target().dim() {
                                        return self.err(name.offset, "splitting vectors need one component per ambient coordinate");
                                    }
                                    v.iter().map(|t| self.scalar(t, &x)).collect()
                                })
                                .collect::<Result<Vec<Vec<Scalar>>, DslError>>()?,
                        ),
                        None => None,
                    },
                };
                let v = match classify(&spec, &pi, &g, &opts) {
                    Ok(r) => with_kind("submanifold", to_value(&r)),
                    Err(e) => error_result("submanifold", e),
                };
                self.put(name, v);
            }
            Stmt::Submersion {
                name,
                map,
                total,
                base,
                grid,
                coupling,
                generators,
            } => {
                let m = self.map(map)?;
                let (a, b) = (self.bivector(total)?, self.bivector(base)?);
                let spec = SubmersionSpec::new(m.clone(), a, b).map_err(|e| DslError::at(self.src, name.offset, e.to_string()))?;
                let g = self.grid(grid, m.source())?;
                let v = self.submersion(&spec, &g, *coupling, *generators);
                self.put(name, v);
            }
            Stmt::Flow {
                name,
                bivector,
                hamiltonian,
                start,
                end,
                step,
                check,
            } => {
                let pi = self.bivector(bivector)?;
                let c = pi.chart().clone();
                if start.len() != c.dim() {
                    return self.err(name.offset, format!("start point needs {} coordinates", c.dim()));
                }
                let f = self.scalar(hamiltonian, &c)?;
                let check = check.as_ref().map(|t| self.scalar(t, &c)).transpose()?;
                let mut fo = FlowOptions::default();
                if let Some(h) = step {
                    fo.step = q_to_f64(h);
                }
                let x0: Vec<f64> = start.iter().map(q_to_f64).collect();
                let traj = ham_flow(&pi, &f, &x0, q_to_f64(end), fo);
                let dim = c.dim();
                let max_abs: Vec<f64> = (0..dim)
                    .map(|i| traj.states.iter().map(|s| s[i].abs()).fold(0.0, f64::max))
                    .collect();
                let check_max = check.map(|g| {
                    traj.states
                        .iter()
                        .map(|s| Point::new(&c, s.clone()).eval(&g).map_or(f64::INFINITY, |v| v.abs()))
                        .fold(0.0, f64::max)
                });
                let mut v = json!({
                    "kind": "flow",
                    "steps": traj.states.len().saturating_sub(1),
                    "final_time": traj.times.last().copied(),
                    "final_state": traj.states.last(),
                    "max_abs": max_abs,
                    "conservation_error": traj.conservation_error,
                    "max_error_estimate": traj.max_error_estimate,
                });
                if let Some(a) = &traj.aborted {
                    v["aborted"] = json!(a);
                }
                if let Some(cm) = check_max {
                    v["check_max"] = json!(cm);
                }
                self.put(name, v);
            }
            Stmt::Family {
                name,
                bivector,
                map,
                gauge,
                compare,
                grid,
            } => {
                let pi = self.bivector(bivector)?;
                let m = self.map(map)?;
                if pi.chart() != m.target() {
                    return self.err(bivector.offset, "bivector must live on the target chart of the map");
                }
                let mut fam = LagrangianFamily::GraphBivector(pi).pullback(&m);
                if let Some(w) = gauge {
                    match self.env.forms.get(&w.text) {
                        Some(f) if f.chart() == m.source() && f.degree() == 2 => fam = fam.gauge(f),
                        Some(_) => return self.err(w.offset, "gauge form must be a 2-form on the source chart"),
                        None => return self.err(w.offset, format!("unknown form '{}'", w.text)),
                    }
                }
                let target = self.bivector(compare)?;
                if target.chart() != m.source() {
                    return self.err(compare.offset, "comparison bivector must live on the source chart");
                }
                let g = self.grid(grid, m.source())?;
                let exact = m.is_exact() && target.is_exact() && self.env.bivectors[&bivector.text].is_exact();
                let (matched, mismatches, singular) = if exact {
                    family_compare(&fam, &target, &g)
                } else {
                    let gf: Vec<Point<f64>> = g.iter().map(|p| p.to_f64()).collect();
                    family_compare(&fam, &target, &gf)
                };
                self.put(
                    name,
                    json!({
                        "kind": "family",
                        "mode": if exact { "exact" } else { "numeric" },
                        "matches": mismatches.is_empty() && matched > 0,
                        "points": matched + mismatches.len(),
                        "mismatches": mismatches,
                        "singular": singular,
                    }),
                );
            }
            Stmt::Action { name, vectors, entries } => {
                let Some(rho) = self.env.vectors.get(&vectors.text).cloned() else {
                    return self.err(vectors.offset, format!("unknown vector list '{}'", vectors.text));
                };
                let k = rho.len();
                let mut pa: Matrix<Q> = Matrix::zeros(k, k);
                for (idx, t) in entries {
                    if idx.len() != 2 || idx.iter().any(|&i| i >= k) {
                        return self.err(t.offset, format!("entry needs two indices in 1..={k}"));
                    }
                    let c = self.constant(t, rho[0].chart())?;
                    let (i, j) = (idx[0], idx[1]);
                    pa.set(i, j, pa.get(i, j).clone() + c.clone());
                    pa.set(j, i, pa.get(j, i).clone() - c);
                }
                let ab = induced_from_action(&pa, &rho);
                let mut v = self.bivector_result(&ab.bivector);
                v["kind"] = json!("action");
                v["commuting"] = json!(ab.commuting);
                v["invariant"] = json!(ab.invariant);
                v["poisson"] = json!(ab.poisson);
                self.put(name, v);
                self.env.bivectors.insert(name.text.clone(), ab.bivector);
            }
            Stmt::Positive { name, bivector } => {
                let pi = self.bivector(bivector)?;
                let c = pi.chart();
                if c.dim() % 2 != 0 {
                    return self.err(bivector.offset, "positivity needs an even-dimensional chart (x1, y1, …)");
                }
                let Some(m) = constant_matrix(&pi) else {
                    return self.err(bivector.offset, "positivity needs a constant bivector");
                };
                let r = positivity(&ComplexStructure::standard(c.dim() / 2), &m);
                self.put(name, with_kind("positive", to_value(&r)));
            }
            Stmt::Conjugation { name, bivector } => {
                let pi = self.bivector(bivector)?;
                if pi.chart().dim() % 2 != 0 {
                    return self.err(bivector.offset, "conjugation needs an even-dimensional chart (x1, y1, …)");
                }
                let v = json!({ "kind": "conjugation", "totally_real": crate::toric::totally_real(&pi) });
                self.put(name, v);
            }
            Stmt::Polytope { name, decl, strata } => {
                let p = match decl {
                    PolytopeDecl::Named(n) => match n.text.as_str() {
                        "interval" => DelzantPolytope::interval(),
                        "triangle" => DelzantPolytope::triangle(),
                        "square" => DelzantPolytope::square(),
                        other => return self.err(n.offset, format!("unknown polytope '{other}'")),
                    },
                    PolytopeDecl::Json(t) => {
                        DelzantPolytope::from_json(&t.text).map_err(|e| DslError::at(self.src, t.offset, e.to_string()))?
                    }
                };
                let v = polytope_report(&p, *strata);
                if let Some(n) = v.get("leaf_count").and_then(Value::as_u64) {
                    self.env.counts.insert(name.text.clone(), n);
                }
                self.put(name, v);
            }
            Stmt::Triple { name, kind } => {
                let k = match kind.text.as_str() {
                    "A1" => RootType::A1,
                    "A2" => RootType::A2,
                    other => return self.err(kind.offset, format!("unknown root type '{other}' (A1 or A2)")),
                };
                let v = triple_report(k);
                self.put(name, v);
            }
            Stmt::Weyl { name, kind, rank } => {
                let ch = kind.text.chars().next().unwrap_or('?');
                if kind.text.len() != 1 {
                    return self.err(kind.offset, "Weyl type is a single letter A, B, C or D");
                }
                let n = weyl_order(ch, *rank).map_err(|e| DslError::at(self.src, kind.offset, e.to_string()))?;
                let n = u64::try_from(n).map_err(|_| DslError::at(self.src, kind.offset, "order too large"))?;
                self.env.counts.insert(name.text.clone(), n);
                self.put(name, json!({ "kind": "weyl", "order": n }));
            }
            Stmt::Algebra { name, json: t } => {
                let v = algebra_report(&t.text).map_err(|e| DslError::at(self.src, t.offset, e))?;
                self.put(name, v);
            }
            Stmt::Associated {
                name,
                base,
                fiber,
                hypothesis,
            } => {
                let b = self.operand(base)?;
                let f = self.operand(fiber)?;
                let hyp = match hypothesis {
                    None => return self.err(name.offset, "associated-bundle count needs `hypothesis principal-fibers-zero | isotropic-orbits`"),
                    Some(h) => match h.text.as_str() {
                        "principal-fibers-zero" => Hypothesis::PrincipalFibersZero,
                        "isotropic-orbits" => Hypothesis::IsotropicOrbits,
                        other => return self.err(h.offset, format!("unknown hypothesis '{other}'")),
                    },
                };
                let spec = AssociatedLeafSpec {
                    base_count: b,
                    fiber_count: f,
                    hypothesis: Some(hyp),
                };
                let n = crate::toric::associated_leaf_count(&spec).map_err(|e| DslError::at(self.src, name.offset, e.to_string()))?;
                self.env.counts.insert(name.text.clone(), n);
                self.put(
                    name,
                    json!({ "kind": "associated", "base": b, "fiber": f, "hypothesis": hyp, "leaf_count": n }),
                );
            }
        }
        Ok(())
    }

    fn operand(&self, o: &Operand) -> Result<u64, DslError> {
        match o {
            Operand::Count(n) => Ok(*n),
            Operand::Ref(n) => match self.env.counts.get(&n.text) {
                Some(c) => Ok(*c),
                None => self.err(n.offset, format!("'{}' does not name a counted result", n.text)),
            },
        }
    }

    fn submersion(&self, spec: &SubmersionSpec, grid: &[Point<Q>], coupling: bool, generators: bool) -> Value {
        let pts: Vec<Point<f64>> = grid.iter().map(|p| p.to_f64()).collect();
        let mut v = json!({ "kind": "submersion", "poisson_map": spec.poisson_map(&pts, self.opts.tol) });
        match fiber_report(spec, grid) {
            Ok(r) => v["fibers"] = to_value(&r),
            Err(e) => {
                v["error"] = json!(e.to_string());
                return v;
            }
        }
        if spec.is_exact() {
            v["pencil"] = match pencil_decompose(spec, grid) {
                Ok(Ok(d)) => {
                    let mut pv = to_value(&d);
                    pv["exists"] = json!(true);
                    let pts = random_points(spec.total(), self.opts.seed, 20);
                    let agree = pencil_cross_check(spec, &d.vertical, &pts);
                    pv["cross_check"] = json!({ "points": agree.len(), "agree": agree.iter().filter(|&&b| b).count() });
                    pv
                }
                Ok(Err(o)) => {
                    let mut ov = to_value(&o);
                    ov["exists"] = json!(false);
                    ov
                }
                Err(e) => json!({ "error": e.to_string() }),
            };
        }
        if coupling {
            v["coupling_data"] = match canonical_coupling_data(spec) {
                None => json!({ "error": "no canonical coupling data: π_M ∘ p is degenerate or data is not exact" }),
                Some(cd) => {
                    let mut c = json!({
                        "horizontal": cd.horizontal.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
                        "vertical": cd.vertical.to_string(),
                        "omega": cd.omega.to_string(),
                    });
                    match coupling_data_verify(&cd, spec, grid) {
                        Ok(ver) => {
                            c["conditions"] = to_value(&ver);
                            c["all"] = json!(ver.all());
                        }
                        Err(e) => c["error"] = json!(e.to_string()),
                    }
                    c
                }
            };
        }
        if generators {
            v["generators"] = to_value(&horizontal_generators(spec, grid));
        }
        v
    }
}

/// Seeded rational points in [−2, 2]^n from a scrambled Halton sequence, disjoint from the default grid.
pub fn random_points(chart: &Chart, seed: u64, count: usize) -> Vec<Point<Q>> {
    const BASES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    (0..count as u64)
        .map(|k| {
            let coords = (0..chart.dim())
                .map(|j| q(4) * halton(1000 + seed * 97 + k * 7 + j as u64, BASES[j % BASES.len()]) - q(2))
                .collect();
            Point::new(chart, coords)
        })
        .collect()
}

fn constant_matrix(pi: &Multivector) -> Option<Matrix<Q>> {
    if !pi.terms().all(|(_, c)| c.as_exact().is_some_and(|r| r.as_constant().is_some())) {
        return None;
    }
    let origin = Point::new(pi.chart(), vec![q(0); pi.chart().dim()]);
    pi.eval_matrix(&origin).ok()
}

fn invariant_pairing(alg: &LieAlgebra, p: &Matrix<Q>, full: &Subspace) -> bool {
    let basis = full.vectors();
    let form = |u: &[Q], v: &[Q]| -> Q {
        let mut s = q(0);
        for i in 0..u.len() {
            for j in 0..v.len() {
                s += &u[i] * p.get(i, j) * &v[j];
            }
        }
        s
    };
    basis.iter().all(|x| {
        basis.iter().all(|y| {
            basis.iter().all(|z| {
                let l = form(&alg.bracket(x, y), z);
                let r = form(x, &alg.bracket(y, z));
                l == r
            })
        })
    })
}

fn family_compare<F: Coord + Field>(
    fam: &LagrangianFamily,
    target: &Multivector,
    grid: &[Point<F>],
) -> (usize, Vec<Vec<String>>, Vec<Vec<String>>) {
    let mut matched = 0;
    let mut mismatches = Vec::new();
    let mut singular = Vec::new();
    for p in grid {
        let (Ok(l), Ok(t)) = (fam.eval(p), target.eval_matrix(p)) else {
            singular.push(labels(p));
            continue;
        };
        if l.same_as(&LagrangianSubspace::graph_bivector(&t)) {
            matched += 1;
        } else {
            mismatches.push(labels(p));
        }
    }
    (matched, mismatches, singular)
}

fn standard_pi(d: usize) -> Matrix<Q> {
    let mut m = Matrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        m.set(2 * i, 2 * i + 1, q(1));
        m.set(2 * i + 1, 2 * i, q(-1));
    }
    m
}

pub fn polytope_report(p: &DelzantPolytope, strata: bool) -> Value {
    let verts = match vertices(p) {
        Ok(v) => v,
        Err(e) => return error_result("polytope", e),
    };
    let delzant = is_delzant(p).map(|d| to_value(&d)).unwrap_or_else(|e| json!({ "error": e.to_string() }));
    let kernel = kernel_lattice(p);
    let fs = match faces(p) {
        Ok(f) => f,
        Err(e) => return error_result("polytope", e),
    };
    let brute = faces_brute_force(p);
    let one_based: Vec<Vec<usize>> = fs.iter().map(|f| f.iter().map(|i| i + 1).collect()).collect();
    let mut v = json!({
        "kind": "polytope",
        "rank": p.rank(),
        "facets": p.facets(),
        "vertices": verts.iter().map(|v| v.coords.clone()).collect::<Vec<_>>(),
        "delzant": delzant,
        "kernel": to_value(&kernel),
        "faces": one_based,
        "leaf_count": fs.len(),
        "brute_force_agrees": brute == fs,
    });
    if strata {
        let pi = standard_pi(p.facets());
        let samples: Vec<Value> = fs
            .iter()
            .map(|face| {
                let z: Vec<(Q, Q)> = (0..p.facets())
                    .map(|i| if face.contains(&i) { (q(0), q(0)) } else { (q(1), Q::new(i.into(), 2.into())) })
                    .collect();
                match git_coregular_sample(p, &pi, &z) {
                    Ok(s) => json!({
                        "face": face.iter().map(|i| i + 1).collect::<Vec<_>>(),
                        "orbit_dim": s.orbit_dim,
                        "poisson_dirac": s.poisson_dirac,
                    }),
                    Err(e) => json!({ "face": face.iter().map(|i| i + 1).collect::<Vec<_>>(), "error": e.to_string() }),
                }
            })
            .collect();
        let all = samples.iter().all(|s| s["poisson_dirac"] == json!(true));
        v["strata"] = json!({ "samples": samples, "all_poisson_dirac": all });
    }
    v
}

/// Manin check of a standard triple and the torus quotient conditions on its standard samples.
pub fn triple_report(k: RootType) -> Value {
    let st = standard_triple(k);
    let manin = crate::lie::manin_check(&st.triple);
    let torus = quotient_conditions(&st, &st.t, &standard_samples(k));
    let mut v = json!({
        "kind": "triple",
        "dims": {
            "d": st.real.dim(), "g": st.triple.g.dim(), "h": st.triple.h.dim(),
            "t": st.t.dim(), "a": st.a.dim(), "n_plus": st.n_plus.dim(),
        },
        "manin": to_value(&manin),
        "passes": manin.passes(),
    });
    v["torus_quotient"] = match torus {
        Ok(c) => {
            let mut t = to_value(&c);
            t["d_pd_verdict"] = json!(c.d_pd.verdict());
            t["d_trivial_verdict"] = json!(c.d_trivial.verdict());
            t
        }
        Err(e) => json!({ "error": e.to_string() }),
    };
    v
}

/// Jacobi and antisymmetry residuals of an algebra given as JSON, and its pairing if present.
pub fn algebra_report(text: &str) -> Result<Value, String> {
    let (alg, pairing) = LieAlgebra::from_json(text).map_err(|e| e.to_string())?;
    let chk = validate_algebra(&alg);
    let mut v = with_kind("algebra", to_value(&chk));
    v["dim"] = json!(alg.dim());
    if let Some(p) = pairing {
        let full = Subspace::full(alg.dim());
        v["pairing_nondegenerate"] = json!(p.rank() == alg.dim());
        v["pairing_invariant"] = json!(invariant_pairing(&alg, &p, &full));
    }
    Ok(v)
}

/// Report envelope around a map of named results.
pub fn wrap_report(src: &str, opts: &RunOptions, results: Map<String, Value>) -> Value {
    json!({
        "schema": SCHEMA,
        "tool": concat!("poisson-kit ", env!("CARGO_PKG_VERSION")),
        "input_digest": input_digest(src),
        "options": { "seed": opts.seed, "grid": opts.grid, "tol": opts.tol },
        "results": Value::Object(results),
    })
}

/// Parses and runs a document; the report is deterministic in the source and options.
pub fn run_document(src: &str, opts: &RunOptions) -> Result<Value, DslError> {
    let stmts = parse_document(src)?;
    let mut r = Runner {
        src,
        opts,
        env: Env::default(),
        results: Map::new(),
    };
    for s in &stmts {
        r.exec(s)?;
    }
    Ok(wrap_report(src, opts, r.results))
}

/// Verdict-like field of a result that decides pass/fail for a subcommand.
pub fn result_fails(v: &Value, field: &str) -> bool {
    v.get("error").is_some() || v.get(field) == Some(&json!(Verdict::Fails))
}
