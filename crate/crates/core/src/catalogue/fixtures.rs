//! Worked examples with their expected results, checked by partial matching against reports.
//!
//! An expectation is a JSON value matched against the report's `results`: objects match when
//! every listed key matches, arrays elementwise, numbers within the fixture tolerance. Inside an
//! object, `"$len": n` checks an array's length and `"$contains": [..]` asks for each listed
//! element to match some element of the array. The string `"$set"` matches anything present.

use serde::Serialize;
use serde_json::Value;

use super::run::{run_document, RunOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    /// Relative tolerance for numbers.
    Numeric(f64),
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub id: &'static str,
    pub note: &'static str,
    pub source: &'static str,
    pub expected: &'static str,
    pub mode: Mode,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureOutcome {
    pub id: &'static str,
    pub passed: bool,
    pub mismatches: Vec<String>,
}

pub fn run_fixture(f: &Fixture, opts: &RunOptions) -> FixtureOutcome {
    let expected: Value = serde_json::from_str(f.expected).expect("fixture expectations are valid JSON");
    let mismatches = match run_document(f.source, opts) {
        Ok(report) => {
            let mut out = Vec::new();
            let tol = match f.mode {
                Mode::Exact => None,
                Mode::Numeric(t) => Some(t),
            };
            matches(&expected, &report["results"], tol, "results", &mut out);
            out
        }
        Err(e) => vec![format!("input error: {e}")],
    };
    FixtureOutcome {
        id: f.id,
        passed: mismatches.is_empty(),
        mismatches,
    }
}

pub fn matches(expected: &Value, actual: &Value, tol: Option<f64>, path: &str, out: &mut Vec<String>) {
    match (expected, actual) {
        (Value::String(e), _) if e == "$set" => {
            if actual.is_null() {
                out.push(format!("{path}: missing"));
            }
        }
        (Value::Object(e), _) if e.keys().any(|k| k.starts_with('$')) => {
            let arr = actual.as_array();
            if let Some(n) = e.get("$len") {
                if arr.map(|a| a.len() as u64) != n.as_u64() {
                    out.push(format!("{path}: expected length {n}, got {actual}"));
                }
            }
            if let Some(Value::Array(items)) = e.get("$contains") {
                for item in items {
                    let found = arr.is_some_and(|a| {
                        a.iter().any(|x| {
                            let mut scratch = Vec::new();
                            matches(item, x, tol, path, &mut scratch);
                            scratch.is_empty()
                        })
                    });
                    if !found {
                        out.push(format!("{path}: no element matches {item}"));
                    }
                }
            }
        }
        (Value::Object(e), Value::Object(a)) => {
            for (k, ev) in e {
                match a.get(k) {
                    Some(av) => matches(ev, av, tol, &format!("{path}.{k}"), out),
                    None => out.push(format!("{path}.{k}: missing")),
                }
            }
        }
        (Value::Array(e), Value::Array(a)) => {
            if e.len() != a.len() {
                out.push(format!("{path}: expected {} elements, got {}", e.len(), a.len()));
                return;
            }
            for (i, (ev, av)) in e.iter().zip(a).enumerate() {
                matches(ev, av, tol, &format!("{path}[{i}]"), out);
            }
        }
        (Value::Number(e), Value::Number(a)) => {
            let (x, y) = (e.as_f64().unwrap_or(f64::NAN), a.as_f64().unwrap_or(f64::NAN));
            let ok = match tol {
                Some(t) => (x - y).abs() <= t * x.abs().max(1.0),
                None => e == a || x == y,
            };
            if !ok {
                out.push(format!("{path}: expected {e}, got {a}"));
            }
        }
        _ => {
            if expected != actual {
                out.push(format!("{path}: expected {expected}, got {actual}"));
            }
        }
    }
}

pub fn find_fixture(id: &str) -> Option<Fixture> {
    all_fixtures().into_iter().find(|f| f.id == id)
}

const SO3: &str = r#"
chart R3 (x1, x2, x3)
bivector pi on R3 { [1,2]: "x3", [2,3]: "x1", [3,1]: "x2" }
"#;

pub fn all_fixtures() -> Vec<Fixture> {
    FIXTURES
        .iter()
        .map(|&(id, note, source, expected, mode)| Fixture {
            id,
            note,
            source: if source.starts_with("@so3") { so3_source(source) } else { source },
            expected,
            mode,
        })
        .collect()
}

fn so3_source(s: &'static str) -> &'static str {
    // Documents starting with `@so3` get the Lie-Poisson structure of so(3)* prepended.
    Box::leak(format!("{SO3}{}", &s[4..]).into_boxed_str())
}

type Row = (&'static str, &'static str, &'static str, &'static str, Mode);

const FIXTURES: &[Row] = &[
    (
        "ex-flat-intersections-not-manifolds",
        "A smooth surface meeting the leaves of a regular structure in sets that are not manifolds still gets the \
         graph of d/dx^d/dy as pullback Dirac structure. Uses a flat function, so the check runs in floating point \
         on a grid avoiding x = 0 and points where the flat factor drops below double precision.",
        r#"
chart R4 (x1, x2, x3, x4)
bivector pi on R4 { [1,2]: "1", [3,4]: "x3" }
chart X (x, y)
map i : X -> R4 ("x", "y", "(exp(-1/x^2)*(y - sin(1/x)))^2", "(exp(-1/x^2)*(y - sin(1/x)))^2")
bivector B on X { [1,2]: "1" }
grid G on X { x: [-3/2, -1, -1/2, 1/2, 1, 2], y: [-1, 0, 1/2, 2] }
family F = pullback pi by i compare B grid G
"#,
        r#"{"pi": {"poisson": "holds"}, "F": {"matches": true, "mode": "numeric", "points": 24}}"#,
        Mode::Numeric(1e-9),
    ),
    (
        "ex-no-clean-intersection",
        "The surface (x, y, x, xy) meets leaves non-cleanly. Off the line x = 0 the pullback is the graph of half the \
         standard structure; on that line the pointwise pullback is spanned by d/dy and dx, so it is not a graph \
         there and the pointwise test fails.",
        r#"
chart R4 (x1, x2, x3, x4)
bivector pi on R4 { [1,2]: "1", [3,4]: "x3" }
chart X (x, y)
map i : X -> R4 ("x", "y", "x", "x*y")
bivector B on X { [1,2]: "1/2" }
grid G on X { x: [-2, -1, -1/3, 1/2, 1], y: [-1, 0, 1, 3] }
family F = pullback pi by i compare B grid G
submanifold S = i in pi grid G
grid G0 on X { x: [-1, 0, 1], y: [0, 1] }
submanifold S0 = i in pi grid G0
family F0 = pullback pi by i compare B grid G0
"#,
        r#"{"F": {"matches": true, "mode": "exact", "points": 20},
            "S": {"pointwise_pd": "holds", "induced_bivector": {"coefficients": {"[1,2]": "1/2"}}},
            "S0": {"pointwise_pd": "fails"},
            "F0": {"matches": false, "mismatches": [["0", "0"], ["0", "1"]]}}"#,
        Mode::Exact,
    ),
    (
        "ex-diagonal-disk",
        "The diagonal plane in a product of two rank-jumping planes: the induced coefficient is a quotient with no \
         limit at the origin.",
        r#"
chart R4 (x1, x2, x3, x4)
bivector pi on R4 { [1,2]: "x1^2 + x2^2 + x1", [3,4]: "x3^2 + x4^2 - x3" }
chart X (t, s)
map i : X -> R4 ("t", "s", "t", "s")
bivector B on X { [1,2]: "((t^2 + s^2)^2 - t^2)/(2*t^2 + 2*s^2)" }
grid G on X { t: [-1, -1/2, 0, 1/3, 1], s: [-1, 0, 1/4, 1] }
family F = pullback pi by i compare B grid G
submanifold S = i in pi grid G
"#,
        r#"{"pi": {"poisson": "holds"},
            "F": {"matches": true, "points": 19, "singular": [["0", "0"]]},
            "S": {"pointwise_pd": "holds", "coregular": "fails", "coregular_witnesses": [["0", "0"]],
                  "induced_bivector": {
                      "coefficients": {"[1,2]": "(1/2*s^4 + s^2*t^2 + 1/2*t^4 - 1/2*t^2)/(s^2 + t^2)"},
                      "smooth_on_grid": "fails",
                      "poles": [{"point": ["0", "0"], "continuous_extension": false,
                                 "limits": [{"axis": "t", "value": "-1/2"}, {"axis": "s", "value": "0"}]}]}}}"#,
        Mode::Exact,
    ),
    (
        "ex-clean-not-split",
        "A clean Poisson-Dirac curve family (t^2, 0, t, s) inducing t d/dt^d/ds; the transverse rank jumps at t = 0 so it is \
         not coregular.",
        r#"
chart R4 (x1, x2, x3, x4)
bivector pi on R4 { [1,2]: "x1^2", [3,4]: "x3" }
chart X (t, s)
map i : X -> R4 ("t^2", "0", "t", "s")
grid G on X { t: [-1, 0, 1], s: [0, 1] }
submanifold S = i in pi grid G
"#,
        r#"{"pi": {"poisson": "holds"},
            "S": {"pointwise_pd": "holds", "coregular": "fails",
                  "induced_bivector": {"coefficients": {"[1,2]": "t"}}}}"#,
        Mode::Exact,
    ),
    (
        "ex-so3-axis",
        "A coordinate axis in so(3)*: Poisson-Dirac, transverse rank drops at the origin, and the complement spanned \
         by the other two axes is not orthogonal there.",
        r#"@so3
chart L (t)
map i : L -> R3 ("t", "0", "0")
grid G on L { t: [-2, -1, 0, 1, 2] }
submanifold S = i in pi grid G splitting { ("0", "1", "0"), ("0", "0", "1") }
"#,
        r#"{"pi": {"poisson": "holds"},
            "S": {"pointwise_pd": "holds", "coregular": "fails", "coregular_witnesses": [["0"]],
                  "samples": [{"q_rank": 2}, {"q_rank": 2}, {"q_rank": 0}, {"q_rank": 2}, {"q_rank": 2}],
                  "orthogonal_splitting": "holds", "split": "holds"}}"#,
        Mode::Exact,
    ),
    (
        "ex-coisotropic-plane",
        "A coisotropic plane that is Poisson-Dirac is a Poisson submanifold.",
        r#"
chart R3 (x1, x2, x3)
bivector pi on R3 { [1,2]: "1" }
chart X (x, y)
map i : X -> R3 ("x", "y", "0")
submanifold S = i in pi
"#,
        r#"{"S": {"pointwise_pd": "holds", "coisotropic": "holds", "poisson_submanifold": "holds"}}"#,
        Mode::Exact,
    ),
    (
        "ex-pair-groupoid",
        "Source and target of the pair groupoid of the plane: the source is Poisson onto the plane, the target \
         anti-Poisson.",
        r#"
chart G (a1, b1, a2, b2)
bivector piG on G { [1,2]: "1", [3,4]: "-1" }
chart M (x, y)
bivector piM on M { [1,2]: "1" }
bivector negM on M { [1,2]: "-1" }
map s : G -> M ("a1", "b1")
map t : G -> M ("a2", "b2")
related S = s : piG -> piM
related T = t : piG -> negM
related Twrong = t : piG -> piM
"#,
        r#"{"S": {"related": "holds"}, "T": {"related": "holds"}, "Twrong": {"related": "fails"}}"#,
        Mode::Exact,
    ),
    (
        "ex-vertical-submersion",
        "z d/dx^d/dy over the line with zero structure: every structure is vertical, fibres are symplectic away from \
         z = 0 and carry the zero structure on it.",
        r#"
chart S (x, y, z)
bivector pi on S { [1,2]: "z" }
chart L (w)
bivector zero on L { }
map p : S -> L ("z")
grid G on S { x: [0, 1], y: [0, 1], z: [-1, 0, 1] }
submersion P = p : pi -> zero grid G
"#,
        r#"{"P": {"poisson_map": "holds", "fibers": {"fiber_pd": "holds", "coregular": "holds",
                             "fiber_kinds": {"symplectic": 8, "trivial": 4}},
                  "pencil": {"exists": true, "pi_h": "{}", "pi_v": "{[1,2]: z}"}}}"#,
        Mode::Exact,
    ),
    (
        "ex-poisson-map-not-submersion",
        "A Poisson map from standard R^4 whose rank drops on the x1-axis: the fibre analysis reports the failure.",
        r#"
chart S (x1, x2, x3, x4)
bivector pi on S { [1,2]: "1", [3,4]: "1" }
chart M (u, v)
bivector piM on M { [1,2]: "u" }
map psi : S -> M ("x2", "x3*x4 - x1*x2")
related R = psi : pi -> piM
grid G on S points { (1, 0, 0, 0), (1, 1, 1, 1) }
submersion P = psi : pi -> piM grid G
"#,
        r#"{"R": {"related": "holds"}, "P": {"poisson_map": "holds", "error": "$set"}}"#,
        Mode::Exact,
    ),
    (
        "ex-cotangent-line",
        "The cotangent bundle of the line over the base with zero structure: fibres are Lagrangian, not Poisson-Dirac.",
        r#"
chart T (q, p)
bivector pi on T { [1,2]: "1" }
chart L (w)
bivector zero on L { }
map pr : T -> L ("q")
submersion P = pr : pi -> zero
"#,
        r#"{"P": {"poisson_map": "holds", "fibers": {"fiber_pd": "fails"}}}"#,
        Mode::Exact,
    ),
    (
        "ex-symplectic-base-coupling",
        "A Poisson submersion onto a symplectic base is a coupling; the canonical connection satisfies all four \
         conditions.",
        r#"
chart S (x1, x2, x3, x4)
bivector pi on S { [1,2]: "1", [3,4]: "1" }
chart M (u, v)
bivector piM on M { [1,2]: "1" }
map p : S -> M ("x1", "x2")
grid G on S { x1: [-1, 1], x2: [0, 1], x3: [-1, 0, 1], x4: [0, 2] }
submersion P = p : pi -> piM grid G coupling generators
"#,
        r#"{"P": {"poisson_map": "holds", "fibers": {"coupling": "holds", "fiber_pd": "holds"},
                  "coupling_data": {"all": "holds"}}}"#,
        Mode::Exact,
    ),
    (
        "ex-coupling-over-leaves",
        "A coupling over a symplectic base whose Hamiltonian flows are incomplete: the flow of y from the origin stays \
         on the curve x = arctan(z) and z blows up at time pi/2.",
        r#"
chart S (x, y, z)
bivector pi on S { [1,2]: "1", [3,2]: "1 + z^2" }
chart M (u, v)
bivector piM on M { [1,2]: "1" }
map p : S -> M ("x", "y")
submersion P = p : pi -> piM coupling
flow F of pi h "y" from (0, 0, 0) to 13/10 check "x - arctan(z)"
"#,
        r#"{"pi": {"poisson": "holds"},
            "P": {"poisson_map": "holds", "fibers": {"coupling": "holds"}, "coupling_data": {"all": "holds"}},
            "F": {"final_time": 1.3, "final_state": [-1.3, 0, -3.6021024122479798], "check_max": 0}}"#,
        Mode::Numeric(1e-6),
    ),
    (
        "ex-pencil-not-almost-coupling",
        "A submersion from C^2 onto C whose fibre structures vanish identically: the vertical part of the pencil is \
         zero and the rest is horizontal.",
        r#"
chart S (x0, y0, x1, y1)
bivector pi on S {
  [1,2]: "(x0^2 + y0^2)*(x0^2 + y0^2)", [1,3]: "(x0^2 + y0^2)*(x1*y0 - x0*y1)",
  [1,4]: "(x0^2 + y0^2)*(x0*x1 + y0*y1)", [2,3]: "-(x0^2 + y0^2)*(x0*x1 + y0*y1)",
  [2,4]: "(x0^2 + y0^2)*(x1*y0 - x0*y1)", [3,4]: "(x0^2 + y0^2)*(x1^2 + y1^2)" }
chart M (x, y)
bivector piM on M { [1,2]: "(x^2 + y^2)^2" }
map p : S -> M ("x0", "y0")
grid G on S { x0: [-1, 0, 1/2, 1], y0: [0, 1], x1: [-1, 0, 1], y1: [0, 1] }
submersion P = p : pi -> piM grid G
"#,
        r#"{"pi": {"poisson": "holds"}, "piM": {"poisson": "holds"},
            "P": {"poisson_map": "holds",
                  "fibers": {"coregular": "holds", "coupling": "fails", "fiber_kinds": {"trivial": 48}},
                  "pencil": {"exists": true, "pi_v": "{}", "brackets_zero": [true, true, true]}}}"#,
        Mode::Exact,
    ),
    (
        "ex-discontinuous-fibres",
        "A Poisson submersion off a line in C^2 whose fibres are zero-dimensional leaves where z0 z1 != 0 and symplectic \
         where z1 = 0: the fibre structures do not assemble into a smooth vertical bivector.",
        r#"
chart S (x0, y0, x1, y1)
bivector pi on S {
  [1,2]: "(x0^2 + y0^2)/4", [1,3]: "(x0*y1 - x1*y0)/4", [1,4]: "-(x0*x1 + y0*y1)/4",
  [2,3]: "(x0*x1 + y0*y1)/4", [2,4]: "(x0*y1 - x1*y0)/4", [3,4]: "(x1^2 + y1^2)/4" }
chart M (u, v)
bivector piM on M { [1,2]: "u^2 + v^2" }
map p : S -> M ("(x0*x1 + y0*y1)/(x0^2 + y0^2)", "(x0*y1 - y0*x1)/(x0^2 + y0^2)")
grid G on S { x0: [1, 2], y0: [-1, 1], x1: [-1, 0, 1], y1: [0, 1] }
submersion P = p : pi -> piM grid G
chart M2 (u2, v2)
bivector piM2 on M2 { [1,2]: "u2^2 + v2^2" }
map p2 : S -> M2 ("(x0*x1 + y0*y1)/(x1^2 + y1^2)", "(x1*y0 - x0*y1)/(x1^2 + y1^2)")
grid G2 on S { x0: [-1, 0, 1], y0: [0, 1], x1: [1, 2], y1: [-1, 1] }
submersion P2 = p2 : pi -> piM2 grid G2
transition T : M -> M2 ("u/(u^2 + v^2)", "-v/(u^2 + v^2)")
related R = T : piM -> piM2
"#,
        r#"{"pi": {"poisson": "holds"},
            "P": {"poisson_map": "holds",
                  "fibers": {"coregular": "holds", "fiber_kinds": {"symplectic": 4, "trivial": 20}},
                  "pencil": {"exists": false, "ranks": [0, 2],
                             "witnesses": [{"coords": ["1", "-1", "-1", "0"], "rank": 0},
                                           {"coords": ["1", "-1", "0", "0"], "rank": 2}]}},
            "P2": {"poisson_map": "holds",
                   "fibers": {"coregular": "holds", "fiber_kinds": {"symplectic": 4, "trivial": 20}},
                   "pencil": {"exists": false, "ranks": [0, 2]}},
            "R": {"related": "holds"}}"#,
        Mode::Exact,
    ),
    (
        "ex-toy-projective-line",
        "A chart of a toy Poisson structure over the projective line: projection to the first factor is coregular with \
         fibres the punctured line, and the two standard charts embed Poisson-ly.",
        r#"
chart C2 (a0, b0, a1, b1)
bivector piS on C2 { [1,2]: "(a0^2 + b0^2)/2", [3,4]: "(a1^2 + b1^2)/2" }
chart U (x0, y0, x1, y1)
bivector Pi on U {
  [1,2]: "x0^2 + y0^2", [3,4]: "(x1^2 + y1^2)/2",
  [1,3]: "(x0*y1 - x1*y0)/2", [1,4]: "-(x0*x1 + y0*y1)/2",
  [2,3]: "(x0*x1 + y0*y1)/2", [2,4]: "(x0*y1 - x1*y0)/2" }
chart C (x, y)
bivector piC on C { [1,2]: "x^2 + y^2" }
map pr : U -> C ("x0", "y0")
grid G on U { x0: [-1, 0, 1], y0: [0, 1], x1: [-1, 1], y1: [0, 1] }
submersion P = pr : Pi -> piC grid G
map phi0 : U -> C2 ("x1", "y1", "x0*x1 - y0*y1", "x0*y1 + y0*x1")
map phi1 : U -> C2 ("x0*x1 - y0*y1", "x0*y1 + y0*x1", "x1", "y1")
related E0 = phi0 : Pi -> piS
related E1 = phi1 : Pi -> piS
"#,
        r#"{"Pi": {"poisson": "holds"}, "piS": {"poisson": "holds"},
            "P": {"poisson_map": "holds", "fibers": {"coregular": "holds"}},
            "E0": {"related": "holds"}, "E1": {"related": "holds"}}"#,
        Mode::Exact,
    ),
    (
        "ex-associated-rank-jump",
        "A structure on a half-space fibred over the line whose fibre rank drops on the hyperplane y3 = 1.",
        r#"
chart S (y3, x1, x2, x3, x4)
bivector pi on S { [2,3]: "1 - y3", [4,5]: "1" }
chart L (w)
bivector zero on L { }
map p : S -> L ("y3")
grid G on S { y3: [1/2, 1, 2], x1: [0], x2: [0], x3: [0], x4: [0] }
submersion P = p : pi -> zero grid G
"#,
        r#"{"P": {"poisson_map": "holds",
                  "fibers": {"coregular": "holds", "fiber_kinds": {"degenerate": 1, "symplectic": 2}},
                  "pencil": {"pi_v": "{[2,3]: -y3 + 1, [4,5]: 1}"}}}"#,
        Mode::Exact,
    ),
    (
        "ex-line-in-symplectic-plane",
        "A line in the symplectic plane is not Poisson-Dirac.",
        r#"
chart P (x, y)
bivector pi on P { [1,2]: "1" }
chart L (t)
map i : L -> P ("t", "0")
submanifold S = i in pi
"#,
        r#"{"S": {"pointwise_pd": "fails"}}"#,
        Mode::Exact,
    ),
    (
        "ex-holomorphic-translations",
        "Translations of the plane with the standard structure on their abelian group induce d/dx^d/dy.",
        r#"
chart P (x, y)
vectors rho on P { ("1", "0"), ("0", "1") }
action A = rho with { [1,2]: "1" }
"#,
        r#"{"A": {"components": "$set", "poisson": "holds", "commuting": true}}"#,
        Mode::Exact,
    ),
    (
        "ex-holomorphic-exponential",
        "The exponential action of C on C^x (Euler and rotation fields) induces (x^2 + y^2) d/dx^d/dy.",
        r#"
chart P (x, y)
vectors rho on P { ("x", "y"), ("-y", "x") }
action A = rho with { [1,2]: "1" }
"#,
        r#"{"A": {"components": "{[1,2]: x^2 + y^2}", "poisson": "holds", "commuting": true}}"#,
        Mode::Exact,
    ),
    (
        "ex-positivity",
        "Positivity against the standard complex structure of the plane.",
        r#"
chart P (x1, y1)
bivector plus on P { [1,2]: "1" }
bivector minus on P { [1,2]: "-1" }
bivector zero on P { }
positive Pp = plus
positive Pm = minus
positive Pz = zero
"#,
        r#"{"Pp": {"positive": true}, "Pm": {"positive": false}, "Pz": {"positive": true}}"#,
        Mode::Exact,
    ),
    (
        "ex-toric-interval",
        "Torus quotient presentation of the interval: three orbit types.",
        "polytope D = interval strata\n",
        r#"{"D": {"leaf_count": 3, "brute_force_agrees": true, "delzant": {"delzant": true},
                  "strata": {"all_poisson_dirac": true}}}"#,
        Mode::Exact,
    ),
    (
        "ex-toric-triangle",
        "The standard triangle: seven faces including the interior.",
        "polytope D = triangle strata\n",
        r#"{"D": {"leaf_count": 7, "brute_force_agrees": true, "delzant": {"delzant": true},
                  "strata": {"all_poisson_dirac": true}}}"#,
        Mode::Exact,
    ),
    (
        "ex-toric-square",
        "The unit square: nine faces.",
        "polytope D = square strata\n",
        r#"{"D": {"leaf_count": 9, "brute_force_agrees": true, "delzant": {"delzant": true},
                  "strata": {"all_poisson_dirac": true}}}"#,
        Mode::Exact,
    ),
    (
        "ex-toric-not-delzant",
        "A triangle whose normals at (1/2, 0) span an index-two sublattice.",
        r#"polytope D = '{"rank": 2, "facets": [{"u": [1, 0], "c": 0}, {"u": [0, 1], "c": 0}, {"u": [-2, -1], "c": -1}]}'
"#,
        r#"{"D": {"delzant": {"delzant": false, "failing_vertex": {"coords": ["1/2", "0"]}}}}"#,
        Mode::Exact,
    ),
    (
        "ex-associated-flag",
        "Leaf counts of bundles over the flag variety of sl(2): the Weyl group has two elements.",
        r#"
weyl W = A 1
associated B2 = W x 2 hypothesis principal-fibers-zero
associated B3 = W x 3 hypothesis principal-fibers-zero
"#,
        r#"{"W": {"order": 2}, "B2": {"leaf_count": 4}, "B3": {"leaf_count": 6}}"#,
        Mode::Exact,
    ),
    (
        "ex-associated-toric",
        "Leaf counts of bundles over a toric base with isotropic orbits.",
        r#"
polytope D = interval
associated B2 = D x 2 hypothesis isotropic-orbits
associated B3 = D x 3 hypothesis isotropic-orbits
"#,
        r#"{"B2": {"leaf_count": 6}, "B3": {"leaf_count": 9}}"#,
        Mode::Exact,
    ),
    (
        "ex-manin-sl2",
        "The standard Manin triple of sl(2, C) over the reals and the torus quotient conditions.",
        "triple T = A1\n",
        r#"{"T": {"passes": true, "dims": {"d": 6, "g": 3, "h": 3},
                  "torus_quotient": {"a": true, "b": true, "c": true,
                                     "d_pd": {"holds_on_samples": true, "samples": 3},
                                     "d_trivial": {"holds_on_samples": true, "samples": 3}}}}"#,
        Mode::Exact,
    ),
    (
        "ex-manin-sl3",
        "The standard Manin triple of sl(3, C) over the reals.",
        "triple T = A2\n",
        r#"{"T": {"passes": true, "dims": {"d": 16, "g": 8, "h": 8},
                  "torus_quotient": {"a": true, "b": true, "c": true,
                                     "d_pd": {"holds_on_samples": true, "samples": 5},
                                     "d_trivial": {"holds_on_samples": true, "samples": 5}}}}"#,
        Mode::Exact,
    ),
    (
        "ex-so3-origin",
        "The origin of so(3)* is a coregular Poisson-Dirac submanifold.",
        r#"@so3
chart O ()
map i : O -> R3 ("0", "0", "0")
grid G on O points { () }
submanifold S = i in pi grid G
"#,
        r#"{"S": {"pointwise_pd": "holds", "coregular": "holds", "coregular_witnesses": {"$len": 0}}}"#,
        Mode::Exact,
    ),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_matches() {
        let failed: Vec<FixtureOutcome> = all_fixtures()
            .iter()
            .map(|f| run_fixture(f, &RunOptions::default()))
            .filter(|o| !o.passed)
            .collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }
}
