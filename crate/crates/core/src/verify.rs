//! Verification checks: each assembles both sides of an identity from
//! independent code paths (counting versus plethystics, Betti versus
//! Dolbeault generator data) and compares them on the window where both are
//! exactly known.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::charvar::{
    fit_class_count_poly, smooth_twisted_series, stack_count_series, CountConfig, CountOracle,
    StackOracle, DEFAULT_TUPLE_BUDGET,
};
use crate::error::{CheckError, SeriesError};
use crate::filtration::{
    betti, project, super_sym, FiltrationKind, FiltrationTable, Generator, Label,
};
use crate::group::DEFAULT_GROUP_CAP;
use crate::lie::{bcstar_series, bm_vir_from_count, pt_mod_glr_bm_vir_series, VirtualDimension};
use crate::plethysm::{pexp, plog};
use crate::poly::{IntPoly, RationalFunctionQ};
use crate::quiver::{kac_polynomial, preproj_vdim, DimVector, KacOptions, Quiver};
use crate::series::{int_terms, Discrepancy, GradedSeries, HalfInt, TruncationPolicy};

/// Default q window, in integer exponents.
pub const DEFAULT_Q_MIN: i64 = -10;
pub const DEFAULT_Q_MAX: i64 = 20;

/// Deliberate fixture corruptions for harness self-tests.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corruption {
    /// Extra factor of `q` in the count-to-series reflection on the counting side.
    ReflectionOffByOne,
    /// Central sign at `-I` of the Steinberg family negated.
    CharacterSignFlip,
    /// Combined-filtration indices moved up by one.
    TableShift,
    /// One spurious term added to the counting side.
    CorruptLhs,
}

impl Corruption {
    pub const ALL: [Corruption; 4] = [
        Corruption::ReflectionOffByOne,
        Corruption::CharacterSignFlip,
        Corruption::TableShift,
        Corruption::CorruptLhs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Corruption::ReflectionOffByOne => "reflection-off-by-one",
            Corruption::CharacterSignFlip => "character-sign-flip",
            Corruption::TableShift => "table-shift",
            Corruption::CorruptLhs => "corrupt-lhs",
        }
    }
}

impl fmt::Display for Corruption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Corruption {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Corruption::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown corruption `{s}`"))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub group_cap: u128,
    pub tuple_budget: u128,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            group_cap: DEFAULT_GROUP_CAP,
            tuple_budget: DEFAULT_TUPLE_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub name: String,
    pub genus: u32,
    pub r_max: usize,
    pub window: TruncationPolicy,
    pub budgets: Budgets,
    pub corruption: Option<Corruption>,
}

impl CheckSpec {
    /// Default window: `t <= r_max`, `q` in `[-10, 20]`.
    pub fn new(name: &str, genus: u32, r_max: usize) -> Self {
        CheckSpec {
            name: name.to_string(),
            genus,
            r_max,
            window: TruncationPolicy::ints(r_max, DEFAULT_Q_MIN, DEFAULT_Q_MAX)
                .expect("valid default window"),
            budgets: Budgets::default(),
            corruption: None,
        }
    }

    pub fn with_q_window(mut self, q_min: i64, q_max: i64) -> Result<Self, CheckError> {
        self.window = TruncationPolicy::ints(self.r_max, q_min, q_max)?;
        Ok(self)
    }

    pub fn corrupted(mut self, c: Corruption) -> Self {
        self.corruption = Some(c);
        self
    }

    fn validate(&self) -> Result<(), CheckError> {
        if self.r_max < 1 {
            return Err(CheckError::Precondition("r_max must be at least 1".into()));
        }
        if self.window.t_max < self.r_max {
            return Err(CheckError::WindowTooSmall(format!(
                "window sees t <= {}, check needs t <= {}",
                self.window.t_max, self.r_max
            )));
        }
        Ok(())
    }

    fn corruption_in(
        &self,
        allowed: &[Corruption],
        check: &str,
    ) -> Result<Option<Corruption>, CheckError> {
        match self.corruption {
            Some(c) if !allowed.contains(&c) => Err(CheckError::Precondition(format!(
                "corruption {c} does not apply to the {check} check"
            ))),
            c => Ok(c),
        }
    }

    fn count_config(&self, corruption: Option<Corruption>) -> CountConfig {
        let mut cfg = CountConfig {
            group_cap: self.budgets.group_cap,
            ..CountConfig::default()
        };
        if corruption == Some(Corruption::CharacterSignFlip) {
            cfg.gl2 = cfg.gl2.with_flipped_sign("steinberg");
        }
        cfg
    }

    fn params(&self) -> Value {
        json!({
            "genus": self.genus,
            "r_max": self.r_max,
            "t_max": self.window.t_max,
            "q_min": self.window.q_min.to_string(),
            "q_max": self.window.q_max.to_string(),
            "group_cap": self.budgets.group_cap.to_string(),
            "tuple_budget": self.budgets.tuple_budget.to_string(),
            "corruption": self.corruption.map(|c| c.name()),
        })
    }
}

/// First mismatching coefficient or table entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub t_degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_exponent: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohomological_degree: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filtration_index: Option<i64>,
    pub what: String,
    pub lhs: String,
    pub rhs: String,
}

impl Witness {
    fn from_discrepancy(d: Discrepancy, what: &str) -> Self {
        Witness {
            t_degree: d.t_degree,
            q_exponent: Some(d.q_exponent),
            cohomological_degree: None,
            filtration_index: None,
            what: what.to_string(),
            lhs: d.lhs,
            rhs: d.rhs,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at t^{}", self.what, self.t_degree)?;
        if let Some(e) = &self.q_exponent {
            write!(f, " q^{e}")?;
        }
        if let Some(i) = self.cohomological_degree {
            write!(f, " degree {i}")?;
        }
        if let Some(k) = self.filtration_index {
            write!(f, " index {k}")?;
        }
        write!(f, ": lhs {} != rhs {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub params: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Milliseconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub oracles: Vec<String>,
    #[serde(skip_serializing_if = "Value::is_null", default)]
    pub details: Value,
}

struct Builder {
    name: String,
    params: Value,
    started: Instant,
    phase: Instant,
    timings: BTreeMap<String, f64>,
    oracles: Vec<String>,
    details: serde_json::Map<String, Value>,
    witness: Option<Witness>,
}

impl Builder {
    fn new(spec: &CheckSpec) -> Self {
        let now = Instant::now();
        Builder {
            name: spec.name.clone(),
            params: spec.params(),
            started: now,
            phase: now,
            timings: BTreeMap::new(),
            oracles: Vec::new(),
            details: serde_json::Map::new(),
            witness: None,
        }
    }

    fn lap(&mut self, phase: &str) {
        let now = Instant::now();
        self.timings
            .insert(phase.to_string(), (now - self.phase).as_secs_f64() * 1e3);
        self.phase = now;
    }

    fn oracle(&mut self, s: impl Into<String>) {
        self.oracles.push(s.into());
    }

    /// Keeps the first failure only.
    fn fail(&mut self, w: Witness) {
        if self.witness.is_none() {
            self.witness = Some(w);
        }
    }

    fn finish(mut self) -> CheckReport {
        self.timings
            .insert("total".into(), self.started.elapsed().as_secs_f64() * 1e3);
        CheckReport {
            name: self.name,
            params: self.params,
            pass: self.witness.is_none(),
            witness: self.witness,
            timings: self.timings,
            oracles: self.oracles,
            details: if self.details.is_empty() {
                Value::Null
            } else {
                Value::Object(self.details)
            },
        }
    }
}

fn oracle_name(o: CountOracle) -> &'static str {
    match o {
        CountOracle::ClosedForm => "closed form",
        CountOracle::Frobenius => "Frobenius character sum",
        CountOracle::ClassCountFit => "class counts fitted from enumeration",
    }
}

/// Guards against vacuous comparisons: every rank must be compared on at
/// least its lowest stored exponent.
fn ensure_overlap(lhs: &GradedSeries, rhs: &GradedSeries, r_max: usize) -> Result<(), CheckError> {
    let bounds = lhs.common_known(rhs);
    for n in 0..=r_max {
        let Some(b) = bounds.get(n).copied().flatten() else {
            continue;
        };
        let lowest = lhs
            .rank_terms(n)
            .chain(rhs.rank_terms(n))
            .map(|(e, _)| e)
            .min();
        if let Some(lo) = lowest {
            if b < lo {
                return Err(CheckError::WindowTooSmall(format!(
                    "rank {n}: both sides are known only up to q^{b}, below their lowest term q^{lo}"
                )));
            }
        }
    }
    Ok(())
}

fn compare(
    b: &mut Builder,
    lhs: &GradedSeries,
    rhs: &GradedSeries,
    r_max: usize,
    what: &str,
) -> Result<(), CheckError> {
    ensure_overlap(lhs, rhs, r_max)?;
    if let Some(d) = lhs.first_difference(rhs) {
        b.fail(Witness::from_discrepancy(d, what));
    }
    Ok(())
}

fn one_minus_q(policy: TruncationPolicy) -> Result<GradedSeries, SeriesError> {
    int_terms(&[(0, 0, 1), (0, 2, -1)], policy)
}

/// `1 + sum_r t^r f_r` from rank-0 series.
fn assemble(policy: TruncationPolicy, parts: &[GradedSeries]) -> Result<GradedSeries, SeriesError> {
    let mut out = GradedSeries::one(policy);
    for (i, f) in parts.iter().enumerate() {
        out = out.add(&f.shift_rank(i + 1))?;
    }
    Ok(out)
}

/// `pexp(sum_r t^r g_r * bcstar)` from rank-0 series `g_r`.
fn plethystic_side(
    policy: TruncationPolicy,
    parts: &[GradedSeries],
) -> Result<GradedSeries, SeriesError> {
    let bc = bcstar_series(policy)?;
    let mut gen = GradedSeries::zero(policy);
    for (i, g) in parts.iter().enumerate() {
        gen = gen.add(&g.mul(&bc)?.shift_rank(i + 1))?;
    }
    pexp(&gen)
}

fn apply_lhs_corruption(
    policy: TruncationPolicy,
    parts: &mut [GradedSeries],
    c: Option<Corruption>,
) -> Result<(), SeriesError> {
    match c {
        Some(Corruption::ReflectionOffByOne) => {
            for p in parts.iter_mut() {
                *p = p.shift_q(HalfInt::from_int(1))?;
            }
        }
        Some(Corruption::CorruptLhs) => {
            parts[0] = parts[0].add(&int_terms(&[(0, 2, 1)], policy)?)?;
        }
        _ => {}
    }
    Ok(())
}

/// Euler's identity `sum_r t^r / prod_{i<=r} (1 - q^i) = pexp(t / (1 - q))`,
/// with the left side built from `1/|GL_r(F_q)|` through the count dictionary.
pub fn check_genus0_euler(spec: &CheckSpec) -> Result<CheckReport, CheckError> {
    spec.validate()?;
    if spec.genus != 0 {
        return Err(CheckError::Precondition(format!(
            "genus-0 check run with genus {}",
            spec.genus
        )));
    }
    let c = spec.corruption_in(
        &[Corruption::ReflectionOffByOne, Corruption::CorruptLhs],
        "genus-0",
    )?;
    let p = spec.window;
    if p.q_min > HalfInt::ZERO {
        return Err(CheckError::WindowTooSmall(
            "genus-0 series start at q^0".into(),
        ));
    }
    let mut b = Builder::new(spec);
    let mut parts: Vec<GradedSeries> = (1..=spec.r_max)
        .map(|r| pt_mod_glr_bm_vir_series(r, 0, p))
        .collect::<Result<_, _>>()?;
    apply_lhs_corruption(p, &mut parts, c)?;
    let lhs = assemble(p, &parts)?;
    b.oracle("lhs: 1/|GL_r(F_q)| through the count dictionary");
    b.lap("lhs");
    let rhs = pexp(&bcstar_series(p)?.shift_rank(1))?;
    b.oracle("rhs: plethystic exponential of t * H(pt/C*)");
    b.lap("rhs");
    compare(&mut b, &lhs, &rhs, spec.r_max, "Euler identity")?;
    for r in 1..=spec.r_max {
        let c0 = lhs.coeff(r, HalfInt::ZERO)?;
        if c0 != BigInt::from(1) {
            b.fail(Witness {
                t_degree: r,
                q_exponent: Some("0".into()),
                cohomological_degree: None,
                filtration_index: None,
                what: "degree-0 part of rank".into(),
                lhs: c0.to_string(),
                rhs: "1".into(),
            });
        }
    }
    b.lap("compare");
    Ok(b.finish())
}

/// Rank `r` genus-1 torus series `(q - 1)^2 q^{-1}`, from the twisted
/// Frobenius count where available.
fn torus_series(
    r: usize,
    cfg: &CountConfig,
    p: TruncationPolicy,
) -> Result<(GradedSeries, &'static str), CheckError> {
    if r <= 2 {
        let (s, o) = smooth_twisted_series(1, r, 1, cfg, p)?;
        Ok((s, oracle_name(o)))
    } else {
        Ok((
            int_terms(&[(0, -2, 1), (0, 0, -2), (0, 2, 1)], p)?,
            "closed-form torus",
        ))
    }
}

/// Pinned genus-1 class-count polynomials.
fn class_count_fixture(r: usize) -> Option<IntPoly> {
    match r {
        1 => Some(IntPoly::from_i64s(&[-1, 1])),
        2 => Some(IntPoly::from_i64s(&[-1, 0, 1])),
        3 => Some(IntPoly::from_i64s(&[0, -1, 0, 1])),
        _ => None,
    }
}

/// Genus-1 PBW identity: reflected class counts against the plethystic
/// exponential of the torus series.
pub fn check_genus1_betti(spec: &CheckSpec) -> Result<CheckReport, CheckError> {
    spec.validate()?;
    if spec.genus != 1 {
        return Err(CheckError::Precondition(format!(
            "genus-1 check run with genus {}",
            spec.genus
        )));
    }
    let c = spec.corruption_in(
        &[
            Corruption::ReflectionOffByOne,
            Corruption::CorruptLhs,
            Corruption::CharacterSignFlip,
        ],
        "genus-1",
    )?;
    if spec.r_max > 3 {
        return Err(CheckError::Precondition(
            "class counting is implemented for r <= 3".into(),
        ));
    }
    let p = spec.window;
    let cfg = spec.count_config(c);
    let mut b = Builder::new(spec);
    let mut parts = Vec::new();
    let mut fits = serde_json::Map::new();
    for r in 1..=spec.r_max {
        let k = fit_class_count_poly(r, cfg.group_cap)?;
        fits.insert(r.to_string(), Value::String(k.to_string()));
        if let Some(want) = class_count_fixture(r) {
            if k != want {
                b.fail(Witness {
                    t_degree: r,
                    q_exponent: None,
                    cohomological_degree: None,
                    filtration_index: None,
                    what: "class-count polynomial".into(),
                    lhs: k.to_string(),
                    rhs: want.to_string(),
                });
            }
        }
        let count = RationalFunctionQ::from_poly(k);
        parts.push(bm_vir_from_count(
            &count,
            VirtualDimension::surface(1, r as i64),
            p,
        )?);
    }
    b.details
        .insert("class_count_polynomials".into(), Value::Object(fits));
    b.oracle("lhs: class counts (orbit enumeration r <= 2, rational canonical forms r = 3), fitted at q = 2, 3, 4, 5(, 7)");
    apply_lhs_corruption(p, &mut parts, c)?;
    let lhs = assemble(p, &parts)?;
    b.lap("lhs");
    let mut torus = Vec::new();
    for r in 1..=spec.r_max {
        let (s, o) = torus_series(r, &cfg, p)?;
        b.oracle(format!("rhs rank {r}: {o}"));
        torus.push(s);
    }
    let rhs = plethystic_side(p, &torus)?;
    b.oracle("rhs: plethystic exponential of torus series times H(pt/C*)");
    b.lap("rhs");
    compare(&mut b, &lhs, &rhs, spec.r_max, "genus-1 PBW identity")?;
    b.lap("compare");
    Ok(b.finish())
}

/// E-series identity: stack counts against the plethystic exponential of
/// smooth twisted counts.
pub fn check_echeck(spec: &CheckSpec) -> Result<CheckReport, CheckError> {
    spec.validate()?;
    let c = spec.corruption_in(
        &[
            Corruption::ReflectionOffByOne,
            Corruption::CorruptLhs,
            Corruption::CharacterSignFlip,
        ],
        "E-series",
    )?;
    let (g, p) = (spec.genus, spec.window);
    let cfg = spec.count_config(c);
    let mut b = Builder::new(spec);
    let mut parts = Vec::new();
    for r in 1..=spec.r_max {
        let vdim = VirtualDimension::surface(g as i64, r as i64);
        let (s, o) = stack_count_series(g, r, 0, vdim, StackOracle::Auto, &cfg, p)?;
        b.oracle(format!("lhs rank {r}: {}", oracle_name(o)));
        parts.push(s);
    }
    apply_lhs_corruption(p, &mut parts, c)?;
    let lhs = assemble(p, &parts)?;
    b.lap("lhs");
    let mut smooth = Vec::new();
    for r in 1..=spec.r_max {
        let (s, o) = smooth_twisted_series(g, r, 1, &cfg, p)?;
        b.oracle(format!("rhs rank {r}: twisted count, {}", oracle_name(o)));
        smooth.push(s);
    }
    let rhs = plethystic_side(p, &smooth)?;
    b.lap("rhs");
    compare(&mut b, &lhs, &rhs, spec.r_max, "E-series identity")?;
    b.lap("compare");
    Ok(b.finish())
}

/// BPS series `(1 - q) plog(stack)`.
pub fn extract_bps(stack: &GradedSeries) -> Result<GradedSeries, SeriesError> {
    plog(stack)?.mul(&one_minus_q(*stack.policy())?)
}

/// Candidate intersection-cohomology series: `1 - 1/pexp(bps)`.
pub fn extract_ic(stack: &GradedSeries) -> Result<GradedSeries, SeriesError> {
    let p = *stack.policy();
    let tensor = pexp(&extract_bps(stack)?)?;
    GradedSeries::one(p).sub(&tensor.invert_geometric()?)
}

/// Checks that `q^c IC_r` with `c = r^2 (g - 1) + 1` is a polynomial with
/// `n_k = n_{2c-k}` and `(-1)^k n_k >= 0`.
pub fn ic_palindromic(ic: &GradedSeries, g: u32, r: usize) -> Result<Option<Witness>, CheckError> {
    let c = (r * r) as i64 * (g as i64 - 1) + 1;
    if let Some(bound) = ic.known_to(r) {
        if bound < HalfInt::from_int(c) {
            return Err(CheckError::WindowTooSmall(format!(
                "rank {r}: IC series known to q^{bound}, need q^{c}"
            )));
        }
    }
    let mut n: BTreeMap<i64, BigInt> = BTreeMap::new();
    let witness = |e: String, what: &str, lhs: String, rhs: String| Witness {
        t_degree: r,
        q_exponent: Some(e),
        cohomological_degree: None,
        filtration_index: None,
        what: what.into(),
        lhs,
        rhs,
    };
    for (e, v) in ic.rank_terms(r) {
        let Some(e) = e.as_integer() else {
            return Ok(Some(witness(
                e.to_string(),
                "half-integral exponent in IC series",
                v.to_string(),
                "0".into(),
            )));
        };
        let k = e + c;
        if !(0..=2 * c).contains(&k) {
            return Ok(Some(witness(
                e.to_string(),
                "IC term outside [q^-c, q^c]",
                v.to_string(),
                "0".into(),
            )));
        }
        n.insert(k, v.clone());
    }
    let zero = BigInt::zero();
    for k in 0..=2 * c {
        let a = n.get(&k).unwrap_or(&zero);
        let mirror = n.get(&(2 * c - k)).unwrap_or(&zero);
        if a != mirror {
            return Ok(Some(witness(
                (k - c).to_string(),
                "IC palindromicity",
                a.to_string(),
                mirror.to_string(),
            )));
        }
        let signed = if k % 2 == 0 { a.clone() } else { -a };
        if signed.is_negative() {
            return Ok(Some(witness(
                (k - c).to_string(),
                "IC signed positivity",
                a.to_string(),
                "sign (-1)^k".into(),
            )));
        }
    }
    Ok(None)
}

/// IC extraction from genus `g >= 2` stack counts, with the palindromicity property.
pub fn check_ic(spec: &CheckSpec) -> Result<CheckReport, CheckError> {
    spec.validate()?;
    let c = spec.corruption_in(
        &[Corruption::ReflectionOffByOne, Corruption::CorruptLhs],
        "IC",
    )?;
    if spec.genus < 2 {
        return Err(CheckError::Precondition(
            "IC extraction is checked for genus >= 2".into(),
        ));
    }
    let (g, p) = (spec.genus, spec.window);
    let cfg = spec.count_config(None);
    let mut b = Builder::new(spec);
    let mut parts = Vec::new();
    for r in 1..=spec.r_max {
        let (s, o) = stack_count_series(
            g,
            r,
            0,
            VirtualDimension::surface(g as i64, r as i64),
            StackOracle::Auto,
            &cfg,
            p,
        )?;
        b.oracle(format!("stack rank {r}: {}", oracle_name(o)));
        parts.push(s);
    }
    apply_lhs_corruption(p, &mut parts, c)?;
    let stack = assemble(p, &parts)?;
    b.lap("counts");
    let ic = extract_ic(&stack)?;
    let bps = extract_bps(&stack)?;
    b.lap("extract");
    let mut polys = serde_json::Map::new();
    for r in 1..=spec.r_max {
        if let Some(w) = ic_palindromic(&ic, g, r)? {
            b.fail(w);
        }
        let shown: Vec<String> = ic
            .rank_terms(r)
            .map(|(e, v)| format!("{v}*q^{e}"))
            .collect();
        polys.insert(r.to_string(), Value::String(shown.join(" + ")));
    }
    // rank 1 of a free Lie algebra is its generating space
    let ic1 = ic.rank_part(1);
    let bps1 = bps.rank_part(1);
    if let Some(d) = ic1.first_difference(&bps1) {
        b.fail(Witness::from_discrepancy(d, "rank-1 IC against rank-1 BPS"));
    }
    b.details.insert("ic".into(), Value::Object(polys));
    b.oracle("ic: 1 - 1/pexp((1 - q) plog(stack))");
    b.lap("compare");
    Ok(b.finish())
}

fn compare_tables(b: &mut Builder, w: &FiltrationTable, f: &FiltrationTable, what: &str) {
    let mut keys: BTreeSet<(usize, i64, i64)> = BTreeSet::new();
    for ((n, i, k), _) in w.entries() {
        if k.rem_euclid(2) != 0 {
            b.fail(Witness {
                t_degree: n,
                q_exponent: None,
                cohomological_degree: Some(i),
                filtration_index: Some(k),
                what: format!("{what}: odd weight"),
                lhs: w.graded(n, i, k).to_string(),
                rhs: "0".into(),
            });
            return;
        }
        keys.insert((n, i, k / 2));
    }
    keys.extend(f.entries().map(|(key, _)| key));
    for (n, i, k) in keys {
        let (a, c) = (w.graded(n, i, 2 * k), f.graded(n, i, k));
        if a != c {
            b.fail(Witness {
                t_degree: n,
                q_exponent: None,
                cohomological_degree: Some(i),
                filtration_index: Some(k),
                what: format!("{what}: dim Gr_W[2i] vs dim Gr_{}[i]", f.kind),
                lhs: a.to_string(),
                rhs: c.to_string(),
            });
            return;
        }
    }
}

fn restrict(sym: &HashMap<Label, i64>, keep: impl Fn(&Label) -> bool) -> HashMap<Label, i64> {
    sym.iter()
        .filter(|(l, _)| keep(l))
        .map(|(l, d)| (*l, *d))
        .collect()
}

fn profile_json(t: &FiltrationTable, rank: usize) -> Value {
    let prof = t.profile(rank);
    json!(prof.iter().map(|(k, d)| json!([k, d])).collect::<Vec<_>>())
}

/// Signed E-series `sum (-1)^i dim Gr^W_w H^i q^{w/2} t^n` of a weight table,
/// exact for `q^{w/2}` with `w <= deg_cap`.
fn e_series(
    w: &FiltrationTable,
    p: TruncationPolicy,
    deg_cap: i64,
) -> Result<GradedSeries, SeriesError> {
    let mut terms: BTreeMap<(usize, i64), BigInt> = BTreeMap::new();
    for ((n, i, k), d) in w.entries() {
        let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
        *terms.entry((n, k)).or_insert_with(BigInt::zero) += sign * d;
    }
    let mut known = vec![deg_cap; p.t_max + 1];
    known[0] = i64::MAX;
    let mut s = GradedSeries::from_raw(p, known, terms)?;
    s = s.add(&GradedSeries::one(p))?;
    Ok(s)
}

/// PS=WS in genus 0 and 1: weight tables on the Betti side against the
/// combined perverse tables on the Dolbeault side.
pub fn check_psws_genus01(spec: &CheckSpec) -> Result<CheckReport, CheckError> {
    spec.validate()?;
    let c = spec.corruption_in(&[Corruption::TableShift], "PS=WS")?;
    let p = spec.window;
    let r_max = spec.r_max;
    let q_top = p.q_max.doubled().div_euclid(2);
    if q_top < 1 {
        return Err(CheckError::WindowTooSmall("need q_max >= 1".into()));
    }
    let deg_cap = 2 * q_top;
    let mut b = Builder::new(spec);
    match spec.genus {
        0 => {
            // Betti side: pure, weight = degree, dims from 1/|GL_r(F_q)|
            let mut w = FiltrationTable::new(FiltrationKind::Weight);
            for r in 1..=r_max {
                let s = pt_mod_glr_bm_vir_series(r, 0, p)?;
                for (e, v) in s.rank_terms(0) {
                    let d = v
                        .try_into()
                        .map_err(|_| CheckError::Table("dimension overflow".into()))?;
                    w.add(r, e.doubled(), e.doubled(), d);
                }
            }
            let betti_nums = w.totals();
            w.validate(&betti_nums)?;
            b.oracle("W: purity on the counting series of pt/GL_r");
            // Dolbeault side: Sym of x_k, degree 2k, L-degree 2k, H-degree 2k
            let gens: Vec<Generator> = (0..=q_top)
                .map(|k| Generator {
                    rank: 1,
                    degree: 2 * k,
                    weight: 0,
                    perverse: 2 * k,
                    less_perverse: 2 * k,
                    multiplicity: 1,
                })
                .collect();
            let sym = super_sym(&gens, r_max, deg_cap);
            let l = project(&sym, FiltrationKind::LessPerverse);
            let mut f = project(&sym, FiltrationKind::Combined);
            l.validate(&betti_nums)?;
            if c == Some(Corruption::TableShift) {
                f = f.shifted(1);
            }
            f.validate(&betti_nums)?;
            b.oracle("F: Sym of H(pt/C*) shifts with L-degree 2k over a point base");
            b.lap("tables");
            compare_tables(&mut b, &w, &f, "PS=WS");
            b.details.insert("rank1_W".into(), profile_json(&w, 1));
            b.details.insert("rank1_F".into(), profile_json(&f, 1));
        }
        1 => {
            let mut betti_gens = Vec::new();
            let mut dol_gens = Vec::new();
            for r in 1..=r_max {
                for k in 0..=(q_top + r_max as i64 + 1) {
                    for (j, mult) in [(0, 1), (1, 2), (2, 1)] {
                        let degree = j - 2 + 2 * k;
                        // H^j of (C*)^2 is pure of weight 2j
                        betti_gens.push(Generator {
                            rank: r,
                            degree,
                            weight: 2 * (j - 1) + 2 * k,
                            perverse: 0,
                            less_perverse: 2 * k,
                            multiplicity: mult,
                        });
                        // H^j of the elliptic fibre sits in perverse degree j
                        dol_gens.push(Generator {
                            rank: r,
                            degree,
                            weight: 0,
                            perverse: (j - 1) + 2 * k,
                            less_perverse: 2 * k,
                            multiplicity: mult,
                        });
                    }
                }
            }
            let bsym = super_sym(&betti_gens, r_max, deg_cap);
            let dsym = super_sym(&dol_gens, r_max, deg_cap);
            let betti_nums = betti(&bsym);
            let w = project(&bsym, FiltrationKind::Weight);
            w.validate(&betti_nums)?;
            let h = project(&dsym, FiltrationKind::Perverse);
            let l = project(&dsym, FiltrationKind::LessPerverse);
            let mut f = project(&dsym, FiltrationKind::Combined);
            for t in [&h, &l] {
                t.validate(&betti_nums)?;
            }
            if c == Some(Corruption::TableShift) {
                f = f.shifted(1);
            }
            f.validate(&betti_nums)?;
            b.oracle("W: Sym of small-diagonal torus classes times H(pt/C*)");
            b.oracle("F: Sym of small-diagonal elliptic-fibre classes, H and L degrees combined");
            b.lap("tables");
            // the weight table must reproduce the counting series
            let es = e_series(&w, p, deg_cap)?;
            let mut parts = Vec::new();
            for r in 1..=r_max.min(3) {
                let k = fit_class_count_poly(r, spec.budgets.group_cap)?;
                parts.push(bm_vir_from_count(
                    &RationalFunctionQ::from_poly(k),
                    VirtualDimension(0),
                    p,
                )?);
            }
            let counted = assemble(p, &parts)?;
            if let Some(d) = es.first_difference(&counted) {
                b.fail(Witness::from_discrepancy(
                    d,
                    "E-series of W table against class counts",
                ));
            }
            b.oracle("W cross-check: signed E-series against fitted class counts");
            b.lap("e-series");
            compare_tables(&mut b, &w, &f, "PS=WS");
            // L^0 pieces: weight against H alone
            let w0 = project(&restrict(&bsym, |l| l.4 == 0), FiltrationKind::Weight);
            let h0 = project(&restrict(&dsym, |l| l.4 == 0), FiltrationKind::Perverse);
            let h0 = if c == Some(Corruption::TableShift) {
                h0.shifted(1)
            } else {
                h0
            };
            compare_tables(&mut b, &w0, &h0, "L^0 P=W");
            b.details.insert("rank1_L0_W".into(), profile_json(&w0, 1));
            b.details.insert("rank1_L0_H".into(), profile_json(&h0, 1));
            b.details.insert("rank1_W".into(), profile_json(&w, 1));
            b.details.insert("rank1_F".into(), profile_json(&f, 1));
        }
        g => {
            return Err(CheckError::Precondition(format!(
                "PS=WS tables are built for genus 0 and 1, got {g}"
            )))
        }
    }
    b.lap("compare");
    Ok(b.finish())
}

/// For the `g`-loop quiver at `d = 1`, the BPS series extracted from the
/// preprojective stack count `q^{2g} / (q - 1)` equals `a(q^{-1})` for the
/// counted Kac polynomial `a`.
pub fn kac1_consistency(g: usize, policy: TruncationPolicy) -> Result<Option<Witness>, CheckError> {
    let quiver = Quiver::loops(g);
    let d = DimVector(vec![1]);
    let a = kac_polynomial(&quiver, &d, &KacOptions::default()).map_err(|e| match e {
        crate::error::QuiverError::Count(c) => CheckError::Count(c),
        other => CheckError::Precondition(other.to_string()),
    })?;
    let vdim = preproj_vdim(&quiver, &d).map_err(|e| CheckError::Precondition(e.to_string()))?;
    // d = 1: the preprojective relation is vacuous on the doubled quiver's 2g loops
    let count = RationalFunctionQ::new(
        IntPoly::monomial(2 * g, BigInt::from(1)),
        IntPoly::from_i64s(&[-1, 1]),
    )?;
    let stack =
        GradedSeries::one(policy).add(&bm_vir_from_count(&count, vdim, policy)?.shift_rank(1))?;
    let bps = extract_bps(&stack)?.rank_part(1);
    let want = bm_vir_from_count(
        &RationalFunctionQ::from_poly(a.poly().clone()),
        VirtualDimension(0),
        policy,
    )?
    .shift_rank(1);
    Ok(bps
        .first_difference(&want)
        .map(|d| Witness::from_discrepancy(d, "BPS rank 1 against a(1/q)")))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Genus0,
    Genus1,
    Echeck,
    Psws,
    Ic,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Genus0 => "genus0",
            CheckKind::Genus1 => "genus1",
            CheckKind::Echeck => "echeck",
            CheckKind::Psws => "psws",
            CheckKind::Ic => "ic",
        }
    }
}

pub fn run_check(kind: CheckKind, spec: &CheckSpec) -> Result<CheckReport, CheckError> {
    match kind {
        CheckKind::Genus0 => check_genus0_euler(spec),
        CheckKind::Genus1 => check_genus1_betti(spec),
        CheckKind::Echeck => check_echeck(spec),
        CheckKind::Psws => check_psws_genus01(spec),
        CheckKind::Ic => check_ic(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::free_lie_series;
    use crate::series::coeff_i64;
    use proptest::prelude::*;

    #[test]
    fn genus0_passes_and_detects_corruption() {
        let spec = CheckSpec::new("genus0", 0, 3).with_q_window(0, 12).unwrap();
        let r = check_genus0_euler(&spec).unwrap();
        assert!(r.pass, "{:?}", r.witness);
        let r1 = check_genus0_euler(&CheckSpec::new("g0", 0, 1)).unwrap();
        assert!(r1.pass);
        for c in [Corruption::CorruptLhs, Corruption::ReflectionOffByOne] {
            let r = check_genus0_euler(&spec.clone().corrupted(c)).unwrap();
            assert!(!r.pass);
            assert_eq!(r.witness.unwrap().t_degree, 1);
        }
        assert!(check_genus0_euler(&spec.clone().corrupted(Corruption::TableShift)).is_err());
        assert!(check_genus0_euler(&CheckSpec::new("g", 1, 2)).is_err());
    }

    #[test]
    fn genus1_small() {
        let spec = CheckSpec::new("genus1", 1, 2);
        let r = check_genus1_betti(&spec).unwrap();
        assert!(r.pass, "{:?}", r.witness);
        let r = check_genus1_betti(&spec.clone().corrupted(Corruption::CharacterSignFlip)).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.t_degree, 2);
    }

    #[test]
    fn echeck_genus_one_and_two_rank_one() {
        for g in 0..=2 {
            let r = check_echeck(&CheckSpec::new("echeck", g, 1)).unwrap();
            assert!(r.pass, "g={g}: {:?}", r.witness);
        }
    }

    #[test]
    fn psws_tables() {
        let r = check_psws_genus01(&CheckSpec::new("psws", 1, 1)).unwrap();
        assert!(r.pass, "{:?}", r.witness);
        assert_eq!(r.details["rank1_L0_W"], json!([[-2, 1], [0, 2], [2, 1]]));
        assert_eq!(r.details["rank1_L0_H"], json!([[-1, 1], [0, 2], [1, 1]]));
        let r = check_psws_genus01(&CheckSpec::new("psws", 0, 2)).unwrap();
        assert!(r.pass, "{:?}", r.witness);
        let r = check_psws_genus01(&CheckSpec::new("psws", 0, 2).corrupted(Corruption::TableShift))
            .unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn bps_of_genus0_and_genus1() {
        let p = TruncationPolicy::ints(3, -10, 10).unwrap();
        let parts: Vec<_> = (1..=3)
            .map(|r| pt_mod_glr_bm_vir_series(r, 0, p).unwrap())
            .collect();
        let bps = extract_bps(&assemble(p, &parts).unwrap()).unwrap();
        assert_eq!(coeff_i64(&bps, 1, HalfInt::ZERO).unwrap(), 1);
        assert!(bps.rank_part(2).is_empty() && bps.rank_part(3).is_empty());
        assert_eq!(bps.rank_terms(1).count(), 1);
    }

    #[test]
    fn ic_genus2_rank1_is_shifted_fourth_power() {
        let p = TruncationPolicy::ints(1, -10, 10).unwrap();
        let r = check_ic(&CheckSpec::new("ic", 2, 1)).unwrap();
        assert!(r.pass, "{:?}", r.witness);
        let (s, _) = stack_count_series(
            2,
            1,
            0,
            VirtualDimension(2),
            StackOracle::Auto,
            &CountConfig::default(),
            p,
        )
        .unwrap();
        let ic = extract_ic(&assemble(p, &[s]).unwrap()).unwrap();
        let want = int_terms(
            &[(1, -4, 1), (1, -2, -4), (1, 0, 6), (1, 2, -4), (1, 4, 1)],
            p,
        )
        .unwrap();
        assert!(ic.rank_part(1).first_difference(&want).is_none());
    }

    #[test]
    fn kac1_for_loop_quivers() {
        let p = TruncationPolicy::ints(1, -10, 10).unwrap();
        for g in 0..=3 {
            assert_eq!(kac1_consistency(g, p).unwrap(), None, "g={g}");
        }
    }

    fn arb_gen() -> impl Strategy<Value = Vec<(usize, i64, i64)>> {
        prop::collection::vec((1usize..4, -2i64..3, -2i64..3), 0..5)
    }

    proptest! {
        #[test]
        fn bps_roundtrip(c in arb_gen()) {
            let p = TruncationPolicy::ints(3, -6, 10).unwrap();
            let g = int_terms(&c.iter().map(|&(n, e, a)| (n, 2 * e, a)).collect::<Vec<_>>(), p).unwrap();
            let stack = pexp(&g.mul(&bcstar_series(p).unwrap()).unwrap()).unwrap();
            let back = extract_bps(&stack).unwrap();
            prop_assert!(back.first_difference(&g).is_none());
        }

        #[test]
        fn ic_roundtrip(c in arb_gen()) {
            let p = TruncationPolicy::ints(3, -6, 10).unwrap();
            let v = int_terms(&c.iter().map(|&(n, e, a)| (n, 2 * e, a)).collect::<Vec<_>>(), p).unwrap();
            let stack = pexp(&free_lie_series(&v).unwrap().mul(&bcstar_series(p).unwrap()).unwrap()).unwrap();
            let back = extract_ic(&stack).unwrap();
            prop_assert!(back.first_difference(&v).is_none());
        }
    }
}
