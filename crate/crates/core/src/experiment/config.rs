//! Experiment configuration: a sectioned key-value file.
//!
//! ```ini
//! [problem]
//! agents = 5
//! p = 3
//! d = 3
//! f = l1:0.1
//! g = box:-1:1
//! coupling = bilinear
//! seed = 7
//!
//! [graph]
//! x = ring
//!
//! [mixing]
//! x = metropolis
//!
//! [algorithm]
//! name = alg2
//! tau = auto
//!
//! [run]
//! max_iters = 100000
//! tol = 1e-10
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ini::Ini;

use crate::error::{Error, Result};
use crate::inclusion::InitVariant;
use crate::linalg::{inline_matrix, parse_inline_matrix, Matrix, Vector};
use crate::operators::Prox;

/// Prox kinds: `zero`, `l1:<weight>`, `box:<lo>:<hi>`, `zero_set`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProxSpec {
    Zero,
    L1(f64),
    Box(f64, f64),
    ZeroSet,
}

impl ProxSpec {
    pub fn build(&self) -> Result<Prox> {
        match *self {
            ProxSpec::Zero => Ok(Prox::Zero),
            ProxSpec::L1(w) => Prox::l1(w),
            ProxSpec::Box(lo, hi) => Prox::interval(lo, hi),
            ProxSpec::ZeroSet => Ok(Prox::ZeroSet),
        }
    }
}

impl fmt::Display for ProxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProxSpec::Zero => write!(f, "zero"),
            ProxSpec::L1(w) => write!(f, "l1:{w}"),
            ProxSpec::Box(lo, hi) => write!(f, "box:{lo}:{hi}"),
            ProxSpec::ZeroSet => write!(f, "zero_set"),
        }
    }
}

fn parse_f64(text: &str) -> std::result::Result<f64, String> {
    text.trim().parse::<f64>().map_err(|_| format!("`{text}` is not a number"))
}

impl FromStr for ProxSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["zero"] => Ok(ProxSpec::Zero),
            ["zero_set"] => Ok(ProxSpec::ZeroSet),
            ["l1", w] => {
                let w = parse_f64(w)?;
                if w < 0.0 {
                    return Err("l1 weight must be nonnegative".into());
                }
                Ok(ProxSpec::L1(w))
            }
            ["box", lo, hi] => {
                let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
                if lo > hi {
                    return Err(format!("box bounds are inverted ({lo} > {hi})"));
                }
                Ok(ProxSpec::Box(lo, hi))
            }
            _ => Err(format!("unknown prox `{s}` (expected zero, l1:w, box:lo:hi or zero_set)")),
        }
    }
}

/// Coupling families. `bilinear` draws `Mᵢ` and linear terms, `skew` only
/// `Mᵢ`, `quadratic` adds PSD curvature in both blocks, `explicit` takes
/// the matrices from `m.<i>`, `pmat.<i>`, `rmat.<i>`, `a.<i>`, `b.<i>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingKind {
    Bilinear,
    Skew,
    Quadratic,
    None,
    Explicit,
}

impl CouplingKind {
    const NAMES: [(&'static str, CouplingKind); 5] = [
        ("bilinear", CouplingKind::Bilinear),
        ("skew", CouplingKind::Skew),
        ("quadratic", CouplingKind::Quadratic),
        ("none", CouplingKind::None),
        ("explicit", CouplingKind::Explicit),
    ];
}

impl fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = Self::NAMES.iter().find(|(_, k)| k == self).map(|(n, _)| *n).unwrap_or("?");
        f.write_str(name)
    }
}

impl FromStr for CouplingKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::NAMES
            .iter()
            .find(|(n, _)| *n == s.trim())
            .map(|(_, k)| *k)
            .ok_or_else(|| format!("unknown coupling `{s}`"))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExplicitCoupling {
    pub m: Option<Matrix>,
    pub p_mat: Option<Matrix>,
    pub r_mat: Option<Matrix>,
    pub a: Option<Vector>,
    pub b: Option<Vector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartPoint {
    Zero,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSection {
    pub agents: usize,
    pub p: usize,
    /// `0` makes this a pure minimization problem.
    pub d: usize,
    pub f: ProxSpec,
    pub g: ProxSpec,
    pub f_overrides: BTreeMap<usize, ProxSpec>,
    pub g_overrides: BTreeMap<usize, ProxSpec>,
    pub coupling: CouplingKind,
    pub explicit: BTreeMap<usize, ExplicitCoupling>,
    pub seed: u64,
    pub scale: f64,
    pub start: StartPoint,
}

impl ProblemSection {
    pub fn is_minimization(&self) -> bool {
        self.d == 0
    }
}

/// `path`, `ring`, `star`, `complete`, `random:<seed>:<density>`,
/// `file:<path>`.
#[derive(Debug, Clone, PartialEq)]
pub enum TopologySpec {
    Path,
    Ring,
    Star,
    Complete,
    Random { seed: u64, density: f64 },
    File(PathBuf),
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySpec::Path => write!(f, "path"),
            TopologySpec::Ring => write!(f, "ring"),
            TopologySpec::Star => write!(f, "star"),
            TopologySpec::Complete => write!(f, "complete"),
            TopologySpec::Random { seed, density } => write!(f, "random:{seed}:{density}"),
            TopologySpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for TopologySpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(TopologySpec::File(PathBuf::from(path)));
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["path"] => Ok(TopologySpec::Path),
            ["ring"] => Ok(TopologySpec::Ring),
            ["star"] => Ok(TopologySpec::Star),
            ["complete"] => Ok(TopologySpec::Complete),
            ["random", seed, density] => {
                let seed = seed.parse().map_err(|_| format!("`{seed}` is not a seed"))?;
                let density = parse_f64(density)?;
                if !(0.0..=1.0).contains(&density) {
                    return Err(format!("density {density} must lie in [0, 1]"));
                }
                Ok(TopologySpec::Random { seed, density })
            }
            _ => Err(format!("unknown topology `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSection {
    pub x: TopologySpec,
    /// Network for the `y` block; the `x` network when absent.
    pub y: Option<TopologySpec>,
}

/// `metropolis` or `laplacian:<alpha>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MixingSpec {
    Metropolis,
    Laplacian(f64),
}

impl fmt::Display for MixingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MixingSpec::Metropolis => write!(f, "metropolis"),
            MixingSpec::Laplacian(a) => write!(f, "laplacian:{a}"),
        }
    }
}

impl FromStr for MixingSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["metropolis"] => Ok(MixingSpec::Metropolis),
            ["laplacian", alpha] => Ok(MixingSpec::Laplacian(parse_f64(alpha)?)),
            _ => Err(format!("unknown mixing scheme `{s}` (expected metropolis or laplacian:alpha)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingSection {
    pub x: MixingSpec,
    pub y: Option<MixingSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AlgorithmName {
    Alg2,
    Alg1,
    Pdtr,
    Pdhg,
    Forb,
    CondatVu,
    PgExtra,
}

impl AlgorithmName {
    pub const ALL: [AlgorithmName; 7] = [
        AlgorithmName::Alg2,
        AlgorithmName::Alg1,
        AlgorithmName::Pdtr,
        AlgorithmName::Pdhg,
        AlgorithmName::Forb,
        AlgorithmName::CondatVu,
        AlgorithmName::PgExtra,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmName::Alg2 => "alg2",
            AlgorithmName::Alg1 => "alg1",
            AlgorithmName::Pdtr => "pdtr",
            AlgorithmName::Pdhg => "pdhg",
            AlgorithmName::Forb => "forb",
            AlgorithmName::CondatVu => "condat_vu",
            AlgorithmName::PgExtra => "pg_extra",
        }
    }

    /// Runs on the agents' network rather than on the product problem.
    pub fn is_decentralized(&self) -> bool {
        matches!(self, AlgorithmName::Alg1 | AlgorithmName::Alg2 | AlgorithmName::PgExtra)
    }
}

impl fmt::Display for AlgorithmName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .iter()
            .find(|a| a.as_str() == s.trim())
            .copied()
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSpec {
    Auto,
    Value(f64),
}

impl fmt::Display for StepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepSpec::Auto => write!(f, "auto"),
            StepSpec::Value(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for StepSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.trim() == "auto" {
            return Ok(StepSpec::Auto);
        }
        let v = parse_f64(s)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(format!("step {v} must be positive"));
        }
        Ok(StepSpec::Value(v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSection {
    pub name: AlgorithmName,
    pub tau: StepSpec,
    pub sigma: StepSpec,
    /// Fraction of the step bound used by `auto`; must lie in `(0, 1)`.
    pub safety: f64,
    pub init: InitVariant,
    /// Skip step-size checks of the centralized methods.
    pub allow_unsafe: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub max_iters: usize,
    pub tol: f64,
    pub trace_every: usize,
    /// Compute a centralized reference solution and report distances to it.
    pub reference: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSection,
    pub graph: GraphSection,
    pub mixing: MixingSection,
    pub algorithm: AlgorithmSection,
    pub run: RunSection,
    /// Algorithms for `compare`.
    pub compare: Vec<AlgorithmName>,
}

struct Section<'a> {
    name: &'static str,
    props: Option<&'a ini::Properties>,
}

impl<'a> Section<'a> {
    fn raw(&self, key: &str) -> Option<&'a str> {
        self.props.and_then(|p| p.get(key))
    }

    fn field(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn parse<T: FromStr>(&self, key: &str, default: Option<T>) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            Some(text) => text.trim().parse::<T>().map_err(|e| Error::config(self.field(key), e.to_string())),
            None => default.ok_or_else(|| Error::config(self.field(key), "missing")),
        }
    }

    fn optional<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.raw(key).map(|_| self.parse(key, None)).transpose()
    }

    fn keys(&self) -> Vec<&'a str> {
        self.props.map(|p| p.iter().map(|(k, _)| k).collect()).unwrap_or_default()
    }
}

fn indexed_key(key: &str) -> Option<(&str, usize)> {
    let (stem, idx) = key.split_once('.')?;
    Some((stem, idx.parse().ok()?))
}

fn parse_matrix(section: &Section<'_>, key: &str) -> Result<Matrix> {
    let text = section.raw(key).unwrap_or_default();
    parse_inline_matrix(text).map_err(|e| Error::config(section.field(key), e))
}

fn parse_vector(section: &Section<'_>, key: &str) -> Result<Vector> {
    let m = parse_matrix(section, key)?;
    Ok(Vector::from_iterator(m.len(), m.transpose().iter().copied()))
}

fn inline_vector(v: &Vector) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

const SECTIONS: [&str; 6] = ["problem", "graph", "mixing", "algorithm", "run", "compare"];

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Parse { line: e.line, msg: e.msg.to_string() })?;
        let mut seen = Vec::new();
        for (name, props) in ini.iter() {
            if let Some(s) = name {
                if seen.contains(&s) {
                    return Err(Error::config(s, "duplicate section"));
                }
                seen.push(s);
            }
            match name {
                None if props.is_empty() => {}
                None => return Err(Error::config(props.iter().next().map_or("", |(k, _)| k), "key outside any section")),
                Some(s) if !SECTIONS.contains(&s) => return Err(Error::config(s, "unknown section")),
                _ => {}
            }
        }
        let sec = |name: &'static str| Section { name, props: ini.section(Some(name)) };
        let problem = Self::parse_problem(&sec("problem"))?;

        let graph_sec = sec("graph");
        let graph = GraphSection { x: graph_sec.parse("x", None)?, y: graph_sec.optional("y")? };
        let mixing_sec = sec("mixing");
        let mixing = MixingSection { x: mixing_sec.parse("x", Some(MixingSpec::Metropolis))?, y: mixing_sec.optional("y")? };

        let alg = sec("algorithm");
        let init = match alg.raw("init").map(str::trim) {
            None | Some("default") => InitVariant::Default,
            Some("alt") => InitVariant::Alt,
            Some(other) => return Err(Error::config("algorithm.init", format!("unknown init `{other}` (default or alt)"))),
        };
        let algorithm = AlgorithmSection {
            name: alg.parse("name", None)?,
            tau: alg.parse("tau", Some(StepSpec::Auto))?,
            sigma: alg.parse("sigma", Some(StepSpec::Auto))?,
            safety: alg.parse("safety", Some(0.9))?,
            init,
            allow_unsafe: alg.parse("allow_unsafe", Some(false))?,
        };
        if !(algorithm.safety > 0.0 && algorithm.safety < 1.0) {
            return Err(Error::config("algorithm.safety", "must lie strictly between 0 and 1"));
        }

        let run_sec = sec("run");
        let run = RunSection {
            max_iters: run_sec.parse("max_iters", Some(100_000))?,
            tol: run_sec.parse("tol", Some(1e-10))?,
            trace_every: run_sec.parse("trace_every", Some(1))?,
            reference: run_sec.parse("reference", Some(false))?,
        };
        if !(run.tol >= 0.0) {
            return Err(Error::config("run.tol", "must be nonnegative"));
        }
        if run.trace_every == 0 {
            return Err(Error::config("run.trace_every", "must be at least 1"));
        }

        let cmp = sec("compare");
        let compare = match cmp.raw("algorithms") {
            None => Vec::new(),
            Some(list) => list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<AlgorithmName>().map_err(|e| Error::config("compare.algorithms", e)))
                .collect::<Result<_>>()?,
        };

        for (s, allowed) in [
            (&graph_sec, &["x", "y"][..]),
            (&mixing_sec, &["x", "y"][..]),
            (&alg, &["name", "tau", "sigma", "safety", "init", "allow_unsafe"][..]),
            (&run_sec, &["max_iters", "tol", "trace_every", "reference"][..]),
            (&cmp, &["algorithms"][..]),
        ] {
            if let Some(k) = s.keys().into_iter().find(|k| !allowed.contains(k)) {
                return Err(Error::config(s.field(k), "unknown key"));
            }
        }

        let cfg = ExperimentConfig { problem, graph, mixing, algorithm, run, compare };
        cfg.validate()?;
        Ok(cfg)
    }

    fn parse_problem(s: &Section<'_>) -> Result<ProblemSection> {
        let mut problem = ProblemSection {
            agents: s.parse("agents", None)?,
            p: s.parse("p", None)?,
            d: s.parse("d", Some(0))?,
            f: s.parse("f", Some(ProxSpec::Zero))?,
            g: s.parse("g", Some(ProxSpec::Zero))?,
            f_overrides: BTreeMap::new(),
            g_overrides: BTreeMap::new(),
            coupling: s.parse("coupling", Some(CouplingKind::Bilinear))?,
            explicit: BTreeMap::new(),
            seed: s.parse("seed", Some(0))?,
            scale: s.parse("scale", Some(1.0))?,
            start: match s.raw("start").map(str::trim) {
                None | Some("random") => StartPoint::Random,
                Some("zero") => StartPoint::Zero,
                Some(other) => return Err(Error::config("problem.start", format!("unknown start `{other}` (zero or random)"))),
            },
        };
        const PLAIN: [&str; 9] = ["agents", "p", "d", "f", "g", "coupling", "seed", "scale", "start"];
        for key in s.keys() {
            if PLAIN.contains(&key) {
                continue;
            }
            let Some((stem, i)) = indexed_key(key) else {
                return Err(Error::config(s.field(key), "unknown key"));
            };
            if i >= problem.agents {
                return Err(Error::config(s.field(key), format!("agent index {i} out of range")));
            }
            match stem {
                "f" => {
                    problem.f_overrides.insert(i, s.parse(key, None)?);
                }
                "g" => {
                    problem.g_overrides.insert(i, s.parse(key, None)?);
                }
                "m" => problem.explicit.entry(i).or_default().m = Some(parse_matrix(s, key)?),
                "pmat" => problem.explicit.entry(i).or_default().p_mat = Some(parse_matrix(s, key)?),
                "rmat" => problem.explicit.entry(i).or_default().r_mat = Some(parse_matrix(s, key)?),
                "a" => problem.explicit.entry(i).or_default().a = Some(parse_vector(s, key)?),
                "b" => problem.explicit.entry(i).or_default().b = Some(parse_vector(s, key)?),
                _ => return Err(Error::config(s.field(key), "unknown key")),
            }
        }
        Ok(problem)
    }

    /// Cross-field checks.
    pub fn validate(&self) -> Result<()> {
        let pr = &self.problem;
        if pr.agents == 0 {
            return Err(Error::config("problem.agents", "must be at least 1"));
        }
        if pr.p == 0 {
            return Err(Error::config("problem.p", "must be at least 1"));
        }
        if !(pr.scale >= 0.0 && pr.scale.is_finite()) {
            return Err(Error::config("problem.scale", "must be a finite nonnegative number"));
        }
        if pr.coupling == CouplingKind::Explicit {
            if pr.is_minimization() {
                return Err(Error::config("problem.coupling", "explicit coupling needs problem.d >= 1"));
            }
            for i in 0..pr.agents {
                let Some(e) = pr.explicit.get(&i).filter(|e| e.m.is_some()) else {
                    return Err(Error::config(format!("problem.m.{i}"), "required when coupling = explicit"));
                };
                let shapes = [
                    ("m", e.m.as_ref().map(|m| m.shape()), (pr.p, pr.d)),
                    ("pmat", e.p_mat.as_ref().map(|m| m.shape()), (pr.p, pr.p)),
                    ("rmat", e.r_mat.as_ref().map(|m| m.shape()), (pr.d, pr.d)),
                    ("a", e.a.as_ref().map(|v| (v.len(), 1)), (pr.p, 1)),
                    ("b", e.b.as_ref().map(|v| (v.len(), 1)), (pr.d, 1)),
                ];
                for (key, found, expected) in shapes {
                    if let Some(found) = found.filter(|f| *f != expected) {
                        return Err(Error::config(
                            format!("problem.{key}.{i}"),
                            format!("expected {}x{}, got {}x{}", expected.0, expected.1, found.0, found.1),
                        ));
                    }
                }
            }
        } else if let Some(i) = pr.explicit.keys().next() {
            return Err(Error::config(format!("problem.m.{i}"), "matrices are only read when coupling = explicit"));
        }
        if self.algorithm.name == AlgorithmName::PgExtra && !pr.is_minimization() {
            return Err(Error::config("algorithm.name", "pg_extra accepts only minimization configs (problem.d = 0)"));
        }
        if self.compare.contains(&AlgorithmName::PgExtra) && !pr.is_minimization() {
            return Err(Error::config("compare.algorithms", "pg_extra accepts only minimization configs (problem.d = 0)"));
        }
        Ok(())
    }

    pub fn to_ini_string(&self) -> String {
        let mut ini = Ini::new();
        let pr = &self.problem;
        {
            let mut s = ini.with_section(Some("problem"));
            s.set("agents", pr.agents.to_string())
                .set("p", pr.p.to_string())
                .set("d", pr.d.to_string())
                .set("f", pr.f.to_string())
                .set("g", pr.g.to_string())
                .set("coupling", pr.coupling.to_string())
                .set("seed", pr.seed.to_string())
                .set("scale", pr.scale.to_string())
                .set("start", match pr.start {
                    StartPoint::Zero => "zero",
                    StartPoint::Random => "random",
                });
            for (i, spec) in &pr.f_overrides {
                s.set(format!("f.{i}"), spec.to_string());
            }
            for (i, spec) in &pr.g_overrides {
                s.set(format!("g.{i}"), spec.to_string());
            }
            for (i, e) in &pr.explicit {
                if let Some(m) = &e.m {
                    s.set(format!("m.{i}"), inline_matrix(m));
                }
                if let Some(m) = &e.p_mat {
                    s.set(format!("pmat.{i}"), inline_matrix(m));
                }
                if let Some(m) = &e.r_mat {
                    s.set(format!("rmat.{i}"), inline_matrix(m));
                }
                if let Some(v) = &e.a {
                    s.set(format!("a.{i}"), inline_vector(v));
                }
                if let Some(v) = &e.b {
                    s.set(format!("b.{i}"), inline_vector(v));
                }
            }
        }
        {
            let mut s = ini.with_section(Some("graph"));
            s.set("x", self.graph.x.to_string());
            if let Some(y) = &self.graph.y {
                s.set("y", y.to_string());
            }
        }
        {
            let mut s = ini.with_section(Some("mixing"));
            s.set("x", self.mixing.x.to_string());
            if let Some(y) = &self.mixing.y {
                s.set("y", y.to_string());
            }
        }
        let a = &self.algorithm;
        ini.with_section(Some("algorithm"))
            .set("name", a.name.to_string())
            .set("tau", a.tau.to_string())
            .set("sigma", a.sigma.to_string())
            .set("safety", a.safety.to_string())
            .set("init", match a.init {
                InitVariant::Default => "default",
                InitVariant::Alt => "alt",
            })
            .set("allow_unsafe", a.allow_unsafe.to_string());
        let r = &self.run;
        ini.with_section(Some("run"))
            .set("max_iters", r.max_iters.to_string())
            .set("tol", r.tol.to_string())
            .set("trace_every", r.trace_every.to_string())
            .set("reference", r.reference.to_string());
        if !self.compare.is_empty() {
            let list: Vec<&str> = self.compare.iter().map(AlgorithmName::as_str).collect();
            ini.with_section(Some("compare")).set("algorithms", list.join(", "));
        }
        let mut buf = Vec::new();
        ini.write_to(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("ini output is UTF-8")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::parse(&text)?;
        // Relative graph files are resolved against the config's directory.
        let base = path.parent().map(std::path::Path::to_path_buf).unwrap_or_default();
        for spec in [Some(&mut cfg.graph.x), cfg.graph.y.as_mut()].into_iter().flatten() {
            if let TopologySpec::File(p) = spec {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    /// Network spec of the `y` block.
    pub fn y_topology(&self) -> &TopologySpec {
        self.graph.y.as_ref().unwrap_or(&self.graph.x)
    }

    pub fn y_mixing(&self) -> MixingSpec {
        self.mixing.y.unwrap_or(self.mixing.x)
    }

    /// Whether both blocks use the same network and weights.
    pub fn single_network(&self) -> bool {
        self.y_topology() == &self.graph.x && self.y_mixing() == self.mixing.x
    }
}
