//! Run configuration: a flat key=value file merged with command-line
//! overrides.  Unknown keys are rejected so a typo cannot silently fall
//! back to a default.

use std::path::PathBuf;

use zpd_core::arith::ModularTwist;
use zpd_core::bump::Bump;
use zpd_core::sums::Twist;
use zpd_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    ZerosFind,
    ZerosImport,
    VerifyExplicitFormula,
    VerifyStationaryPhase,
    VerifyTheorem41,
    VerifySuperbound,
    VerifyCharacters,
    VerifyLemmas,
    Fit,
}

impl Command {
    pub fn parse(s: &str) -> Result<Command> {
        Ok(match s {
            "zeros-find" => Command::ZerosFind,
            "zeros-import" => Command::ZerosImport,
            "verify-explicit-formula" => Command::VerifyExplicitFormula,
            "verify-stationary-phase" => Command::VerifyStationaryPhase,
            "verify-theorem41" => Command::VerifyTheorem41,
            "verify-superbound" => Command::VerifySuperbound,
            "verify-characters" => Command::VerifyCharacters,
            "verify-lemmas" => Command::VerifyLemmas,
            "fit" => Command::Fit,
            other => {
                return Err(Error::Precondition(format!("unknown command `{other}`")))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::ZerosFind => "zeros-find",
            Command::ZerosImport => "zeros-import",
            Command::VerifyExplicitFormula => "verify-explicit-formula",
            Command::VerifyStationaryPhase => "verify-stationary-phase",
            Command::VerifyTheorem41 => "verify-theorem41",
            Command::VerifySuperbound => "verify-superbound",
            Command::VerifyCharacters => "verify-characters",
            Command::VerifyLemmas => "verify-lemmas",
            Command::Fit => "fit",
        }
    }
}

/// Everything a run needs, after the config file and the flags have been
/// merged.  Flags win.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub twist: Twist,
    pub bump: Bump,
    pub x_grid: Vec<f64>,
    pub zeros: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub height: Option<f64>,
    pub tol: f64,
    pub out: PathBuf,
    pub workers: usize,
}

/// Raw option bag prior to validation; every field optional so that the
/// file layer and the flag layer can be merged field by field.
#[derive(Debug, Default, Clone)]
pub struct Overlay {
    pub command: Option<String>,
    pub xi: Option<String>,
    pub bump: Option<String>,
    pub xgrid: Option<String>,
    pub zeros: Option<String>,
    pub data: Option<String>,
    pub height: Option<String>,
    pub tol: Option<String>,
    pub out: Option<String>,
    pub workers: Option<String>,
}

impl Overlay {
    /// Applies `over` on top of `self`, field by field.
    pub fn merge(mut self, over: Overlay) -> Overlay {
        macro_rules! take {
            ($f:ident) => {
                if over.$f.is_some() {
                    self.$f = over.$f;
                }
            };
        }
        take!(command);
        take!(xi);
        take!(bump);
        take!(xgrid);
        take!(zeros);
        take!(data);
        take!(height);
        take!(tol);
        take!(out);
        take!(workers);
        self
    }
}

/// Parses a `key = value` file.  `#` starts a comment, blank lines are
/// skipped, keys must be from the known set.
pub fn parse_config_file(text: &str) -> Result<Overlay> {
    let mut o = Overlay::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected key=value, got `{line}`"),
            });
        };
        let key = key.trim();
        let value = value.trim().to_string();
        if value.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("empty value for `{key}`"),
            });
        }
        let slot = match key {
            "command" => &mut o.command,
            "xi" => &mut o.xi,
            "bump" => &mut o.bump,
            "xgrid" => &mut o.xgrid,
            "zeros" => &mut o.zeros,
            "data" => &mut o.data,
            "height" => &mut o.height,
            "tol" => &mut o.tol,
            "out" => &mut o.out,
            "workers" => &mut o.workers,
            other => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("unknown key `{other}`"),
                })
            }
        };
        if slot.is_some() {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("duplicate key `{key}`"),
            });
        }
        *slot = Some(value);
    }
    Ok(o)
}

/// `m/q` with integer parts becomes an exact rational twist; anything else
/// that parses as a positive real becomes an irrational-path twist.
pub fn parse_xi(s: &str) -> Result<Twist> {
    if let Some((m, q)) = s.split_once('/') {
        let m: u64 = m.trim().parse().map_err(|_| bad_value("xi", s))?;
        let q: u64 = q.trim().parse().map_err(|_| bad_value("xi", s))?;
        return Ok(Twist::from(ModularTwist::new(m, q)?));
    }
    let x: f64 = s.trim().parse().map_err(|_| bad_value("xi", s))?;
    if !x.is_finite() || x < 0.0 {
        return Err(bad_value("xi", s));
    }
    Ok(Twist::Real(x))
}

/// `a,b` is the canonical window on `[a,b]`; `a,b,c,d` is the plateau
/// window flat on `[c,d]` inside `[a,b]`.
pub fn parse_bump(s: &str) -> Result<Bump> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad_value("bump", s)))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [a, b] => Bump::canonical(*a, *b),
        [a, b, c, d] => Bump::plateau(*a, *c, *d, *b),
        _ => Err(bad_value("bump", s)),
    }
}

pub fn parse_xgrid(s: &str) -> Result<Vec<f64>> {
    let xs: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad_value("xgrid", s)))
        .collect::<Result<_>>()?;
    if xs.is_empty() {
        return Err(bad_value("xgrid", s));
    }
    for w in xs.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Precondition(format!(
                "xgrid must be strictly increasing, got {s}"
            )));
        }
    }
    Ok(xs)
}

fn bad_value(key: &str, value: &str) -> Error {
    Error::Precondition(format!("cannot parse {key} value `{value}`"))
}

/// Validates the merged overlay and fills in defaults.
pub fn finalize(o: Overlay) -> Result<RunConfig> {
    let Some(cmd) = o.command.as_deref() else {
        return Err(Error::Precondition(
            "no command given (flag --command or config key `command`)".into(),
        ));
    };
    let command = Command::parse(cmd)?;
    let twist = parse_xi(o.xi.as_deref().unwrap_or("1/3"))?;
    let bump = parse_bump(o.bump.as_deref().unwrap_or("1,2"))?;
    let default_grid = match command {
        Command::VerifyTheorem41 => "50,100,200,400,800",
        // half-decade steps; the X^1 budget only emerges past X ~ 100
        Command::VerifySuperbound => "100,316.23,1000,3162.3",
        Command::VerifyStationaryPhase => "100,200,400",
        Command::VerifyLemmas => "20,40,80,160",
        _ => "20,40",
    };
    let x_grid = parse_xgrid(o.xgrid.as_deref().unwrap_or(default_grid))?;
    let zeros = o.zeros.map(PathBuf::from);
    let data = o.data.map(PathBuf::from);
    let height = match o.height.as_deref() {
        None => None,
        Some(h) => {
            let h: f64 = h.parse().map_err(|_| bad_value("height", h))?;
            if !h.is_finite() || h < 0.0 {
                return Err(bad_value("height", &format!("{h}")));
            }
            Some(h)
        }
    };
    let tol = match o.tol.as_deref() {
        None => 1e-6,
        Some(t) => {
            let t: f64 = t.parse().map_err(|_| bad_value("tol", t))?;
            if !(t > 0.0) || !t.is_finite() {
                return Err(bad_value("tol", &format!("{t}")));
            }
            t
        }
    };
    let out = PathBuf::from(o.out.as_deref().unwrap_or("out"));
    let workers = match o.workers.as_deref() {
        None => 1,
        Some(w) => {
            let w: usize = w.parse().map_err(|_| bad_value("workers", w))?;
            if w == 0 {
                return Err(Error::Precondition(
                    "workers must be at least 1".into(),
                ));
            }
            w
        }
    };
    Ok(RunConfig {
        command,
        twist,
        bump,
        x_grid,
        zeros,
        data,
        height,
        tol,
        out,
        workers,
    })
}
