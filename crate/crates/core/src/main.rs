use clap::{Parser, Subcommand};
use mukai_walls::charge::StabilityPoint;
use mukai_walls::config::{
    self, category_wall_json, parse_ns_class, parse_vector, rat_json, stability_wall_json,
    vector_json, IsoConfig, SurfaceConfig,
};
use mukai_walls::error::Error;
use mukai_walls::ratio::parse_rat;
use mukai_walls::star::{self, StarCondition};
use mukai_walls::surface::NSClass;
use mukai_walls::wallcross::{self, Side};
use mukai_walls::walls::{self, ParamBox, Region};
use serde_json::{json, Value};

/// Exact wall-and-chamber computations for Bridgeland stability parameters
/// on the Mukai lattice of an abelian or K3 surface.
#[derive(Parser)]
#[command(name = "mukai-walls", version, about)]
struct Cli {
    /// Surface configuration file (JSON)
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the surface configuration
    Surface {
        #[command(subcommand)]
        cmd: SurfaceCmd,
    },
    /// Enumerate walls
    Walls {
        #[command(subcommand)]
        cmd: WallsCmd,
    },
    /// Chamber membership
    Chamber {
        #[command(subcommand)]
        cmd: ChamberCmd,
    },
    /// Fourier-Mukai actions
    Fm {
        #[command(subcommand)]
        cmd: FmCmd,
    },
    /// Large-volume (star) conditions
    Star {
        #[command(subcommand)]
        cmd: StarCmd,
    },
    /// Wall-crossing sums
    Cross {
        #[command(subcommand)]
        cmd: CrossCmd,
    },
    /// SVG wall diagrams
    Plot {
        #[command(subcommand)]
        cmd: PlotCmd,
    },
}

#[derive(Subcommand)]
enum SurfaceCmd {
    /// Check the lattice invariants of the configured surface
    Validate,
}

#[derive(Subcommand)]
enum WallsCmd {
    /// Walls for categories at the configured beta (K3 only)
    Categories {
        /// override beta as comma-separated rationals
        #[arg(long)]
        beta: Option<String>,
        /// search a box instead of the fixed-beta line: "xlo,xhi,slo,shi"
        /// along eta_direction
        #[arg(long = "box", value_name = "XLO,XHI,SLO,SHI")]
        box_spec: Option<String>,
    },
    /// Stability wall candidates for a Mukai vector over an s-interval
    Stability {
        /// Mukai vector "r,c1...,s"
        #[arg(long)]
        v: String,
        #[arg(long, default_value = "1/100")]
        smin: String,
        #[arg(long, default_value = "100")]
        smax: String,
    },
}

#[derive(Subcommand)]
enum ChamberCmd {
    /// Chamber signature of a parameter point
    Locate {
        #[arg(long)]
        v: String,
        /// eta as comma-separated rationals (default 0)
        #[arg(long)]
        eta: Option<String>,
        #[arg(long)]
        s: String,
        #[arg(long, default_value = "1/100")]
        smin: String,
        #[arg(long, default_value = "100")]
        smax: String,
    },
}

#[derive(Subcommand)]
enum FmCmd {
    /// Apply the shifted transform to a Mukai vector
    Apply {
        /// isometry JSON file
        #[arg(long)]
        iso: String,
        #[arg(long)]
        v: String,
    },
    /// Transform a parameter point
    Param {
        #[arg(long)]
        iso: String,
        #[arg(long)]
        eta: Option<String>,
        #[arg(long)]
        s: String,
    },
}

#[derive(Subcommand)]
enum StarCmd {
    /// Decide a star condition for (v, s)
    Check {
        #[arg(long)]
        v: String,
        #[arg(long)]
        s: String,
        /// which condition: 1, 2 or 3
        #[arg(long)]
        which: u8,
        /// override the config beta as comma-separated rationals
        #[arg(long)]
        beta: Option<String>,
    },
}

#[derive(Subcommand)]
enum CrossCmd {
    /// Phase-aligned decompositions at a wall point
    Decompose {
        #[arg(long)]
        v: String,
        #[arg(long)]
        eta: Option<String>,
        #[arg(long)]
        s: String,
        #[arg(long, default_value = "minus")]
        side: String,
    },
    /// Weighted crossing sum from an oracle table
    Count {
        #[arg(long)]
        v: String,
        #[arg(long)]
        eta: Option<String>,
        #[arg(long)]
        s: String,
        #[arg(long, default_value = "minus")]
        side: String,
        /// oracle JSON file; omit for symbolic atoms
        #[arg(long)]
        oracle: Option<String>,
    },
}

#[derive(Subcommand)]
enum PlotCmd {
    /// Render walls meeting a slice to SVG
    Walls {
        /// Mukai vector for stability walls (optional)
        #[arg(long)]
        v: Option<String>,
        /// slice direction as comma-separated integers (default: config
        /// eta_direction)
        #[arg(long)]
        slice: Option<String>,
        #[arg(long)]
        out: String,
        #[arg(long, default_value = "1/100")]
        smin: String,
        #[arg(long, default_value = "4")]
        smax: String,
    },
}

fn load_config(path: &Option<String>) -> Result<SurfaceConfig, Error> {
    let path = path
        .as_ref()
        .ok_or_else(|| Error::Parse("--config <file> is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
    SurfaceConfig::from_json(&text)
}

fn run(cli: &Cli) -> Result<Value, Error> {
    match &cli.command {
        Command::Surface { cmd: SurfaceCmd::Validate } => {
            let cfg = load_config(&cli.config)?;
            let frame = cfg.frame()?;
            Ok(json!({
                "ok": true,
                "epsilon": frame.surface.epsilon(),
                "rho": frame.surface.rho,
                "H_sq": rat_json(&frame.surface.h2()),
                "b": rat_json(&frame.b),
                "r0": frame.r0.to_string(),
                "b0": frame.b0.to_string(),
                "d_min": rat_json(&frame.d_min),
                "delta": rat_json(&frame.delta),
            }))
        }
        Command::Walls { cmd } => match cmd {
            WallsCmd::Categories { beta, box_spec } => {
                let cfg = load_config(&cli.config)?;
                let surface = cfg.surface()?;
                let beta_class = match beta {
                    Some(text) => parse_ns_class(text, surface.rho)?,
                    None => cfg.beta_class(&surface)?,
                };
                let frame = mukai_walls::BetaFrame::new(surface.clone(), beta_class)?;
                let xi0 = cfg.eta_direction_class(&surface).ok();
                let walls = match box_spec {
                    None => walls::enumerate_r_beta(&frame)?,
                    Some(spec) => {
                        let xi = cfg.eta_direction_class(&surface)?;
                        let parts: Vec<&str> = spec.split(',').collect();
                        if parts.len() != 4 {
                            return Err(Error::Parse("--box needs xlo,xhi,slo,shi".into()));
                        }
                        let pbox = ParamBox {
                            eta_basis: vec![xi],
                            eta_ranges: vec![(parse_rat(parts[0])?, parse_rat(parts[1])?)],
                            s_range: (parse_rat(parts[2])?, parse_rat(parts[3])?),
                        };
                        walls::category_walls_in_box(&frame, &pbox)?
                    }
                };
                let thresholds = if box_spec.is_none() {
                    Some(walls::category_thresholds(&frame)?)
                } else {
                    None
                };
                let mut arr = Vec::new();
                for w in &walls {
                    let chart = xi0
                        .as_ref()
                        .and_then(|xi| config::slice_chart(&w.geometry, xi, &surface));
                    arr.push(category_wall_json(w, chart.as_ref()));
                }
                let region = match box_spec {
                    None => json!({ "kind": "fixed_beta_line" }),
                    Some(spec) => json!({ "kind": "box", "spec": spec }),
                };
                let mut out = json!({ "walls": arr, "region": region });
                if let Some(t) = thresholds {
                    out["thresholds_half_omega_sq"] =
                        Value::Array(t.iter().map(rat_json).collect());
                }
                Ok(out)
            }
            WallsCmd::Stability { v, smin, smax } => {
                let cfg = load_config(&cli.config)?;
                let frame = cfg.frame()?;
                let vec = parse_vector(v, frame.surface.rho)?;
                let region =
                    Region::FixedBetaInterval { s_lo: parse_rat(smin)?, s_hi: parse_rat(smax)? };
                let res = walls::stability_wall_candidates(&vec, &frame, &region)?;
                Ok(json!({
                    "walls": res.walls.iter().map(stability_wall_json).collect::<Vec<_>>(),
                    "boundary_dropped": res.boundary_dropped.iter().map(vector_json).collect::<Vec<_>>(),
                    "full_region": res.full_region.iter().map(vector_json).collect::<Vec<_>>(),
                    "region": { "kind": "fixed_beta_interval", "s_min": rat_json(&parse_rat(smin)?), "s_max": rat_json(&parse_rat(smax)?) },
                }))
            }
        },
        Command::Chamber { cmd: ChamberCmd::Locate { v, eta, s, smin, smax } } => {
            let cfg = load_config(&cli.config)?;
            let frame = cfg.frame()?;
            let vec = parse_vector(v, frame.surface.rho)?;
            let eta_class = match eta {
                Some(text) => parse_ns_class(text, frame.surface.rho)?,
                None => frame.eta_beta.clone(),
            };
            let p = StabilityPoint::new(&frame, eta_class, parse_rat(s)?)?;
            let region =
                Region::FixedBetaInterval { s_lo: parse_rat(smin)?, s_hi: parse_rat(smax)? };
            let sig = walls::locate_chamber(&vec, &p, &frame, &region)?;
            Ok(json!({
                "boundary": sig.boundary,
                "signature": sig.entries.iter()
                    .map(|(id, s)| json!({ "wall": id, "sign": s }))
                    .collect::<Vec<_>>(),
            }))
        }
        Command::Fm { cmd } => match cmd {
            FmCmd::Apply { iso, v } => {
                let cfg = load_config(&cli.config)?;
                let surface = cfg.surface()?;
                let iso_text = std::fs::read_to_string(iso)
                    .map_err(|e| Error::Parse(format!("cannot read {iso}: {e}")))?;
                let iso = IsoConfig::from_json(&iso_text)?.build(&surface)?;
                let vec = parse_vector(v, surface.rho)?;
                let img = mukai_walls::fm::fm_image_shift(&iso, &vec);
                let frame = mukai_walls::BetaFrame::new(surface.clone(), iso.beta_prime.clone())?;
                let dec = frame.decompose(&img);
                Ok(json!({
                    "image": vector_json(&img),
                    "target_frame": {
                        "r": rat_json(&dec.r),
                        "a": rat_json(&dec.a),
                        "d": rat_json(&dec.d),
                        "D": config::ns_json(&dec.big_d),
                    }
                }))
            }
            FmCmd::Param { iso, eta, s } => {
                let cfg = load_config(&cli.config)?;
                let surface = cfg.surface()?;
                let iso_text = std::fs::read_to_string(iso)
                    .map_err(|e| Error::Parse(format!("cannot read {iso}: {e}")))?;
                let iso = IsoConfig::from_json(&iso_text)?.build(&surface)?;
                let frame = mukai_walls::BetaFrame::new(surface.clone(), iso.beta.clone())?;
                let eta_class = match eta {
                    Some(text) => parse_ns_class(text, surface.rho)?,
                    None => NSClass::zero(surface.rho),
                };
                let p = StabilityPoint::new(&frame, eta_class, parse_rat(s)?)?;
                let q = mukai_walls::fm::param_transform(&iso, &p, &frame)?;
                Ok(json!({
                    "eta": config::ns_json(&q.eta),
                    "s": rat_json(&q.s),
                    "nef_assertion": iso.nef_assertion,
                }))
            }
        },
        Command::Star { cmd: StarCmd::Check { v, s, which, beta } } => {
            let cfg = load_config(&cli.config)?;
            let frame = match beta {
                Some(text) => {
                    let surface = cfg.surface()?;
                    let beta_class = parse_ns_class(text, surface.rho)?;
                    mukai_walls::BetaFrame::new(surface, beta_class)?
                }
                None => cfg.frame()?,
            };
            let vec = parse_vector(v, frame.surface.rho)?;
            let sv = parse_rat(s)?;
            let rep = match which {
                1 => star::check_star1(&vec, &frame, &sv)?,
                2 => star::check_star2(&vec, &frame, &sv)?,
                3 => star::check_star3(&vec, &frame, &sv)?,
                _ => return Err(Error::Parse("--which must be 1, 2 or 3".into())),
            };
            let name = match rep.condition {
                StarCondition::Star1 => "star1",
                StarCondition::Star2 => "star2",
                StarCondition::Star3 => "star3",
            };
            Ok(json!({
                "condition": name,
                "holds": rep.holds,
                "lattice_level_only": rep.lattice_level_only,
                "threshold_s": rep.threshold_s.as_ref().map(rat_json),
                "witnesses": rep.witnesses.iter().map(|w| json!({
                    "r1": w.r1.to_string(),
                    "d1": rat_json(&w.d1),
                    "a1": rat_json(&w.a1),
                    "d1_sq_slack": rat_json(&w.d1_sq_slack),
                })).collect::<Vec<_>>(),
            }))
        }
        Command::Cross { cmd } => match cmd {
            CrossCmd::Decompose { v, eta, s, side } => {
                let cfg = load_config(&cli.config)?;
                let frame = cfg.frame()?;
                let vec = parse_vector(v, frame.surface.rho)?;
                let eta_class = match eta {
                    Some(text) => parse_ns_class(text, frame.surface.rho)?,
                    None => frame.eta_beta.clone(),
                };
                let p = StabilityPoint::new(&frame, eta_class, parse_rat(s)?)?;
                let sets = wallcross::decompositions_on_wall(&vec, &p, &frame)?;
                let side = parse_side(side)?;
                let tuples = match side {
                    Side::Minus => &sets.minus,
                    Side::Plus => &sets.plus,
                };
                Ok(json!({
                    "tuples": tuples.iter().map(|d| Value::Array(
                        d.parts.iter().map(vector_json).collect()
                    )).collect::<Vec<_>>(),
                    "s_equivalence": sets.s_equivalence.iter().map(|m| Value::Array(
                        m.iter().map(vector_json).collect()
                    )).collect::<Vec<_>>(),
                }))
            }
            CrossCmd::Count { v, eta, s, side, oracle } => {
                let cfg = load_config(&cli.config)?;
                let frame = cfg.frame()?;
                let vec = parse_vector(v, frame.surface.rho)?;
                let eta_class = match eta {
                    Some(text) => parse_ns_class(text, frame.surface.rho)?,
                    None => frame.eta_beta.clone(),
                };
                let p = StabilityPoint::new(&frame, eta_class, parse_rat(s)?)?;
                let oracle = match oracle {
                    Some(path) => {
                        let text = std::fs::read_to_string(path)
                            .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
                        config::oracle_from_json(&text, frame.surface.rho, false)?
                    }
                    None => wallcross::CountOracle::symbolic(),
                };
                let side = parse_side(side)?;
                let sets = wallcross::decompositions_on_wall(&vec, &p, &frame)?;
                let tuples = match side {
                    Side::Minus => &sets.minus,
                    Side::Plus => &sets.plus,
                };
                let value = wallcross::wall_value(&vec, &oracle, &frame, tuples)?;
                Ok(json!({
                    "side": format!("{side:?}").to_lowercase(),
                    "value": value.to_string(),
                    "numeric": value.numeric_value().map(|p| config::poly_json(&p)),
                }))
            }
        },
        Command::Plot { cmd: PlotCmd::Walls { v, slice, out, smin, smax } } => {
            let cfg = load_config(&cli.config)?;
            let frame = cfg.frame()?;
            let surface = frame.surface.clone();
            let xi0 = match slice {
                Some(text) => parse_ns_class(text, surface.rho)?,
                None => cfg.eta_direction_class(&surface)?,
            };
            // walls meeting the plotted window x in [-1/2, 3/2] along xi0
            let pbox = ParamBox {
                eta_basis: vec![xi0.clone()],
                eta_ranges: vec![(parse_rat("-1/2")?, parse_rat("3/2")?)],
                s_range: (parse_rat(smin)?, parse_rat(smax)?),
            };
            let cats = if surface.epsilon() == 1 {
                walls::category_walls_in_box(&frame, &pbox)?
            } else {
                Vec::new()
            };
            let stabs = match v {
                Some(text) => {
                    let vec = parse_vector(text, surface.rho)?;
                    walls::stability_wall_candidates(&vec, &frame, &Region::Box(pbox))?.walls
                }
                None => Vec::new(),
            };
            let t_max = {
                use num_traits::ToPrimitive;
                let s_hi = parse_rat(smax)?;
                (s_hi / surface.h2()).to_f64().unwrap_or(1.0).sqrt().max(0.1)
            };
            let svg = mukai_walls::svg::render_walls(&surface, &xi0, &cats, &stabs, (-0.5, 1.5), t_max);
            std::fs::write(out, &svg)
                .map_err(|e| Error::Parse(format!("cannot write {out}: {e}")))?;
            Ok(json!({ "written": out, "category_walls": cats.len(), "stability_walls": stabs.len() }))
        }
    }
}

fn parse_side(s: &str) -> Result<Side, Error> {
    match s {
        "minus" => Ok(Side::Minus),
        "plus" => Ok(Side::Plus),
        other => Err(Error::Parse(format!("side must be minus or plus, got {other}"))),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(value) => {
            use std::io::Write;
            let text = serde_json::to_string_pretty(&value).expect("serializable output");
            let mut out = std::io::stdout().lock();
            // a closed pipe (e.g. | head) is not an error worth reporting
            if writeln!(out, "{text}").is_err() {
                std::process::exit(0);
            }
        }
        Err(e) => {
            let payload = json!({ "error": e.to_string() });
            eprintln!("{payload}");
            std::process::exit(e.exit_code());
        }
    }
}
