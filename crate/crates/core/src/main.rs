use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use imgtn::certify::{
    certify_assumption1, certify_assumption2, corner_squares, random_baseline_profile, region_rank_profile,
    scaling_experiment, verify_lemma1, Quantity, ScalingReport, POLY_SLOPE_THRESHOLD,
};
use imgtn::ht::{diagonalize, ht_from_family, load_ht, save_ht, theorem1_size, tt_ht_cross_check, Form, HtNetwork};
use imgtn::images::{
    load_family, random_images, write_family, BinaryImage, Generator, ImageFamily, OutlineParams, Region,
};
use imgtn::report::{Cell, Report, Table};
use imgtn::tt::{block_partition_bound, prefix_ranks, save_tt, tt_from_family};
use imgtn::{DEFAULT_TOL, EVAL_TOL};

#[derive(Parser)]
#[command(name = "imgtn", version, about = "Exact tensor-network representations of binary-image families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads; defaults to all cores. Never changes reported numbers.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Report file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add wall-clock time to the report (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated family file.
    Gen(FamilyArgs),
    /// Row-configuration counts, fixed-row ranks and the row-cut inequality.
    Certify {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Also profile ranks over corner squares.
        #[arg(long)]
        regions: bool,
    },
    /// Build, verify and save a tensor train.
    Tt {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        check: CheckArgs,
        /// Network output file.
        #[arg(long)]
        net: Option<PathBuf>,
        /// Also compute the block-partition bound for every cut.
        #[arg(long)]
        bounds: bool,
    },
    /// Build, verify and save a hierarchical Tucker network.
    Ht {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        check: CheckArgs,
        #[arg(long)]
        net: Option<PathBuf>,
    },
    /// Convert a network to diagonal form and compare evaluations.
    Diag {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        check: CheckArgs,
        /// Generalized network file to convert instead of building one.
        #[arg(long)]
        load: Option<PathBuf>,
        #[arg(long)]
        net: Option<PathBuf>,
    },
    /// Measure a quantity over several sizes and fit its growth.
    Scale {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Comma-separated sizes, ascending.
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        /// One of: members, max-row-configs, max-fixed-row-rank, max-row-cut-rank,
        /// middle-cut-rank, max-bond-dim, max-layer-channels, layer-channels.
        #[arg(long, default_value = "max-row-configs")]
        quantity: String,
        #[arg(long, default_value_t = POLY_SLOPE_THRESHOLD)]
        threshold: f64,
        /// Add a member-count-matched random family column.
        #[arg(long)]
        contrast: bool,
    },
    /// Rank of random families at one cut, against its cap.
    Baseline {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Number of seeds, starting at --seed.
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// rows:I, pixels:K or rect:TOP,LEFT,HEIGHT,WIDTH; default the middle pixel cut.
        #[arg(long)]
        cut: Option<String>,
    },
    /// Compare tensor-train and hierarchical-Tucker evaluations.
    Crosscheck {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Family file, or a generator: rect, bars, stacked, random.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Member count for random families.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    min_side: usize,
    #[arg(long, default_value_t = 1)]
    linewidth: usize,
    #[arg(long, default_value_t = 2)]
    min_len: usize,
    /// Relative singular-value cutoff.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Clone)]
struct CheckArgs {
    /// Random images probed besides the members.
    #[arg(long, default_value_t = 10_000)]
    probes: usize,
    #[arg(long, default_value_t = 1)]
    probe_seed: u64,
}

enum Failure {
    /// Bad arguments or unreadable input: exit 2.
    Input(String),
    /// A check did not hold: exit 1.
    Verification(String),
}

impl From<imgtn::error::Error> for Failure {
    fn from(e: imgtn::error::Error) -> Self {
        use imgtn::error::Error as E;
        match e {
            E::SvdFailed { .. } | E::RankMismatch { .. } => Failure::Verification(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

const GENERATORS: [&str; 4] = ["rect", "bars", "stacked", "random"];

impl FamilyArgs {
    fn generator(&self) -> CliResult<Generator> {
        let name = self.family.as_deref().ok_or_else(|| Failure::Input("--family is required".into()))?;
        Ok(match name {
            "rect" => Generator::Rect(OutlineParams {
                min_side: self.min_side,
                linewidth: self.linewidth,
            }),
            "bars" => Generator::Bars { min_len: self.min_len },
            "stacked" => Generator::Stacked {
                min_side: self.min_side,
            },
            "random" => Generator::Random {
                m: self.m.ok_or_else(|| Failure::Input("--m is required for random families".into()))?,
                seed: self.seed,
            },
            other => {
                return Err(Failure::Input(format!(
                    "unknown family {other:?}; expected one of {}",
                    GENERATORS.join(", ")
                )))
            }
        })
    }

    fn size(&self) -> CliResult<usize> {
        self.n.ok_or_else(|| Failure::Input("--n is required".into()))
    }

    /// A generator name builds the family; anything else is read as a file.
    fn load(&self) -> CliResult<ImageFamily> {
        let name = self.family.as_deref().ok_or_else(|| Failure::Input("--family is required".into()))?;
        if GENERATORS.contains(&name) {
            Ok(self.generator()?.generate(self.size()?)?)
        } else if Path::new(name).is_file() {
            Ok(load_family(Path::new(name))?)
        } else {
            Err(Failure::Input(format!(
                "--family {name:?} is neither a generator ({}) nor a readable file",
                GENERATORS.join(", ")
            )))
        }
    }

    fn echo(&self, config: &mut Map<String, Value>) {
        if let Some(f) = &self.family {
            config.insert("family".into(), f.clone().into());
            if GENERATORS.contains(&f.as_str()) {
                config.insert("n".into(), self.n.into());
                config.insert("seed".into(), self.seed.into());
                match f.as_str() {
                    "rect" => {
                        config.insert("min_side".into(), self.min_side.into());
                        config.insert("linewidth".into(), self.linewidth.into());
                    }
                    "stacked" => {
                        config.insert("min_side".into(), self.min_side.into());
                    }
                    "bars" => {
                        config.insert("min_len".into(), self.min_len.into());
                    }
                    _ => {
                        config.insert("m".into(), self.m.into());
                    }
                }
            }
        }
        config.insert("tol".into(), self.tol.into());
    }
}

impl CheckArgs {
    fn echo(&self, config: &mut Map<String, Value>) {
        config.insert("probes".into(), self.probes.into());
        config.insert("probe_seed".into(), self.probe_seed.into());
    }
}

fn describe(report: &mut Report, family: &ImageFamily) {
    let meta = family.meta();
    let seed = meta.seed.map_or("none".to_string(), |s| s.to_string());
    report.note(format!(
        "family {} n={} seed={} members={}",
        meta.name,
        family.side(),
        seed,
        family.len()
    ));
}

fn bits_string(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

/// Largest `|eval - f|` over members and random probes.
fn max_deviation(
    family: &ImageFamily,
    probes: &[BinaryImage],
    eval: impl Fn(&BinaryImage) -> imgtn::error::Result<f64>,
) -> CliResult<(f64, f64)> {
    let mut members = 0.0f64;
    for m in family.members() {
        members = members.max((eval(m)? - 1.0).abs());
    }
    let mut others = 0.0f64;
    for p in probes {
        others = others.max((eval(p)? - family.indicator(p)).abs());
    }
    Ok((members, others))
}

fn exactness_table(report: &mut Report, counts: (usize, usize), members: f64, others: f64) -> f64 {
    let mut t = Table::new("exactness", &["set", "count", "max_deviation"]);
    t.push(vec!["members".into(), counts.0.into(), members.into()]);
    t.push(vec!["probes".into(), counts.1.into(), others.into()]);
    report.tables.push(t);
    members.max(others)
}

fn cmd_gen(fam: &FamilyArgs, out: Option<&Path>) -> CliResult<()> {
    let family = fam.generator()?.generate(fam.size()?)?;
    match out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            write_family(&family, std::io::BufWriter::new(file))?;
            println!("{} members written to {}", family.len(), path.display());
        }
        None => {
            write_family(&family, std::io::stdout().lock())?;
            eprintln!("{} members", family.len());
        }
    }
    Ok(())
}

fn cmd_certify(fam: &FamilyArgs, regions: bool, report: &mut Report) -> CliResult<()> {
    let family = fam.load()?;
    fam.echo(&mut report.config);
    report.config.insert("regions".into(), regions.into());
    describe(report, &family);

    let a1 = certify_assumption1(&family);
    let mut t = Table::new("row_configs", &["i", "config_count"]);
    for &(i, c) in &a1.counts {
        t.push(vec![i.into(), c.into()]);
    }
    report.tables.push(t);

    let a2 = certify_assumption2(&family)?;
    let mut t = Table::new("fixed_row_ranks", &["i", "y", "rank"]);
    for r in &a2.ranks {
        t.push(vec![r.row.into(), bits_string(&r.config).into(), r.rank.into()]);
    }
    report.tables.push(t);

    let l1 = verify_lemma1(&family)?;
    let mut t = Table::new("row_cut_bound", &["i", "rank_Fi", "bound", "ok"]);
    for r in &l1.rows {
        t.push(vec![r.row.into(), r.rank.into(), r.bound.into(), r.holds.into()]);
    }
    report.tables.push(t);
    report.note(format!("max_row_configs={}", a1.max_count));
    report.note(format!("max_fixed_row_rank={}", a2.max_rank));

    if regions {
        let profile = region_rank_profile(&family, &corner_squares(family.side()))?;
        let mut t = Table::new("region_ranks", &["top", "left", "height", "width", "size", "boundary", "rank"]);
        for p in &profile.points {
            if let imgtn::images::RegionKind::Rectangle { top, left, height, width } = p.region.kind {
                t.push(vec![
                    top.into(),
                    left.into(),
                    height.into(),
                    width.into(),
                    p.size.into(),
                    p.boundary.into(),
                    p.rank.into(),
                ]);
            }
        }
        report.tables.push(t);
        let mut t = Table::new("region_fits", &["against", "slope", "intercept"]);
        for (name, fit) in [("boundary", profile.vs_boundary), ("size", profile.vs_size)] {
            if let Some(f) = fit {
                t.push(vec![name.into(), f.slope.into(), f.intercept.into()]);
            }
        }
        report.tables.push(t);
    }

    if !l1.all_hold {
        return Err(Failure::Verification("row-cut rank exceeds the fixed-row bound".into()));
    }
    Ok(())
}

fn cmd_tt(fam: &FamilyArgs, check: &CheckArgs, net: Option<&Path>, bounds: bool, report: &mut Report) -> CliResult<()> {
    let family = fam.load()?;
    fam.echo(&mut report.config);
    check.echo(&mut report.config);
    report.config.insert("bounds".into(), bounds.into());
    describe(report, &family);

    let tt = tt_from_family(&family, fam.tol)?;
    let n = family.side();
    let ranks = prefix_ranks(&family)?;
    let bonds = tt.bond_dims();
    let columns: &[&str] = if bounds {
        &["k", "bond", "exact_rank", "block_bound"]
    } else {
        &["k", "bond", "exact_rank"]
    };
    let mut t = Table::new("bonds", columns);
    let mut minimal = true;
    for k in 1..n * n {
        minimal &= bonds[k] == ranks[k - 1].max(1);
        let mut row: Vec<Cell> = vec![k.into(), bonds[k].into(), ranks[k - 1].into()];
        if bounds {
            row.push(block_partition_bound(&family, k)?.into());
        }
        t.push(row);
    }
    report.tables.push(t);
    report.note(format!("max_bond={}", tt.max_bond()));
    report.note(format!("parameters={}", tt.parameter_count()));

    let probes = random_images(n, check.probes, check.probe_seed);
    let (members, others) = max_deviation(&family, &probes, |img| tt.eval(img))?;
    let worst = exactness_table(report, (family.len(), check.probes), members, others);
    if let Some(path) = net {
        save_tt(&tt, path)?;
    }
    if worst >= EVAL_TOL {
        return Err(Failure::Verification(format!("exactness check failed: max deviation {worst}")));
    }
    if !minimal {
        return Err(Failure::Verification("bond dimensions differ from the exact prefix ranks".into()));
    }
    Ok(())
}

fn layer_table(net: &HtNetwork, exact: Option<&[usize]>) -> Table {
    let tree = net.tree();
    let mut columns = vec!["layer", "channels", "min_node_rank", "max_node_rank", "height", "width", "boundary"];
    if exact.is_some() {
        columns.push("exact_max_rank");
    }
    let mut t = Table::new("layers", &columns);
    for i in 1..=tree.layer_count() {
        let ranks = &net.node_ranks()[i - 1];
        let (h, w) = tree.block(i);
        let mut row: Vec<Cell> = vec![
            i.into(),
            net.channels()[i - 1].into(),
            ranks.iter().copied().min().unwrap_or(0).into(),
            ranks.iter().copied().max().unwrap_or(0).into(),
            h.into(),
            w.into(),
            (2 * (h + w)).into(),
        ];
        if let Some(e) = exact {
            row.push(e[i - 1].into());
        }
        t.push(row);
    }
    t
}

fn cmd_ht(fam: &FamilyArgs, check: &CheckArgs, net_out: Option<&Path>, report: &mut Report) -> CliResult<()> {
    let family = fam.load()?;
    fam.echo(&mut report.config);
    check.echo(&mut report.config);
    describe(report, &family);

    let size = theorem1_size(&family, fam.tol)?;
    let net = ht_from_family(&family, fam.tol)?;
    if net.is_padded() {
        report.note(format!(
            "padded from n={} to n={} with white pixels",
            net.input_side(),
            net.side()
        ));
    }
    let exact: Vec<usize> = size.layers.iter().map(|r| r.exact_max_rank).collect();
    report.tables.push(layer_table(&net, Some(&exact)));
    report.note(format!("max_channels={}", net.max_channels()));
    report.note(format!("parameters={}", net.parameter_count()));
    report.note(format!("structure_ok={}", size.structure.all_hold()));
    if let Some(f) = size.fit {
        report.note(format!("log2_channels_vs_layer slope={} intercept={}", f.slope, f.intercept));
    }

    let probes = random_images(family.side(), check.probes, check.probe_seed);
    let (members, others) = max_deviation(&family, &probes, |img| net.eval(img))?;
    let worst = exactness_table(report, (family.len(), check.probes), members, others);
    if let Some(path) = net_out {
        save_ht(&net, path)?;
    }
    if worst >= EVAL_TOL {
        return Err(Failure::Verification(format!("exactness check failed: max deviation {worst}")));
    }
    if !size.channels_match_ranks || !size.structure.all_hold() {
        return Err(Failure::Verification("channel counts or tree structure check failed".into()));
    }
    Ok(())
}

fn cmd_diag(
    fam: &FamilyArgs,
    check: &CheckArgs,
    load: Option<&Path>,
    net_out: Option<&Path>,
    report: &mut Report,
) -> CliResult<()> {
    check.echo(&mut report.config);
    let (net, family) = match load {
        Some(path) => {
            report.config.insert("load".into(), path.display().to_string().into());
            report.config.insert("tol".into(), fam.tol.into());
            (load_ht(path)?, None)
        }
        None => {
            let family = fam.load()?;
            fam.echo(&mut report.config);
            describe(report, &family);
            (ht_from_family(&family, fam.tol)?, Some(family))
        }
    };
    if net.form() != Form::Generalized {
        return Err(Failure::Input("network is already in diagonal form".into()));
    }
    let diag = diagonalize(&net)?;
    let layers = net.channels().len();
    let mut t = Table::new("layers", &["layer", "channels", "diag_channels", "squared"]);
    let mut squared_ok = true;
    for (idx, (&l, &d)) in net.channels().iter().zip(diag.channels()).enumerate() {
        let expected = if idx + 1 == layers { l } else { l * l };
        squared_ok &= d == expected;
        t.push(vec![(idx + 1).into(), l.into(), d.into(), (d == expected).into()]);
    }
    report.tables.push(t);
    report.note(format!("parameters={} diag_parameters={}", net.parameter_count(), diag.parameter_count()));

    let mut images = random_images(net.input_side(), check.probes, check.probe_seed);
    if let Some(f) = &family {
        images.extend(f.members().iter().cloned());
    }
    let mut worst = 0.0f64;
    for img in &images {
        worst = worst.max((net.eval(img)? - diag.eval(img)?).abs());
    }
    let mut t = Table::new("agreement", &["images", "max_deviation"]);
    t.push(vec![images.len().into(), worst.into()]);
    report.tables.push(t);
    if let Some(path) = net_out {
        save_ht(&diag, path)?;
    }
    if worst >= EVAL_TOL || !squared_ok {
        return Err(Failure::Verification(format!(
            "diagonal form disagrees: max deviation {worst}, squared widths {squared_ok}"
        )));
    }
    Ok(())
}

fn fits_table(reports: &[&ScalingReport]) -> Table {
    let mut t = Table::new("fits", &["series", "slope", "intercept", "threshold", "within"]);
    for r in reports {
        let (slope, intercept) = r.fit.map_or((Cell::from("none"), Cell::from("none")), |f| (f.slope.into(), f.intercept.into()));
        t.push(vec![r.generator.clone().into(), slope, intercept, r.threshold.into(), r.within_threshold.into()]);
    }
    t
}

fn cmd_scale(
    fam: &FamilyArgs,
    ns: &[usize],
    quantity: &str,
    threshold: f64,
    contrast: bool,
    report: &mut Report,
) -> CliResult<()> {
    fam.echo(&mut report.config);
    report.config.remove("n");
    report.config.insert("ns".into(), ns.to_vec().into());
    report.config.insert("quantity".into(), quantity.into());
    report.config.insert("threshold".into(), threshold.into());
    report.config.insert("contrast".into(), contrast.into());
    let generator = fam.generator()?;

    let needs_pow2 = quantity == "layer-channels" || quantity == Quantity::MaxLayerChannels.name();
    if needs_pow2 {
        if let Some(bad) = ns.iter().find(|n| !n.is_power_of_two() || **n < 2) {
            return Err(Failure::Input(format!("layer quantities need powers of two, got n={bad}")));
        }
    }

    if quantity == "layer-channels" {
        let mut t = Table::new("layers", &["n", "layer", "channels", "exact_max_rank", "boundary"]);
        let mut f = Table::new("fits", &["n", "slope", "intercept"]);
        for &n in ns {
            let size = theorem1_size(&generator.generate(n)?, fam.tol)?;
            for r in &size.layers {
                t.push(vec![n.into(), r.layer.into(), r.channels.into(), r.exact_max_rank.into(), r.boundary.into()]);
            }
            if let Some(fit) = size.fit {
                f.push(vec![n.into(), fit.slope.into(), fit.intercept.into()]);
            }
        }
        report.tables.push(t);
        report.tables.push(f);
        return Ok(());
    }

    let q = Quantity::parse(quantity).ok_or_else(|| Failure::Input(format!("unknown quantity {quantity:?}")))?;
    let structured = scaling_experiment(&generator, ns, q, fam.tol, threshold)?;
    let random = if contrast {
        Some(scaling_experiment(&generator.matched_random(fam.seed), ns, q, fam.tol, threshold)?)
    } else {
        None
    };
    let columns: &[&str] = if contrast { &["n", "value", "random_value"] } else { &["n", "value"] };
    let mut t = Table::new("series", columns);
    for (idx, &(n, v)) in structured.series.iter().enumerate() {
        let mut row: Vec<Cell> = vec![n.into(), v.into()];
        if let Some(r) = &random {
            row.push(r.series[idx].1.into());
        }
        t.push(row);
    }
    report.tables.push(t);
    let mut all = vec![&structured];
    all.extend(random.as_ref());
    report.tables.push(fits_table(&all));
    if !structured.within_threshold && !generator.is_random() {
        return Err(Failure::Verification(format!(
            "slope of {} exceeds {threshold}",
            q.name()
        )));
    }
    Ok(())
}

fn parse_cut(text: Option<&str>, n: usize) -> CliResult<Region> {
    let bad = |s: &str| Failure::Input(format!("bad cut {s:?}; expected rows:I, pixels:K or rect:T,L,H,W"));
    let Some(text) = text else {
        return Ok(Region::pixel_prefix(n, n * n / 2)?);
    };
    let (kind, rest) = text.split_once(':').ok_or_else(|| bad(text))?;
    let nums: Vec<usize> = rest
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| bad(text)))
        .collect::<CliResult<_>>()?;
    Ok(match (kind, nums.as_slice()) {
        ("rows", [i]) => Region::row_prefix(n, *i)?,
        ("pixels", [k]) => Region::pixel_prefix(n, *k)?,
        ("rect", [t, l, h, w]) => Region::rectangle(n, *t, *l, *h, *w)?,
        _ => return Err(bad(text)),
    })
}

fn cmd_baseline(fam: &FamilyArgs, trials: u64, cut: Option<&str>, report: &mut Report) -> CliResult<()> {
    let n = fam.size()?;
    fam.echo(&mut report.config);
    report.config.insert("n".into(), n.into());
    report.config.insert("trials".into(), trials.into());
    report.config.insert("cut".into(), cut.unwrap_or("default").into());
    let region = parse_cut(cut, n)?;

    let mut t = Table::new("baseline", &["family", "seed", "m", "rank", "cap"]);
    let m = match fam.family.as_deref() {
        None | Some("random") => fam.m.ok_or_else(|| Failure::Input("--m is required without a structured --family".into()))?,
        Some(_) => {
            let family = fam.load()?;
            describe(report, &family);
            let u = imgtn::rankcore::unfold(&family, &imgtn::rankcore::Bipartition::from_region(&region), None)?;
            t.push(vec![
                family.meta().name.clone().into(),
                "none".into(),
                family.len().into(),
                imgtn::rankcore::exact_rank(&u).into(),
                imgtn::certify::rank_cap(family.len(), &region).into(),
            ]);
            fam.m.unwrap_or(family.len())
        }
    };
    for seed in fam.seed..fam.seed + trials {
        let r = random_baseline_profile(n, m, seed, &region)?;
        t.push(vec![format!("random:m={m}").into(), seed.into(), m.into(), r.rank.into(), r.cap.into()]);
    }
    report.tables.push(t);
    Ok(())
}

fn cmd_crosscheck(fam: &FamilyArgs, check: &CheckArgs, report: &mut Report) -> CliResult<()> {
    let family = fam.load()?;
    fam.echo(&mut report.config);
    check.echo(&mut report.config);
    describe(report, &family);
    let r = tt_ht_cross_check(&family, fam.tol, check.probes, check.probe_seed)?;
    let mut t = Table::new("crosscheck", &["n", "members", "probes", "max_tt_ht", "max_tt_f", "max_ht_f", "passed"]);
    t.push(vec![
        r.n.into(),
        r.members.into(),
        r.probes.into(),
        r.max_tt_ht.into(),
        r.max_tt_f.into(),
        r.max_ht_f.into(),
        r.passed.into(),
    ]);
    report.tables.push(t);
    if !r.passed {
        return Err(Failure::Verification(format!("max |tt - ht| = {}", r.max_tt_ht)));
    }
    Ok(())
}

fn emit(report: &Report, format: Format, out: Option<&Path>) -> CliResult<()> {
    let text = match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Input(format!("--jobs: {e}")))?;
    }
    let started = Instant::now();
    let out = cli.out.as_deref();
    let name = match &cli.command {
        Command::Gen(_) => "gen",
        Command::Certify { .. } => "certify",
        Command::Tt { .. } => "tt",
        Command::Ht { .. } => "ht",
        Command::Diag { .. } => "diag",
        Command::Scale { .. } => "scale",
        Command::Baseline { .. } => "baseline",
        Command::Crosscheck { .. } => "crosscheck",
    };
    let mut report = Report::new(name, Map::new());
    let outcome = match &cli.command {
        Command::Gen(fam) => return cmd_gen(fam, out),
        Command::Certify { fam, regions } => cmd_certify(fam, *regions, &mut report),
        Command::Tt { fam, check, net, bounds } => cmd_tt(fam, check, net.as_deref(), *bounds, &mut report),
        Command::Ht { fam, check, net } => cmd_ht(fam, check, net.as_deref(), &mut report),
        Command::Diag { fam, check, load, net } => cmd_diag(fam, check, load.as_deref(), net.as_deref(), &mut report),
        Command::Scale {
            fam,
            ns,
            quantity,
            threshold,
            contrast,
        } => cmd_scale(fam, ns, quantity, *threshold, *contrast, &mut report),
        Command::Baseline { fam, trials, cut } => cmd_baseline(fam, *trials, cut.as_deref(), &mut report),
        Command::Crosscheck { fam, check } => cmd_crosscheck(fam, check, &mut report),
    };
    // a failed check still leaves a report behind; input errors do not
    if let Err(Failure::Input(_)) = outcome {
        return outcome;
    }
    if cli.timing {
        report.elapsed_seconds = Some(started.elapsed().as_secs_f64());
    }
    emit(&report, cli.format, out)?;
    outcome
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
