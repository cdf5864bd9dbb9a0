//! Command-line flags.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::satenc::AmoScheme;
use crate::solve::{OutputStyle, Strategy};
use crate::transform::{CseMode, PassOptions};

pub const HELP: &str = "\
usage: tailor [options] <model>.eprime [<param>.param]

Input:
  -in-eprime <file>        model file (any extension)
  -in-param <file>         parameter file (any extension)
  -params <string>         parameter lettings given inline
  -mode Normal             the only supported mode

Output:
  -sat                     DIMACS output (the default and only backend)
  -out-sat <file>          DIMACS file name
  -out-solution <file>     solution file name
  -out-info <file>         statistics file name
  -out-aux <file>          symbol table file name
  -save-symbols            write the symbol table

Optimisation:
  -O0 -O1 -O2 -O3          optimisation level (default -O2; rightmost wins)
  -S0 -S1                  symmetry level (default -S1; rightmost wins)
  -no-cse -identical-cse -active-cse -ac-cse -active-ac-cse
  -deletevars -aggregate -reduce-domains -reduce-domains-extend
  -remove-redundant-vars -aux-non-functional

SAT encoding:
  -sat-amo-product (default) -sat-amo-commander -sat-amo-ladder -sat-amo-tree
  -sat-pb-tree -sat-sum-tree

Control:
  -Wundef                  warn when undefinedness affects the model
  -timelimit <seconds>     wall-clock limit on tailoring
  -cnflimit <clauses>      give up when the CNF reaches this many clauses
  -seed <integer>          seed for the built-in solver

Solving:
  -run-solver              solve and write solutions
  -all-solutions           find every solution
  -num-solutions <n>       find up to n solutions
  -solutions-to-stdout     print solutions separated by ----------
  -solutions-to-null       discard solutions
  -opt-strategy bisect|linear|unsat
  -sat-family minisat|lingeling|glucose|cadical|kissat|nbc_minisat_all|bc_minisat_all
  -satsolver-bin <file>    run an external SAT solver instead of the built-in one
  -solver-options <string> options passed to the external solver
  -help                    this text
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatFamily {
    Minisat,
    Lingeling,
    Glucose,
    Cadical,
    Kissat,
    NbcMinisatAll,
    BcMinisatAll,
}

impl SatFamily {
    fn parse(s: &str) -> Option<SatFamily> {
        use SatFamily::*;
        Some(match s {
            "minisat" => Minisat,
            "lingeling" => Lingeling,
            "glucose" => Glucose,
            "cadical" => Cadical,
            "kissat" => Kissat,
            "nbc_minisat_all" => NbcMinisatAll,
            "bc_minisat_all" => BcMinisatAll,
            _ => return None,
        })
    }

    /// How the family reports a model.
    pub fn style(self) -> OutputStyle {
        match self {
            SatFamily::Lingeling | SatFamily::Cadical | SatFamily::Kissat => OutputStyle::Competition,
            _ => OutputStyle::ResultFile,
        }
    }

    fn finds_all(self) -> bool {
        matches!(self, SatFamily::NbcMinisatAll | SatFamily::BcMinisatAll)
    }
}

/// Individual pass switches, applied on top of the level presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PassFlag {
    NoCse,
    IdenticalCse,
    ActiveCse,
    AcCse,
    ActiveAcCse,
    DeleteVars,
    Aggregate,
    ReduceDomains,
    ReduceDomainsExtend,
    RemoveRedundantVars,
    AuxNonFunctional,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub help: bool,
    pub model: Option<PathBuf>,
    pub param: Option<PathBuf>,
    pub params_inline: Option<String>,
    pub out_sat: Option<PathBuf>,
    pub out_solution: Option<PathBuf>,
    pub out_info: Option<PathBuf>,
    pub out_aux: Option<PathBuf>,
    pub save_symbols: bool,
    pub opt: u8,
    pub sym: u8,
    pass_flags: Vec<PassFlag>,
    pub amo: AmoScheme,
    pub warn_undef: bool,
    pub timelimit: Option<f64>,
    pub cnflimit: Option<u64>,
    pub seed: u64,
    pub run_solver: bool,
    pub all_solutions: bool,
    pub num_solutions: Option<u64>,
    pub to_stdout: bool,
    pub to_null: bool,
    pub strategy: Strategy,
    pub family: SatFamily,
    pub satsolver_bin: Option<PathBuf>,
    pub solver_options: String,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            help: false,
            model: None,
            param: None,
            params_inline: None,
            out_sat: None,
            out_solution: None,
            out_info: None,
            out_aux: None,
            save_symbols: false,
            opt: 2,
            sym: 1,
            pass_flags: Vec::new(),
            amo: AmoScheme::Product,
            warn_undef: false,
            timelimit: None,
            cnflimit: None,
            seed: 0,
            run_solver: false,
            all_solutions: false,
            num_solutions: None,
            to_stdout: false,
            to_null: false,
            strategy: Strategy::Bisect,
            family: SatFamily::Cadical,
            satsolver_bin: None,
            solver_options: String::new(),
        }
    }
}

impl Config {
    /// Pass settings: the presets of the final levels, then every
    /// individual switch in command-line order.
    pub fn passes(&self) -> PassOptions {
        let mut p = PassOptions::preset(self.opt, self.sym);
        for f in &self.pass_flags {
            match f {
                PassFlag::NoCse => {
                    p.cse = CseMode::Off;
                    p.ac_cse = false;
                    p.active_ac_cse = false;
                }
                PassFlag::IdenticalCse => {
                    if p.cse == CseMode::Off {
                        p.cse = CseMode::Identical;
                    }
                }
                PassFlag::ActiveCse => p.cse = CseMode::Active,
                PassFlag::AcCse => p.ac_cse = true,
                PassFlag::ActiveAcCse => {
                    p.ac_cse = true;
                    p.active_ac_cse = true;
                }
                PassFlag::DeleteVars => p.deletevars = true,
                PassFlag::Aggregate => p.aggregate = true,
                PassFlag::ReduceDomains => p.reduce_domains = true,
                PassFlag::ReduceDomainsExtend => {
                    p.reduce_domains = true;
                    p.reduce_domains_extend = true;
                }
                PassFlag::RemoveRedundantVars => p.remove_redundant_vars = true,
                PassFlag::AuxNonFunctional => p.aux_non_functional = true,
            }
        }
        p.warn_undef = self.warn_undef;
        p
    }

    /// Whether solutions are numbered rather than written to one file.
    pub fn multiple_solutions(&self) -> bool {
        self.all_solutions || self.num_solutions.is_some()
    }
}

const OTHER_BACKENDS: &[&str] = &["-minion", "-gecode", "-chuffed", "-flatzinc", "-minizinc", "-smt", "-maxsat", "-dominion"];

const OTHER_BACKEND_VALUE_FLAGS: &[&str] = &[
    "-out-minion",
    "-out-gecode",
    "-out-chuffed",
    "-out-flatzinc",
    "-out-minizinc",
    "-out-smt",
    "-out-dominion",
    "-minion-bin",
    "-gecode-bin",
    "-chuffed-bin",
    "-fzn-bin",
    "-preprocess",
];

const OTHER_BACKEND_SWITCHES: &[&str] = &["-nomappers", "-minionmappers", "-no-bound-vars"];

const UNSUPPORTED: &[&str] = &[
    "-S2",
    "-var-sym-breaking",
    "-tabulate",
    "-factor-encoding",
    "-amo-detect",
    "-sat-table-mdd",
    "-sat-pb-mdd",
    "-sat-pb-gpw",
    "-sat-pb-swc",
    "-sat-pb-ggt",
    "-sat-sum-mdd",
    "-sat-sum-gpw",
    "-sat-sum-swc",
    "-sat-sum-ggt",
    "-interactive-sat",
];

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn unsupported(flag: &str) -> Error {
    Error::Unsupported(format!("{flag} is unsupported in this implementation"))
}

pub fn parse_args<I: IntoIterator<Item = String>>(args: I) -> Result<Config> {
    let mut c = Config::default();
    let mut it = args.into_iter();
    let value = |it: &mut I::IntoIter, flag: &str| it.next().ok_or_else(|| usage(format!("{flag} needs a value")));
    while let Some(a) = it.next() {
        let flag = a.as_str();
        match flag {
            "-help" | "--help" | "-h" => c.help = true,
            "-in-eprime" => c.model = Some(value(&mut it, flag)?.into()),
            "-in-param" => c.param = Some(value(&mut it, flag)?.into()),
            "-params" => c.params_inline = Some(value(&mut it, flag)?),
            "-mode" => match value(&mut it, flag)?.as_str() {
                "Normal" => {}
                "ReadSolution" => return Err(Error::Unsupported("ReadSolution mode is unsupported in this implementation".into())),
                m => return Err(usage(format!("unknown mode {m}"))),
            },
            "-sat" => {}
            "-out-sat" => c.out_sat = Some(value(&mut it, flag)?.into()),
            "-out-solution" => c.out_solution = Some(value(&mut it, flag)?.into()),
            "-out-info" => c.out_info = Some(value(&mut it, flag)?.into()),
            "-out-aux" => c.out_aux = Some(value(&mut it, flag)?.into()),
            "-save-symbols" => c.save_symbols = true,
            "-O0" | "-O1" | "-O2" | "-O3" => c.opt = flag.as_bytes()[2] - b'0',
            "-S0" | "-S1" => c.sym = flag.as_bytes()[2] - b'0',
            "-no-cse" => c.pass_flags.push(PassFlag::NoCse),
            "-identical-cse" => c.pass_flags.push(PassFlag::IdenticalCse),
            "-active-cse" => c.pass_flags.push(PassFlag::ActiveCse),
            "-ac-cse" => c.pass_flags.push(PassFlag::AcCse),
            "-active-ac-cse" => c.pass_flags.push(PassFlag::ActiveAcCse),
            "-deletevars" => c.pass_flags.push(PassFlag::DeleteVars),
            "-aggregate" => c.pass_flags.push(PassFlag::Aggregate),
            "-reduce-domains" => c.pass_flags.push(PassFlag::ReduceDomains),
            "-reduce-domains-extend" => c.pass_flags.push(PassFlag::ReduceDomainsExtend),
            "-remove-redundant-vars" => c.pass_flags.push(PassFlag::RemoveRedundantVars),
            "-aux-non-functional" => c.pass_flags.push(PassFlag::AuxNonFunctional),
            "-sat-amo-product" => c.amo = AmoScheme::Product,
            "-sat-amo-commander" => c.amo = AmoScheme::Commander,
            "-sat-amo-ladder" => c.amo = AmoScheme::Ladder,
            "-sat-amo-tree" => c.amo = AmoScheme::Tree,
            "-sat-pb-tree" | "-sat-sum-tree" => {}
            "-Wundef" => c.warn_undef = true,
            "-timelimit" => {
                let v = value(&mut it, flag)?;
                let t: f64 = v.parse().map_err(|_| usage(format!("-timelimit expects seconds, got {v}")))?;
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(usage(format!("-timelimit expects seconds, got {v}")));
                }
                c.timelimit = Some(t);
            }
            "-cnflimit" => {
                let v = value(&mut it, flag)?;
                c.cnflimit = Some(v.parse().map_err(|_| usage(format!("-cnflimit expects a clause count, got {v}")))?);
            }
            "-seed" => {
                let v = value(&mut it, flag)?;
                let s: i64 = v.parse().map_err(|_| usage(format!("-seed expects an integer, got {v}")))?;
                c.seed = s as u64;
            }
            "-run-solver" => c.run_solver = true,
            "-all-solutions" => c.all_solutions = true,
            "-num-solutions" => {
                let v = value(&mut it, flag)?;
                let n: u64 = v.parse().map_err(|_| usage(format!("-num-solutions expects a count, got {v}")))?;
                if n == 0 {
                    return Err(usage("-num-solutions expects a positive count"));
                }
                c.num_solutions = Some(n);
            }
            "-solutions-to-stdout" => c.to_stdout = true,
            "-solutions-to-null" => c.to_null = true,
            "-opt-strategy" => {
                c.strategy = match value(&mut it, flag)?.as_str() {
                    "bisect" => Strategy::Bisect,
                    "linear" => Strategy::Linear,
                    "unsat" => Strategy::Unsat,
                    s => return Err(usage(format!("unknown optimisation strategy {s}"))),
                }
            }
            "-sat-family" => {
                let v = value(&mut it, flag)?;
                c.family = SatFamily::parse(&v).ok_or_else(|| usage(format!("unknown SAT family {v}")))?;
            }
            "-satsolver-bin" => c.satsolver_bin = Some(value(&mut it, flag)?.into()),
            "-solver-options" => c.solver_options = value(&mut it, flag)?,
            f if OTHER_BACKENDS.contains(&f) || OTHER_BACKEND_SWITCHES.contains(&f) => {
                return Err(Error::Unsupported(format!("{f}: only the SAT backend is supported")));
            }
            f if OTHER_BACKEND_VALUE_FLAGS.contains(&f) => {
                return Err(Error::Unsupported(format!("{f}: only the SAT backend is supported")));
            }
            f if UNSUPPORTED.contains(&f) => return Err(unsupported(f)),
            f if f.starts_with('-') && f.len() > 1 => return Err(usage(format!("unknown flag {f}\n\n{HELP}"))),
            path => classify(&mut c, path)?,
        }
    }
    if c.all_solutions && c.num_solutions.is_some() {
        return Err(usage("-all-solutions and -num-solutions are mutually exclusive"));
    }
    if c.to_stdout && c.to_null {
        return Err(usage("-solutions-to-stdout and -solutions-to-null are mutually exclusive"));
    }
    if c.param.is_some() && c.params_inline.is_some() {
        return Err(usage("give parameters either as a file or with -params, not both"));
    }
    if c.family.finds_all() && c.num_solutions.is_none() {
        c.all_solutions = true;
    }
    if c.multiple_solutions() {
        c.run_solver = true;
    }
    Ok(c)
}

fn classify(c: &mut Config, path: &str) -> Result<()> {
    let slot = if path.ends_with(".eprime") {
        &mut c.model
    } else if path.ends_with(".param") || path.ends_with(".eprime-param") {
        &mut c.param
    } else {
        return Err(usage(format!("cannot tell whether {path} is a model or a parameter file; use -in-eprime or -in-param")));
    };
    if slot.is_some() {
        return Err(usage(format!("more than one input file of the kind of {path}")));
    }
    *slot = Some(path.into());
    Ok(())
}
