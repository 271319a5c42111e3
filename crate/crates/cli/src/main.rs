use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use todashock::asymptotics::{
    dirichlet_eigenvalue, phase_shift_delta, theta_phase, trace_formulas,
};
use todashock::elliptic::SurfaceData;
use todashock::gfunction::{signature_report, solve_whitham_edge, GData};
use todashock::harness::{fmt_g17, parse_config, run_compare, write_outputs};
use todashock::lattice_sim::{evolve_to, front_detect, init_steplike};
use todashock::scattering::{find_eigenvalues, ScatteringSummary, StepData, Window, TOL_RES};
use todashock::spectral_map::{critical_rays, BackgroundParams};
use todashock::{Error, Result};

#[derive(Parser)]
#[command(
    name = "todashock",
    about = "Toda shock waves: direct simulation and modulated elliptic-wave asymptotics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Background {
    /// left background half-amplitude a > 0
    #[arg(long)]
    a: f64,
    /// left background offset b (shock condition: b + 2a < -1)
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Print the four critical rays xi_cr,1 < xi'_cr,1 < xi'_cr < xi_cr
    CriticalValues {
        #[command(flatten)]
        bg: Background,
        /// also write a CSV (columns: name, value)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Wronskian at the band edges, resonance flags, eigenvalues, optional chi profile
    Scattering {
        #[command(flatten)]
        bg: Background,
        /// perturbation window file: lines "n a b"
        #[arg(long)]
        window: Option<PathBuf>,
        /// write chi on a band grid (columns: z, im_chi)
        #[arg(long)]
        chi_csv: Option<PathBuf>,
        /// grid size for the chi profile
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Whitham edge y(xi), lambda_y, band period B, optional Re g signature table
    Gfunction {
        #[command(flatten)]
        bg: Background,
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,
        /// write sign(Re g) samples (columns: re_z, im_z, sign_re_g)
        #[arg(long)]
        csv: Option<PathBuf>,
        /// polar grid resolution
        #[arg(long, default_value_t = 24)]
        grid: usize,
    },
    /// Modulated-wave prediction on a range of lattice sites at fixed t
    Asymptote {
        #[command(flatten)]
        bg: Background,
        #[arg(long)]
        t: f64,
        /// inclusive site range, e.g. 600:660
        #[arg(long, value_parser = parse_range)]
        n_range: (i64, i64),
        /// output CSV (columns: n, t, xi, lambda_nt, b_hat, a2sum_hat); stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the lattice and write snapshots
    Simulate {
        #[command(flatten)]
        bg: Background,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// domain margin beyond the ballistic cone (default 50 + 10 sqrt(t))
        #[arg(long)]
        pad: Option<f64>,
        /// snapshot interval; only the final state if omitted
        #[arg(long)]
        snapshot_every: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Simulation vs asymptotics on a (xi, t) grid; exit 0 iff all checks pass
    Compare {
        /// key=value config file (keys: a, b, epsilon, dt, pad, t_list, xi_grid, out_dir)
        #[arg(long)]
        config: PathBuf,
        /// output directory override
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> std::result::Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got {s}"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::CriticalValues { bg, csv } => {
            let p = BackgroundParams::new(bg.a, bg.b)?;
            let rays = critical_rays(&p)?;
            println!("{:<14} {:>22}", "name", "value");
            for (name, v) in [
                ("xi_cr", rays.xi_cr),
                ("xi_cr_prime", rays.xi_cr_prime),
                ("xi_cr1_prime", rays.xi_cr1_prime),
                ("xi_cr1", rays.xi_cr1),
            ] {
                println!("{name:<14} {v:>22.15}");
            }
            if let Some(path) = csv {
                let mut s = String::from("name,value\n");
                for (name, v) in [
                    ("xi_cr", rays.xi_cr),
                    ("xi_cr_prime", rays.xi_cr_prime),
                    ("xi_cr1_prime", rays.xi_cr1_prime),
                    ("xi_cr1", rays.xi_cr1),
                ] {
                    s.push_str(&format!("{name},{}\n", fmt_g17(v)));
                }
                std::fs::write(path, s)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Scattering {
            bg,
            window,
            chi_csv,
            grid,
        } => {
            let p = BackgroundParams::new(bg.a, bg.b)?;
            let data = match window {
                None => StepData::pure_step(p),
                Some(path) => StepData::with_window(p, read_window(&path)?)?,
            };
            let summary = ScatteringSummary::build(data, TOL_RES)?;
            let rep = &summary.resonance;
            println!("edge            |W|          resonant");
            let names = ["-1", "+1", "q", "q1"];
            for (k, name) in names.iter().enumerate() {
                println!(
                    "{:<4} ({:>10.6})  {:>12.6e}  {}",
                    name, rep.edges[k], rep.w_abs[k], rep.resonant[k]
                );
            }
            if summary.eigenvalues.is_empty() {
                println!("eigenvalues: none");
            } else {
                println!("eigenvalues (z):");
                for z in &summary.eigenvalues {
                    let lam = 0.5 * (z + 1.0 / z);
                    println!("  z = {z:.12}   lambda = {lam:.12}");
                }
            }
            if let Some(path) = chi_csv {
                let mut s = String::from("z,im_chi\n");
                for k in 1..grid {
                    let z = p.q1 + (p.q - p.q1) * k as f64 / grid as f64;
                    let chi = summary.chi(z)?;
                    s.push_str(&format!("{},{}\n", fmt_g17(z), fmt_g17(chi.im)));
                }
                std::fs::write(path, s)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gfunction { bg, xi, csv, grid } => {
            let p = BackgroundParams::new(bg.a, bg.b)?;
            let edge = solve_whitham_edge(xi, &p, 0.05)?;
            let gd = GData::new(edge)?;
            println!("y        = {:.15}", edge.y);
            println!("lambda_y = {:.15}", edge.lambda_y);
            println!("B        = {:.15}", gd.b_period);
            if let Some(path) = csv {
                let report = signature_report(&gd, grid, 2 * grid)?;
                let mut s = String::from("re_z,im_z,sign_re_g\n");
                for (re, im, sign) in report.samples {
                    s.push_str(&format!("{},{},{sign}\n", fmt_g17(re), fmt_g17(im)));
                }
                std::fs::write(path, s)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Asymptote { bg, t, n_range, out } => {
            let p = BackgroundParams::new(bg.a, bg.b)?;
            let data = StepData::pure_step(p);
            let eig = find_eigenvalues(&data)?;
            let mut s = String::from("n,t,xi,lambda_nt,b_hat,a2sum_hat\n");
            for n in n_range.0..=n_range.1 {
                let xi = n as f64 / t;
                let edge = solve_whitham_edge(xi, &p, 0.05)?;
                let gd = GData::new(edge)?;
                let surface = SurfaceData::build(&gd)?;
                let ps = phase_shift_delta(&edge, &data, &eig, TOL_RES)?;
                let x = theta_phase(n, t, &surface, &ps)?;
                let div = dirichlet_eigenvalue(&x, &surface)?;
                let wave = trace_formulas(div.lambda_nt, &edge);
                s.push_str(&format!(
                    "{n},{},{},{},{},{}\n",
                    fmt_g17(t),
                    fmt_g17(xi),
                    fmt_g17(wave.lambda_nt),
                    fmt_g17(wave.b_hat),
                    fmt_g17(wave.a_hat_sq_sum)
                ));
            }
            match out {
                Some(path) => std::fs::write(path, s)?,
                None => print!("{s}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            bg,
            t,
            dt,
            pad,
            snapshot_every,
            out,
        } => {
            let p = BackgroundParams::new(bg.a, bg.b)?;
            std::fs::create_dir_all(&out)?;
            let mut state = init_steplike(&p, t, pad)?;
            let mut snap_times = Vec::new();
            if let Some(step) = snapshot_every {
                if step <= 0.0 {
                    return Err(Error::Data("snapshot-every must be positive".into()));
                }
                let mut tk = step;
                while tk < t - 1e-9 {
                    snap_times.push(tk);
                    tk += step;
                }
            }
            snap_times.push(t);
            for &tk in &snap_times {
                evolve_to(&mut state, tk, dt)?;
                let mut s = String::from("n,a,b\n");
                for n in state.n_min..=state.n_max() {
                    s.push_str(&format!(
                        "{n},{},{}\n",
                        fmt_g17(state.a_at(n)),
                        fmt_g17(state.b_at(n))
                    ));
                }
                std::fs::write(out.join(format!("snapshot_t{tk:.3}.csv")), s)?;
            }
            let front = front_detect(&state, 1e-3);
            let mut manifest = String::new();
            manifest.push_str(&format!("a = {}\n", fmt_g17(p.a)));
            manifest.push_str(&format!("b = {}\n", fmt_g17(p.b)));
            manifest.push_str(&format!("dt = {}\n", fmt_g17(dt)));
            manifest.push_str(&format!("t_final = {}\n", fmt_g17(t)));
            manifest.push_str(&format!("n_min = {}\n", state.n_min));
            manifest.push_str(&format!("n_max = {}\n", state.n_max()));
            manifest.push_str(&format!("front_n = {front}\n"));
            std::fs::write(out.join("manifest.txt"), manifest)?;
            println!(
                "simulated to t = {t}, domain [{}, {}], right front at n = {front}",
                state.n_min,
                state.n_max()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { config, out } => {
            let text = std::fs::read_to_string(&config)?;
            let (mut cfg, warnings) = parse_config(&text)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            if let Some(dir) = out {
                cfg.out_dir = dir;
            }
            let report = run_compare(&cfg)?;
            write_outputs(&report, &cfg.out_dir)?;
            println!(
                "wrote {}/compare.csv, summary.csv, decay.svg, manifest.txt",
                cfg.out_dir.display()
            );
            for &(t, eb, ea) in &report.per_t {
                println!("t = {t:>7.1}: max err_b = {eb:.4e}, max err_a = {ea:.4e}");
            }
            let mut ok = true;
            for (name, pass, detail) in report.checks() {
                println!("{} {name} ({detail})", if pass { "PASS" } else { "FAIL" });
                ok &= pass;
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn read_window(path: &PathBuf) -> Result<Window> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<(i64, f64, f64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<f64> {
            tok.ok_or(Error::Config {
                line: idx + 1,
                msg: "expected: n a b".into(),
            })?
            .parse()
            .map_err(|_| Error::Config {
                line: idx + 1,
                msg: "bad number".into(),
            })
        };
        let n = parse(it.next())? as i64;
        let a = parse(it.next())?;
        let b = parse(it.next())?;
        rows.push((n, a, b));
    }
    rows.sort_by_key(|r| r.0);
    if rows.is_empty() {
        return Err(Error::Data("empty window file".into()));
    }
    let n0 = rows[0].0;
    for (k, r) in rows.iter().enumerate() {
        if r.0 != n0 + k as i64 {
            return Err(Error::Data(format!(
                "window sites must be contiguous, missing n = {}",
                n0 + k as i64
            )));
        }
    }
    Ok(Window {
        n0,
        a: rows.iter().map(|r| r.1).collect(),
        b: rows.iter().map(|r| r.2).collect(),
    })
}
