//! Commented TOML template listing every configuration value.

use std::fmt::Write;

use strip_core::config::{LSchedule, RunConfig};

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", items.join(", "))
}

pub fn render(c: &RunConfig) -> String {
    let s = &c.sweep;
    let mut t = String::new();
    let w = &mut t;
    let _ = writeln!(w, "# Run configuration for `strip`. Every value shown is the built-in default.");
    let _ = writeln!(w);
    let _ = writeln!(w, "# Seed for the random test fields of the stability check.");
    let _ = writeln!(w, "seed = {}", c.seed);
    let _ = writeln!(w, "# Worker threads (at least 1).");
    let _ = writeln!(w, "workers = {}", c.workers);
    let _ = writeln!(w, "output_dir = {:?}", c.output_dir.display().to_string());
    let _ = writeln!(w);
    let _ = writeln!(w, "# Dimension N, exponent p > 1 and strip parameter L > 0.");
    let _ = writeln!(w, "[problem]");
    let _ = writeln!(w, "N = {}", c.problem.n);
    let _ = writeln!(w, "p = {:?}", c.problem.p);
    let _ = writeln!(w, "L = {:?}", c.problem.l);
    let _ = writeln!(w);
    let _ = writeln!(w, "# Values of L for `sweep`: either `values = [...]` or `min`, `max`, `count`.");
    let _ = writeln!(w, "[schedule]");
    match &c.schedule {
        LSchedule::List { values } => {
            let _ = writeln!(w, "values = {}", list(values));
        }
        LSchedule::Range { min, max, count } => {
            let _ = writeln!(w, "min = {min:?}\nmax = {max:?}\ncount = {count}");
        }
    }
    let _ = writeln!(w);
    let _ = writeln!(w, "[sweep]");
    let _ = writeln!(w, "# A point is trivial when ||d_t u|| < trivial_s_tol * ||u|| and |c - c*_h| / c*_h < trivial_c_tol.");
    let _ = writeln!(w, "trivial_s_tol = {:?}", s.trivial_s_tol);
    let _ = writeln!(w, "trivial_c_tol = {:?}", s.trivial_c_tol);
    let _ = writeln!(w, "# Bracket width at which the transition bisection stops.");
    let _ = writeln!(w, "l_tol = {:?}", s.l_tol);
    let _ = writeln!(w, "# Radial step of the reference ground-state profile.");
    let _ = writeln!(w, "profile_h = {:?}", s.profile_h);
    let _ = writeln!(w, "# Relative tolerance of the monotonicity check on c(L).");
    let _ = writeln!(w, "order_tol = {:?}", s.order_tol);
    let _ = writeln!(w);
    let _ = writeln!(w, "[sweep.solver]");
    let _ = writeln!(w, "# Relative Euler-Lagrange residual at which a minimization stops.");
    let _ = writeln!(w, "tol = {:?}", s.solver.tol);
    let _ = writeln!(w, "max_iter = {}", s.solver.max_iter);
    let _ = writeln!(w, "# Inner conjugate-gradient solve.");
    let _ = writeln!(w, "cg_tol = {:?}", s.solver.cg_tol);
    let _ = writeln!(w, "cg_max_iter = {}", s.solver.cg_max_iter);
    let _ = writeln!(w, "# Iterations without a new best residual before a run counts as stalled.");
    let _ = writeln!(w, "stall_window = {}", s.solver.stall_window);
    let _ = writeln!(w, "# Monotone rearrangement between iterations.");
    let _ = writeln!(w, "rearrange = {}", s.solver.rearrange);
    let _ = writeln!(w);
    let _ = writeln!(w, "# Strip grid at parameter L: radial step h, m transverse nodes, r_max = min(r_max_factor / L, r_max_cap).");
    let _ = writeln!(w, "[sweep.grid]");
    let _ = writeln!(w, "h = {:?}", s.grid.h);
    let _ = writeln!(w, "m = {}", s.grid.m);
    let _ = writeln!(w, "r_max_factor = {:?}", s.grid.r_max_factor);
    let _ = writeln!(w, "r_max_cap = {:?}", s.grid.r_max_cap);
    let _ = writeln!(w);
    let _ = writeln!(w, "# `ground-state` and `eigen`: radial grid of the ground state, number of strip eigenvalues.");
    let _ = writeln!(w, "[eigen]");
    let _ = writeln!(w, "count = {}", c.eigen.count);
    let _ = writeln!(w, "h = {:?}", c.eigen.h);
    let _ = writeln!(w, "r_max = {:?}", c.eigen.r_max);
    let _ = writeln!(w);
    let _ = writeln!(w, "# `pitchfork`: sample points as ratios L / L*.");
    let _ = writeln!(w, "[pitchfork]");
    let _ = writeln!(w, "ratios = {}", list(&c.pitchfork.ratios));
    let _ = writeln!(w);
    let _ = writeln!(w, "# `critical-constants`: instanton test function in dimension N >= 4.");
    let _ = writeln!(w, "[critical]");
    let _ = writeln!(w, "N = {}", c.critical.n);
    let _ = writeln!(w, "eps = {:?}", c.critical.eps);
    let _ = writeln!(w, "L = {:?}", c.critical.l);
    t
}
