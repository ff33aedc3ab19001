use rydcoh_core::analysis::{t2_prime_from_echo, CoherenceBudget};
use rydcoh_core::units::{parse_quantity, Dimension};

use crate::failure::{Failure, Outcome};

#[derive(Debug, Default)]
pub struct BudgetArgs {
    pub tau_gr: Option<String>,
    pub t2_echo: Option<String>,
    pub t1: Option<String>,
    pub t2_star: Option<String>,
    pub t2_prime: Option<String>,
}

fn time(flag: &str, v: &Option<String>) -> Outcome<Option<f64>> {
    v.as_deref()
        .map(|s| parse_quantity(s, Dimension::Time).map_err(|e| Failure::Config(format!("--{flag}: {e}"))))
        .transpose()
}

fn us(v: f64) -> String {
    format!("{:.4} us", v * 1e6)
}

/// Completes the coherence budget from whichever flags are present and
/// returns the printed report.
pub fn cmd_budget(args: &BudgetArgs) -> Outcome<String> {
    let tau = time("tau-gr", &args.tau_gr)?;
    let echo = time("t2-echo", &args.t2_echo)?;
    let t1 = time("t1", &args.t1)?;
    let star = time("t2-star", &args.t2_star)?;
    let prime = time("t2-prime", &args.t2_prime)?;
    let t1 = t1.ok_or_else(|| Failure::Config("--t1 is required".into()))?;

    let budget = match (tau, echo, star, prime) {
        (None, Some(e), None, None) => {
            let t2p = t2_prime_from_echo(e, t1)?;
            return Ok(format!("t2_echo  {}\nt1       {}\nt2_prime {}\n", us(e), us(t1), us(t2p)));
        }
        (Some(tau), Some(e), None, None) => CoherenceBudget::from_measurements(tau, e, t1)?,
        (None, None, Some(s), Some(p)) => CoherenceBudget::from_components(s, p, t1)?,
        (Some(tau), Some(e), Some(s), Some(p)) => {
            let b = CoherenceBudget { t2_star: s, t2_prime: p, t1, tau_gr: tau, t2_spin_echo: Some(e) };
            let echo_expected = 1.0 / (1.0 / p + 0.5 / t1);
            let echo_residual = (e / echo_expected - 1.0).abs();
            return Ok(format!("{}echo residual {echo_residual:.3e}\n", report(&b)));
        }
        _ => {
            return Err(Failure::Config(
                "give --tau-gr --t2-echo --t1, --t2-star --t2-prime --t1, --t2-echo --t1, or all five".into(),
            ))
        }
    };
    Ok(report(&budget))
}

fn report(b: &CoherenceBudget) -> String {
    let mut s = String::new();
    s += &format!("tau_gr   {}\n", us(b.tau_gr));
    if let Some(e) = b.t2_spin_echo {
        s += &format!("t2_echo  {}\n", us(e));
    }
    s += &format!("t2_star  {}\nt2_prime {}\nt1       {}\n", us(b.t2_star), us(b.t2_prime), us(b.t1));
    s += &format!("residual {:.3e}\n", b.consistency_residual());
    s
}
